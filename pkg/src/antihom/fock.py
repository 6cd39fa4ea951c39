"""Few-photon Fock-space engine.

States are sparse maps from occupation vectors to complex amplitudes over a
labeled register of modes.  A linear optical element acts on creation
operators as ``a_i^dag -> sum_j U[j, i] a_j^dag``; transition amplitudes
between occupation vectors are permanents of submatrices of ``U`` with rows
and columns repeated by occupation.

Lossy (passive, non-unitary) elements are first embedded into a unitary on
a larger register with :func:`dilate`; the extra modes are loss ports.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement, permutations, product
from types import MappingProxyType
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import CapacityError, ConfigError, PhysicsError

MAX_PHOTONS = 4
MAX_MODES = 16

POLARIZATIONS = ("H", "V")
SPATIAL_PORTS = ("L", "R")

UNITARY_TOL = 1e-10
PASSIVITY_TOL = 1e-10
_AMPLITUDE_CUTOFF = 1e-15

_LOSS_RE = re.compile(r"^loss(\d+)$")
# generic ports m0, m1, ... for arbitrary user-supplied interferometers
_GENERIC_RE = re.compile(r"^m(\d+)$")

Occupation = tuple[int, ...]


def loss_port(k: int) -> str:
    if k < 0:
        raise ConfigError(f"loss port index must be >= 0, got {k}")
    return f"loss{k}"


def is_loss_port(port: str) -> bool:
    return _LOSS_RE.match(port) is not None


def _valid_port(port: str) -> bool:
    return port in SPATIAL_PORTS or bool(_LOSS_RE.match(port)) or bool(_GENERIC_RE.match(port))


class ModeLabel(NamedTuple):
    port: str
    pol: str = "H"
    temporal: int = 0

    def __str__(self) -> str:
        return f"{self.port}.{self.pol}.{self.temporal}"


@dataclass(frozen=True)
class ModeRegister:
    """Ordered, duplicate-free collection of mode labels."""

    modes: tuple[ModeLabel, ...]
    _index: Mapping[ModeLabel, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        modes = tuple(ModeLabel(*m) for m in self.modes)
        object.__setattr__(self, "modes", modes)
        if len(set(modes)) != len(modes):
            raise ConfigError("mode labels must be unique")
        if len(modes) > MAX_MODES:
            raise CapacityError(f"{len(modes)} modes requested, at most {MAX_MODES} supported")
        for m in modes:
            if not _valid_port(m.port):
                raise ConfigError(f"invalid port {m.port!r}")
            if m.pol not in POLARIZATIONS:
                raise ConfigError(f"invalid polarization {m.pol!r}")
            if not isinstance(m.temporal, (int, np.integer)) or m.temporal < 0:
                raise ConfigError(f"invalid temporal index {m.temporal!r}")
        object.__setattr__(self, "_index", MappingProxyType({m: i for i, m in enumerate(modes)}))

    @classmethod
    def product(
        cls,
        ports: Sequence[str] = SPATIAL_PORTS,
        pols: Sequence[str] = POLARIZATIONS,
        temporals: Sequence[int] = (0,),
    ) -> "ModeRegister":
        """Port-major product register ``ports x pols x temporals``."""
        return cls(tuple(ModeLabel(p, s, t) for p, s, t in product(ports, pols, temporals)))

    def __len__(self) -> int:
        return len(self.modes)

    def __iter__(self):
        return iter(self.modes)

    def __contains__(self, label) -> bool:
        return ModeLabel(*label) in self._index

    def index(self, label) -> int:
        try:
            return self._index[ModeLabel(*label)]
        except KeyError:
            raise ConfigError(f"mode {label} not in register") from None

    @property
    def ports(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(m.port for m in self.modes))

    @property
    def temporals(self) -> tuple[int, ...]:
        return tuple(sorted({m.temporal for m in self.modes}))

    def indices(self, ports: Iterable[str] | str) -> list[int]:
        """Indices of all modes belonging to the given port(s)."""
        if isinstance(ports, str):
            ports = (ports,)
        ports = set(ports)
        return [i for i, m in enumerate(self.modes) if m.port in ports]

    def loss_indices(self) -> list[int]:
        return [i for i, m in enumerate(self.modes) if is_loss_port(m.port)]

    def count(self, occ: Occupation, ports: Iterable[str] | str) -> int:
        """Total photons found in the given port(s) of an occupation vector."""
        return sum(occ[i] for i in self.indices(ports))

    def lost(self, occ: Occupation) -> int:
        return sum(occ[i] for i in self.loss_indices())

    def union(self, other: Iterable) -> "ModeRegister":
        extra = [ModeLabel(*m) for m in other if ModeLabel(*m) not in self._index]
        return ModeRegister(self.modes + tuple(extra))


def _check_occupation(register: ModeRegister, occ) -> Occupation:
    occ = tuple(int(n) for n in occ)
    if len(occ) != len(register):
        raise ConfigError(f"occupation {occ} does not match register of {len(register)} modes")
    if any(n < 0 for n in occ):
        raise ConfigError(f"negative occupation {occ}")
    return occ


@dataclass(frozen=True)
class FockState:
    """Pure state with a fixed total photon number.

    Terms with (numerically) zero amplitude are dropped and the remaining
    ones are kept in lexicographic order of their occupation vectors.
    """

    register: ModeRegister
    terms: Mapping[Occupation, complex]

    def __post_init__(self):
        clean: dict[Occupation, complex] = {}
        for occ, amp in self.terms.items():
            occ = _check_occupation(self.register, occ)
            amp = complex(amp)
            if abs(amp) > _AMPLITUDE_CUTOFF:
                clean[occ] = clean.get(occ, 0j) + amp
        totals = {sum(o) for o in clean}
        if len(totals) > 1:
            raise ConfigError(f"mixed photon numbers {sorted(totals)} in one state")
        if totals and max(totals) > MAX_PHOTONS:
            raise CapacityError(f"{max(totals)} photons requested, at most {MAX_PHOTONS} supported")
        ordered = {k: clean[k] for k in sorted(clean)}
        object.__setattr__(self, "terms", MappingProxyType(ordered))

    @classmethod
    def from_creation(
        cls,
        register: ModeRegister,
        monomials: Iterable[tuple[complex, Sequence]],
        normalize: bool = True,
    ) -> "FockState":
        """Build ``sum_k c_k prod_{l in labels_k} a_l^dag |0>``.

        Each monomial is ``(coefficient, [label, label, ...])``; repeated
        labels create several photons in the same mode.
        """
        terms: dict[Occupation, complex] = {}
        for coef, labels in monomials:
            occ = [0] * len(register)
            for label in labels:
                occ[register.index(label)] += 1
            # (a^dag)^n |0> = sqrt(n!) |n>
            weight = math.sqrt(math.prod(math.factorial(n) for n in occ))
            key = tuple(occ)
            terms[key] = terms.get(key, 0j) + complex(coef) * weight
        state = cls(register, terms)
        return state.normalized() if normalize else state

    @property
    def n_photons(self) -> int:
        return sum(next(iter(self.terms))) if self.terms else 0

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self.terms.values()))

    def normalized(self) -> "FockState":
        nrm = self.norm()
        if nrm == 0:
            raise PhysicsError("cannot normalize the zero vector")
        return FockState(self.register, {k: v / nrm for k, v in self.terms.items()})

    def amplitude(self, occ) -> complex:
        return self.terms.get(tuple(occ), 0j)

    def embed(self, register: ModeRegister) -> "FockState":
        """Re-express the state on a larger register, new modes empty."""
        if register == self.register:
            return self
        idx = [register.index(m) for m in self.register]
        terms = {}
        for occ, amp in self.terms.items():
            new = [0] * len(register)
            for i, n in zip(idx, occ):
                new[i] = n
            terms[tuple(new)] = amp
        return FockState(register, terms)

    def inner(self, other: "FockState") -> complex:
        """``<self|other>``; both states must live on the same register."""
        if other.register != self.register:
            raise ConfigError("inner product needs identical registers")
        return sum(self.terms[k].conjugate() * v for k, v in other.terms.items() if k in self.terms)

    def fidelity(self, other: "FockState") -> float:
        return abs(self.inner(other)) ** 2


@dataclass(frozen=True)
class FockDistribution:
    register: ModeRegister
    probs: Mapping[Occupation, float]

    def __post_init__(self):
        probs = {}
        for occ, p in self.probs.items():
            occ = _check_occupation(self.register, occ)
            probs[occ] = probs.get(occ, 0.0) + float(p)
        object.__setattr__(self, "probs", MappingProxyType({k: probs[k] for k in sorted(probs)}))

    def total(self) -> float:
        return math.fsum(self.probs.values())

    def get(self, occ, default: float = 0.0) -> float:
        return self.probs.get(tuple(occ), default)

    def __len__(self) -> int:
        return len(self.probs)


# -- matrices ---------------------------------------------------------------


def unitarity_residual(U: np.ndarray) -> float:
    U = np.asarray(U, dtype=complex)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[1]))))


def is_unitary(U: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    U = np.asarray(U)
    return U.ndim == 2 and U.shape[0] == U.shape[1] and unitarity_residual(U) < tol


def check_passive(M: np.ndarray) -> np.ndarray:
    """Validate a mode map as physically passive and return it as complex.

    Raises :class:`PhysicsError` if the largest singular value exceeds
    ``1 + PASSIVITY_TOL``.
    """
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ConfigError(f"transfer matrix must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ConfigError("transfer matrix has non-finite entries")
    smax = np.linalg.norm(M, 2) if M.size else 0.0
    if smax > 1 + PASSIVITY_TOL:
        raise PhysicsError(f"largest singular value {smax:.12g} > 1: element has gain")
    return M


def _psd_sqrt(H: np.ndarray) -> np.ndarray:
    H = (H + H.conj().T) / 2
    w, V = np.linalg.eigh(H)
    w = np.clip(w, 0.0, None)
    return (V * np.sqrt(w)) @ V.conj().T


def dilate(M: np.ndarray) -> np.ndarray:
    """Embed a passive ``m x m`` map into a ``2m x 2m`` unitary.

    Uses ``U = [[M, (I - M M^dag)^(1/2)], [(I - M^dag M)^(1/2), -M^dag]]``.
    The top-left block of the result is ``M`` itself unless singular values
    in ``(1, 1 + 1e-10]`` had to be clamped.
    """
    M = check_passive(M)
    m = M.shape[0]
    W, s, Vh = np.linalg.svd(M)
    if np.any(s > 1):
        M = (W * np.minimum(s, 1.0)) @ Vh
    eye = np.eye(m)
    U = np.block(
        [
            [M, _psd_sqrt(eye - M @ M.conj().T)],
            [_psd_sqrt(eye - M.conj().T @ M), -M.conj().T],
        ]
    )
    return U


def dilated_ports(ports: Sequence[str]) -> tuple[str, ...]:
    """Port labels of a dilated map: the originals followed by loss ports."""
    return tuple(ports) + tuple(loss_port(k) for k in range(len(ports)))


def extend_internal(M: np.ndarray, ports: Sequence[str], register: ModeRegister) -> np.ndarray:
    """Lift a map over spatial ports to every mode of ``register``.

    Polarization and temporal labels are left untouched.  Modes whose port
    is not among ``ports`` are mapped by the identity.
    """
    M = np.asarray(M, dtype=complex)
    ports = tuple(ports)
    if M.shape != (len(ports), len(ports)):
        raise ConfigError(f"matrix shape {M.shape} does not match {len(ports)} ports")
    if len(set(ports)) != len(ports):
        raise ConfigError("ports must be distinct")
    present = set(register.ports)
    missing = [p for p in ports if p not in present]
    if missing:
        raise ConfigError(f"register has no modes for port(s) {missing}")
    pos = {p: i for i, p in enumerate(ports)}
    n = len(register)
    out = np.zeros((n, n), dtype=complex)
    for i, a in enumerate(register.modes):
        for j, b in enumerate(register.modes):
            if (a.pol, a.temporal) != (b.pol, b.temporal):
                continue
            if a.port in pos and b.port in pos:
                out[i, j] = M[pos[a.port], pos[b.port]]
            elif i == j:
                out[i, j] = 1.0
    return out


# -- evolution --------------------------------------------------------------


def permanent(A: np.ndarray) -> complex:
    """Permanent by direct expansion over permutations (fine for n <= 4)."""
    A = np.asarray(A)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ConfigError("permanent needs a square matrix")
    if n == 0:
        return 1.0 + 0j
    total = 0j
    for perm in permutations(range(n)):
        term = 1 + 0j
        for i, j in enumerate(perm):
            term *= A[i, j]
            if term == 0:
                break
        total += term
    return total


def _repeat(occ: Occupation) -> list[int]:
    return [i for i, n in enumerate(occ) for _ in range(n)]


def _fact_prod(occ: Occupation) -> int:
    return math.prod(math.factorial(n) for n in occ)


def evolve(state: FockState, U: np.ndarray, register: ModeRegister | None = None) -> FockState:
    """Propagate ``state`` through the unitary mode map ``U``.

    If ``register`` is given the state is first embedded into it (typically
    the input register plus loss ports) and ``U`` must act on that register.
    """
    if register is not None:
        state = state.embed(register)
    reg = state.register
    U = np.asarray(U, dtype=complex)
    if U.shape != (len(reg), len(reg)):
        raise ConfigError(f"matrix shape {U.shape} does not match register of {len(reg)} modes")
    if not is_unitary(U):
        raise PhysicsError(
            f"evolution needs a unitary map (residual {unitarity_residual(U):.3g}); dilate lossy elements first"
        )
    n = state.n_photons
    out: dict[Occupation, complex] = {}
    for occ_in, amp_in in state.terms.items():
        cols = _repeat(occ_in)
        reachable = [j for j in range(len(reg)) if np.any(np.abs(U[j, cols]) > 0)]
        norm_in = _fact_prod(occ_in)
        for rows in combinations_with_replacement(reachable, n):
            occ_out = [0] * len(reg)
            for j in rows:
                occ_out[j] += 1
            occ_out = tuple(occ_out)
            per = permanent(U[np.ix_(rows, cols)])
            if per == 0:
                continue
            amp = amp_in * per / math.sqrt(norm_in * _fact_prod(occ_out))
            out[occ_out] = out.get(occ_out, 0j) + amp
    return FockState(reg, out)


# -- statistics -------------------------------------------------------------


def distribution(state: FockState) -> FockDistribution:
    return FockDistribution(state.register, {k: abs(v) ** 2 for k, v in state.terms.items()})


def marginal(dist: FockDistribution, keep: Iterable) -> FockDistribution:
    """Sum out every mode not listed in ``keep`` (labels, register order kept)."""
    keep_set = {ModeLabel(*m) for m in keep}
    if not keep_set:
        raise ConfigError("marginal needs at least one mode to keep")
    for m in keep_set:
        dist.register.index(m)
    idx = [i for i, m in enumerate(dist.register.modes) if m in keep_set]
    sub = ModeRegister(tuple(dist.register.modes[i] for i in idx))
    probs: dict[Occupation, float] = {}
    for occ, p in dist.probs.items():
        key = tuple(occ[i] for i in idx)
        probs[key] = probs.get(key, 0.0) + p
    return FockDistribution(sub, probs)


def conditional(
    dist: FockDistribution, predicate: Callable[[Occupation], bool]
) -> tuple[float, FockDistribution]:
    """Post-select on ``predicate(occupation)``.

    Returns the mass of the accepted set and the renormalized distribution
    restricted to it; ``(0.0, empty)`` when nothing matches.
    """
    kept = {k: p for k, p in dist.probs.items() if predicate(k)}
    mass = math.fsum(kept.values())
    if mass <= 0:
        return 0.0, FockDistribution(dist.register, {})
    return mass, FockDistribution(dist.register, {k: p / mass for k, p in kept.items()})


def port_distribution(dist: FockDistribution, ports: Sequence[str | Sequence[str]]) -> dict[tuple[int, ...], float]:
    """Photon-number distribution aggregated per port (or group of ports).

    Each entry of ``ports`` is a port name or a sequence of port names whose
    counts are pooled, e.g. ``["L", "R", loss_ports]``.
    """
    groups = [dist.register.indices(p) for p in ports]
    out: dict[tuple[int, ...], float] = {}
    for occ, p in dist.probs.items():
        key = tuple(sum(occ[i] for i in g) for g in groups)
        out[key] = out.get(key, 0.0) + p
    return dict(sorted(out.items()))


def loss_distribution(dist: FockDistribution) -> dict[int, float]:
    """Distribution of the total number of photons in loss ports."""
    idx = dist.register.loss_indices()
    out: dict[int, float] = {}
    for occ, p in dist.probs.items():
        k = sum(occ[i] for i in idx)
        out[k] = out.get(k, 0.0) + p
    return dict(sorted(out.items()))


def coincidence_probability(dist: FockDistribution) -> float:
    """Probability of at least one photon in port L and at least one in port R."""
    reg = dist.register
    left, right = reg.indices("L"), reg.indices("R")
    if not left or not right:
        raise ConfigError("coincidence needs both L and R ports in the register")
    p = math.fsum(
        pr for occ, pr in dist.probs.items() if any(occ[i] for i in left) and any(occ[i] for i in right)
    )
    return min(max(p, 0.0), 1.0)
