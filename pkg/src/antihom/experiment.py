"""Synthetic HOM / anti-HOM and polarization-correlation experiments."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import rng
from .errors import ConfigError, FitError, PhysicsError
from .fock import (
    POLARIZATIONS,
    SPATIAL_PORTS,
    FockDistribution,
    FockState,
    ModeRegister,
    coincidence_probability,
    dilate,
    dilated_ports,
    distribution,
    evolve,
    extend_internal,
    is_unitary,
)
from .optics import sample_matrix
from .states import (
    WavePacketSpec,
    analyzer_coincidence,
    apply_delay,
    bell_input,
    overlap_from_position,
    product_pair,
    reduce_phase,
)

BOSONIC = "bosonic"
FERMIONIC = "fermionic"

# noiseless points with g^2 below this are "no overlap"
BASELINE_G2 = 1e-4


def analytic_coincidence(
    t: complex, r: complex, symmetry: str, g: float, r_right: complex | None = None
) -> float:
    """Closed-form coincidence probability for a pure-symmetry pair.

    ``P = |t|^4 + |r_l r_r|^2 + s * 2 Re(t^2 conj(r_l r_r)) g^2`` with
    ``s = +1`` for a bosonic and ``-1`` for a fermionic spatial part.
    """
    if r_right is None:
        r_right = r
    t, r, r_right = complex(t), complex(r), complex(r_right)
    if abs(t) ** 2 + max(abs(r), abs(r_right)) ** 2 > 1 + 1e-10:
        raise PhysicsError("unphysical splitter: |t|^2 + |r|^2 > 1")
    if not 0.0 <= g <= 1.0:
        raise ConfigError(f"overlap must lie in [0, 1], got {g}")
    s = {BOSONIC: 1.0, FERMIONIC: -1.0}.get(symmetry)
    if s is None:
        raise ConfigError(f"symmetry must be {BOSONIC!r} or {FERMIONIC!r}")
    rr = r * r_right
    p = abs(t) ** 4 + abs(rr) ** 2 + s * 2 * (t * t * rr.conjugate()).real * g * g
    return min(max(p, 0.0), 1.0)


@dataclass(frozen=True)
class PairSetup:
    """A two-port sample lifted to the full pair register (with loss ports if lossy)."""

    matrix: np.ndarray
    register: ModeRegister
    unitary: np.ndarray
    lossy: bool

    @classmethod
    def from_sample(cls, sample, n_temporal: int = 2) -> "PairSetup":
        M = sample_matrix(sample)
        lossy = not is_unitary(M)
        if lossy:
            ports, U2 = dilated_ports(SPATIAL_PORTS), dilate(M)
        else:
            ports, U2 = SPATIAL_PORTS, M
        reg = ModeRegister.product(ports, POLARIZATIONS, tuple(range(n_temporal)))
        return cls(M, reg, extend_internal(U2, ports, reg), lossy)

    def propagate(self, state: FockState) -> FockState:
        return evolve(state, self.unitary, self.register)


def pair_output(phi: float, sample, g: float = 1.0) -> FockDistribution:
    """Output distribution of ``bell_input(phi)`` after a delay and the sample."""
    setup = PairSetup.from_sample(sample)
    return distribution(setup.propagate(apply_delay(bell_input(phi), g)))


def outcome_breakdown(dist: FockDistribution) -> dict[str, float]:
    """Split two-photon outcomes into coincidence / loss without coincidence / same port."""
    reg = dist.register
    out = {"coincidence": 0.0, "lost_no_coincidence": 0.0, "same_port": 0.0}
    for occ, p in dist.probs.items():
        nl, nr, lost = reg.count(occ, "L"), reg.count(occ, "R"), reg.lost(occ)
        if nl and nr:
            out["coincidence"] += p
        elif lost:
            out["lost_no_coincidence"] += p
        else:
            out["same_port"] += p
    return out


# -- scans ------------------------------------------------------------------


@dataclass(frozen=True)
class ScanConfig:
    positions: Sequence[float]
    phi: float = 0.0
    sample: Any = None
    packet: WavePacketSpec = WavePacketSpec()
    reference_counts: float = 750.0
    rng_seed: int = 0
    noise: bool = False
    mixing: float = 0.0
    workers: int | None = None

    def __post_init__(self):
        pos = tuple(float(x) for x in self.positions)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "phi", reduce_phase(self.phi))
        if not pos:
            raise ConfigError("scan needs at least one position")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ConfigError("positions must be strictly increasing")
        if self.sample is None:
            raise ConfigError("scan needs a sample")
        if self.noise and not self.reference_counts > 0:
            raise ConfigError("reference_counts must be > 0 when noise is on")
        if not 0.0 <= self.mixing <= 1.0:
            raise ConfigError("mixing must lie in [0, 1]")
        if not 0 <= int(self.rng_seed) < 1 << 64:
            raise ConfigError("rng_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class ScanResult:
    positions: tuple[float, ...]
    overlaps: tuple[float, ...]
    probability: tuple[float, ...]
    normalized: tuple[float, ...]
    baseline_probability: float
    reference_counts: float
    counts: tuple[int, ...] | None = None
    shot_error: tuple[float, ...] | None = None
    metadata: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.positions)


def _max_workers(requested: int | None) -> int:
    cap = os.environ.get("ANTIHOM_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"ANTIHOM_THREADS must be an integer, got {cap!r}") from None
    return max(1, n)


def synthesize_counts(
    prob: float, baseline_prob: float, reference_counts: float, seed: int, index: int
) -> int:
    """Poisson coincidence count with mean ``reference_counts * prob / baseline_prob``."""
    if not baseline_prob > 0:
        raise PhysicsError("baseline probability must be > 0")
    mean = reference_counts * prob / baseline_prob
    if mean <= 0:
        return 0
    return int(rng.point_generator(seed, index).poisson(mean))


def hom_scan(config: ScanConfig) -> ScanResult:
    """Coincidence probability versus sample position through the full engine."""
    setup = PairSetup.from_sample(config.sample)
    bell = bell_input(config.phi)
    prod = product_pair() if config.mixing > 0 else None

    def point(g: float) -> float:
        p = coincidence_probability(distribution(setup.propagate(apply_delay(bell, g))))
        if prod is not None:
            q = coincidence_probability(distribution(setup.propagate(apply_delay(prod, g))))
            p = (1 - config.mixing) * p + config.mixing * q
        return p

    overlaps = [overlap_from_position(z, config.packet) for z in config.positions]
    with ThreadPoolExecutor(max_workers=_max_workers(config.workers)) as pool:
        probs = list(pool.map(point, overlaps))
    baseline = point(0.0)
    if baseline <= 0:
        raise PhysicsError("sample gives zero coincidence probability without overlap")
    normalized = [p / baseline for p in probs]
    counts = errors = None
    if config.noise:
        counts = tuple(
            synthesize_counts(p, baseline, config.reference_counts, config.rng_seed, i)
            for i, p in enumerate(probs)
        )
        errors = tuple(math.sqrt(c) for c in counts)
    return ScanResult(
        positions=config.positions,
        overlaps=tuple(overlaps),
        probability=tuple(probs),
        normalized=tuple(normalized),
        baseline_probability=baseline,
        reference_counts=config.reference_counts,
        counts=counts,
        shot_error=errors,
        metadata={"rng": rng.ALGORITHM, "seed": int(config.rng_seed), "noise": config.noise},
    )


# -- polarization correlations ---------------------------------------------


def polarization_scan(
    phi: float,
    theta2: float,
    theta1_grid: Sequence[float],
    mixing: float = 0.0,
    noise: str = "white",
) -> np.ndarray:
    return np.array([analyzer_coincidence(phi, t1, theta2, mixing, noise) for t1 in theta1_grid])


@dataclass(frozen=True)
class SinusoidFit:
    """``y = offset + amplitude * cos(2 (theta - phase))``."""

    offset: float
    amplitude: float
    phase: float

    @property
    def visibility(self) -> float:
        return self.amplitude / self.offset

    def __call__(self, theta):
        return self.offset + self.amplitude * np.cos(2 * (np.asarray(theta) - self.phase))


def fit_sinusoid(theta: Sequence[float], y: Sequence[float]) -> SinusoidFit:
    """Least-squares fringe fit, linear in ``(offset, cos 2theta, sin 2theta)``."""
    theta = np.asarray(theta, dtype=float)
    y = np.asarray(y, dtype=float)
    if theta.shape != y.shape or theta.size < 3:
        raise FitError("need at least three (theta, y) samples")
    A = np.column_stack([np.ones_like(theta), np.cos(2 * theta), np.sin(2 * theta)])
    coef, _, rank, _ = np.linalg.lstsq(A, y, rcond=None)
    if rank < 3:
        raise FitError("angle grid does not resolve a full fringe")
    c0, cc, cs = coef
    if not c0 > 0:
        raise FitError(f"fringe fit gave non-positive offset {c0:.3g}")
    return SinusoidFit(float(c0), float(math.hypot(cc, cs)), float(math.atan2(cs, cc) / 2))


def visibility(theta1_grid: Sequence[float], curve: Sequence[float]) -> float:
    return fit_sinusoid(theta1_grid, curve).visibility


def bell_parameter(v1: float, v2: float) -> float:
    """``S = sqrt(2) (V1 + V2)``."""
    for v in (v1, v2):
        if not 0.0 <= v <= 1.0 + 1e-12:
            raise ConfigError(f"visibility {v} outside [0, 1]")
    return math.sqrt(2) * (v1 + v2)


@dataclass(frozen=True)
class BellTestResult:
    V1: float
    V2: float
    S: float

    @classmethod
    def from_visibilities(cls, v1: float, v2: float) -> "BellTestResult":
        return cls(v1, v2, bell_parameter(v1, v2))

    @property
    def nonclassical(self) -> bool:
        return self.S > 2


DEFAULT_THETA_GRID = tuple(np.linspace(0, math.pi, 37))


def bell_test(
    phi: float,
    mixing: float = 0.0,
    noise: str = "white",
    theta1_grid: Sequence[float] = DEFAULT_THETA_GRID,
) -> BellTestResult:
    """Fringe visibilities in the H/V (theta2 = 0) and D/A (theta2 = pi/4) bases."""
    v1 = visibility(theta1_grid, polarization_scan(phi, 0.0, theta1_grid, mixing, noise))
    v2 = visibility(theta1_grid, polarization_scan(phi, math.pi / 4, theta1_grid, mixing, noise))
    clip = lambda v: min(max(v, 0.0), 1.0)  # noqa: E731
    return BellTestResult.from_visibilities(clip(v1), clip(v2))


# -- classical bounds -------------------------------------------------------

_CLASSICAL = {"dip": 0.5, "peak": 1.5}


def classical_limit(kind: str) -> float:
    """Normalized coincidence level reachable with classical light."""
    try:
        return _CLASSICAL[kind]
    except KeyError:
        raise ConfigError(f"kind must be 'dip' or 'peak', got {kind!r}") from None


def classify_extremum(level: float, kind: str) -> str:
    limit = classical_limit(kind)
    beyond = level < limit if kind == "dip" else level > limit
    return "quantum" if beyond else "classical"
