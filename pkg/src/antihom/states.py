"""Entangled two-photon inputs, polarization optics and temporal overlap.

Inputs live on the register ``{L, R} x {H, V} x temporal``: port L holds the
photon travelling in the left direction, port R the counter-propagating one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ConfigError
from .fock import POLARIZATIONS, SPATIAL_PORTS, FockState, ModeLabel, ModeRegister, evolve

SPEED_OF_LIGHT = 299_792_458.0  # m/s
TWO_PI = 2 * math.pi


def reduce_phase(phi: float) -> float:
    """Map a phase to ``[0, 2*pi)``."""
    out = math.fmod(float(phi), TWO_PI)
    if out < 0:
        out += TWO_PI
    return 0.0 if out >= TWO_PI else out


def spatial_register(n_temporal: int = 1) -> ModeRegister:
    return ModeRegister.product(SPATIAL_PORTS, POLARIZATIONS, tuple(range(n_temporal)))


def bell_input(phi: float, n_temporal: int = 1) -> FockState:
    """``(a_LH^dag a_RV^dag + e^{i phi} a_LV^dag a_RH^dag)|0> / sqrt(2)``.

    ``phi = 0`` is the symmetric Bell state with a bosonic spatial part,
    ``phi = pi`` the singlet with a fermionic spatial part.
    """
    reg = spatial_register(n_temporal)
    phase = np.exp(1j * reduce_phase(phi))
    return FockState.from_creation(
        reg,
        [
            (1.0, [("L", "H", 0), ("R", "V", 0)]),
            (phase, [("L", "V", 0), ("R", "H", 0)]),
        ],
    )


def product_pair(n_temporal: int = 1) -> FockState:
    """Unentangled pair ``|H>_L |V>_R``."""
    return FockState.from_creation(spatial_register(n_temporal), [(1.0, [("L", "H", 0), ("R", "V", 0)])])


class SymmetryWeights(NamedTuple):
    bosonic: float
    fermionic: float
    remainder: float


def _pair_coefficients(state: FockState):
    """Coefficients ``c[a, b]`` of ``a_{L,a}^dag a_{R,b}^dag|0>`` plus leftover mass.

    ``a`` and ``b`` range over the internal (polarization, temporal) labels
    shared by both ports.
    """
    reg = state.register
    internal = sorted({(m.pol, m.temporal) for m in reg if m.port in SPATIAL_PORTS})
    pos = {lab: i for i, lab in enumerate(internal)}
    c = np.zeros((len(internal), len(internal)), dtype=complex)
    rest = 0.0
    for occ, amp in state.terms.items():
        lefts = [reg.modes[i] for i, n in enumerate(occ) for _ in range(n) if reg.modes[i].port == "L"]
        rights = [reg.modes[i] for i, n in enumerate(occ) for _ in range(n) if reg.modes[i].port == "R"]
        if sum(occ) == 2 and len(lefts) == 1 and len(rights) == 1:
            a, b = lefts[0], rights[0]
            c[pos[(a.pol, a.temporal)], pos[(b.pol, b.temporal)]] += amp
        else:
            rest += abs(amp) ** 2
    return c, rest


def symmetry_weights(state: FockState) -> SymmetryWeights:
    """Weights of the bosonic and fermionic spatial sectors.

    A one-photon-per-port pair ``sum c[a,b] a_{L,a}^dag a_{R,b}^dag`` has a
    bosonic spatial part when ``c`` is symmetric in the internal labels and a
    fermionic one when it is antisymmetric.  Mass outside the
    one-photon-per-port subspace is returned as ``remainder``.
    """
    c, rest = _pair_coefficients(state)
    sym = (c + c.T) / 2
    anti = (c - c.T) / 2
    total = state.norm() ** 2
    return SymmetryWeights(
        float(np.sum(np.abs(sym) ** 2)) / total,
        float(np.sum(np.abs(anti) ** 2)) / total,
        rest / total,
    )


# -- polarization optics ----------------------------------------------------


def _rot(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def waveplate(retardance: float, angle: float) -> np.ndarray:
    """Jones matrix on ``(H, V)`` of a retarder with its fast axis at ``angle``."""
    return _rot(angle) @ np.diag([1.0, np.exp(1j * retardance)]) @ _rot(-angle)


def quarter_wave(angle: float) -> np.ndarray:
    return waveplate(math.pi / 2, angle)


def half_wave(angle: float) -> np.ndarray:
    return waveplate(math.pi, angle)


def qhq(hwp_angle: float) -> np.ndarray:
    """Quarter-half-quarter stack, quarter-wave fast axes fixed at 45 degrees."""
    q = quarter_wave(math.pi / 4)
    return q @ half_wave(hwp_angle) @ q


def hwp_angle_for_phase(phi: float) -> float:
    """Half-wave-plate angle giving a relative H/V phase ``phi``.

    The stack's retardance is four times the plate's rotation away from 45
    degrees (twice the rotation of the polarization it produces).
    """
    return math.pi / 4 + phi / 4


def qhq_phase(phi: float) -> np.ndarray:
    """Jones matrix equal to ``diag(1, e^{i phi})`` up to a global phase."""
    return qhq(hwp_angle_for_phase(phi))


def apply_jones(state: FockState, jones: np.ndarray, port: str) -> FockState:
    """Act with a polarization optic on every mode of one port."""
    reg = state.register
    U = np.eye(len(reg), dtype=complex)
    for i, a in enumerate(reg):
        for j, b in enumerate(reg):
            if a.port == b.port == port and a.temporal == b.temporal:
                U[i, j] = jones[POLARIZATIONS.index(a.pol), POLARIZATIONS.index(b.pol)]
    return evolve(state, U)


def analyzer_vector(theta: float) -> np.ndarray:
    return np.array([math.cos(theta), math.sin(theta)])


def analyzer_coincidence(
    phi: float, theta1: float, theta2: float, mixing: float = 0.0, noise: str = "white"
) -> float:
    """Joint transmission probability through linear analyzers.

    ``theta1`` is the analyzer on port R, ``theta2`` on port L.  With
    ``mixing > 0`` the Bell state is mixed with weight ``mixing`` of
    ``noise``: ``"white"`` (fully unpolarized pair) or ``"product"`` (equal
    mixture of ``|H>_L|V>_R`` and ``|V>_L|H>_R``).
    """
    if not 0.0 <= mixing <= 1.0:
        raise ConfigError(f"mixing must lie in [0, 1], got {mixing}")
    c, _ = _pair_coefficients(bell_input(phi))
    pl, pr = analyzer_vector(theta2), analyzer_vector(theta1)
    pure = abs(pl @ c @ pr) ** 2
    if mixing == 0.0:
        return float(pure)
    if noise == "white":
        background = 0.25
    elif noise == "product":
        ch2, sh2 = math.cos(theta2) ** 2, math.sin(theta2) ** 2
        ch1, sh1 = math.cos(theta1) ** 2, math.sin(theta1) ** 2
        background = 0.5 * (ch2 * sh1 + sh2 * ch1)
    else:
        raise ConfigError(f"unknown noise model {noise!r}")
    return float((1 - mixing) * pure + mixing * background)


# -- temporal distinguishability -------------------------------------------


def apply_delay(state: FockState, g: float) -> FockState:
    """Put the port-R photon into ``g|t0> + sqrt(1-g^2)|t1>``.

    The register is widened to two temporal labels when needed.
    """
    if not 0.0 <= g <= 1.0:
        raise ConfigError(f"overlap must lie in [0, 1], got {g}")
    reg = state.register
    if len(reg.temporals) < 2:
        reg = reg.union(ModeLabel(m.port, m.pol, 1) for m in reg)
        state = state.embed(reg)
    if g == 1.0:
        return state
    s = math.sqrt(1.0 - g * g)
    U = np.eye(len(reg), dtype=complex)
    for pol in POLARIZATIONS:
        key0, key1 = ("R", pol, 0), ("R", pol, 1)
        if key0 in reg and key1 in reg:
            i0, i1 = reg.index(key0), reg.index(key1)
            U[i0, i0], U[i1, i0] = g, s
            U[i0, i1], U[i1, i1] = -s, g
    return evolve(state, U)


@dataclass(frozen=True)
class WavePacketSpec:
    """Filtered single-photon spectrum, Gaussian with the given FWHM."""

    center_wavelength_nm: float = 810.0
    filter_fwhm_nm: float = 10.0

    def __post_init__(self):
        if not (self.center_wavelength_nm > 0 and self.filter_fwhm_nm > 0):
            raise ConfigError("wavelength and bandwidth must be positive")
        if self.filter_fwhm_nm >= self.center_wavelength_nm:
            raise ConfigError("bandwidth must be much smaller than the center wavelength")

    @property
    def fwhm_omega(self) -> float:
        lam = self.center_wavelength_nm * 1e-9
        return TWO_PI * SPEED_OF_LIGHT * self.filter_fwhm_nm * 1e-9 / lam**2

    @property
    def sigma_omega(self) -> float:
        """Angular-frequency standard deviation in rad/s."""
        return self.fwhm_omega / (2 * math.sqrt(2 * math.log(2)))


def delay_from_position(dz_um: float) -> float:
    """Arrival-time difference (s) for a sample displaced by ``dz_um``.

    Moving the sample lengthens one arm and shortens the other.
    """
    return 2 * dz_um * 1e-6 / SPEED_OF_LIGHT


def overlap_from_position(dz_um: float, packet: WavePacketSpec = WavePacketSpec()) -> float:
    tau = delay_from_position(dz_um)
    return math.exp(-((packet.sigma_omega * tau) ** 2) / 2)


def position_for_overlap(g: float, packet: WavePacketSpec = WavePacketSpec()) -> float:
    """Non-negative displacement (um) at which the overlap equals ``g``."""
    if not 0.0 < g <= 1.0:
        raise ConfigError(f"overlap must lie in (0, 1], got {g}")
    tau = math.sqrt(-2 * math.log(g)) / packet.sigma_omega
    return SPEED_OF_LIGHT * tau / 2 * 1e6
