"""Two-port sample models: ideal beamsplitters and real thin-film stacks.

Port and phase convention (used by every module)
------------------------------------------------
A two-port sample is described by the scattering matrix::

    S = [[t,       r_right],
         [r_left,  t      ]]

acting on column vectors ``(a_L, a_R)`` of incoming amplitudes.  ``a_L`` is
the wave incident on the left face and ``a_R`` the wave incident on the
right face.  Output component 0 is the wave travelling in the same direction
as ``a_L`` (it leaves through the right face): the transmitted part of
``a_L`` plus the reflected part of ``a_R``.  For a photon this is the
substitution ``|L> -> t|L> + r_left|R>``, ``|R> -> r_right|L> + t|R>``.

Amplitudes are flux-normalized, so ``|t|^2`` is the transmitted power
fraction even when the two ambient media differ and ``t`` is the same from
both sides.  Reference planes sit on the outer faces of the stack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import ConfigError, PhysicsError
from .fock import check_passive

_SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class BeamsplitterSpec:
    t: complex
    r: complex

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "r", complex(self.r))
        if abs(self.t) ** 2 + abs(self.r) ** 2 > 1 + 1e-10:
            raise PhysicsError(f"|t|^2 + |r|^2 = {abs(self.t) ** 2 + abs(self.r) ** 2:.12g} > 1")

    @property
    def lossless(self) -> bool:
        if abs(abs(self.t) ** 2 + abs(self.r) ** 2 - 1) > 1e-10:
            return False
        if self.t == 0 or self.r == 0:
            return True
        dphi = np.angle(self.r / self.t)
        return abs(abs(dphi) - math.pi / 2) < 1e-9

    def matrix(self) -> np.ndarray:
        return scattering_matrix(self.t, self.r, self.r)


def scattering_matrix(t: complex, r_left: complex, r_right: complex | None = None) -> np.ndarray:
    if r_right is None:
        r_right = r_left
    return np.array([[t, r_right], [r_left, t]], dtype=complex)


def lossless_bs(t_mag: float, sign: int = 1) -> np.ndarray:
    """Lossless splitter with real ``t`` and ``r = sign * i * sqrt(1 - t^2)``."""
    if not 0.0 <= t_mag <= 1.0:
        raise ConfigError(f"t_mag must lie in [0, 1], got {t_mag}")
    if sign not in (1, -1):
        raise ConfigError("sign must be +1 or -1")
    r = sign * 1j * math.sqrt(max(0.0, 1.0 - t_mag**2))
    return scattering_matrix(t_mag, r)


def lossy_bs(sign: int = 1) -> np.ndarray:
    """The ideal lossy splitter ``t = +-r = 1/2``."""
    if sign not in (1, -1):
        raise ConfigError("sign must be +1 or -1")
    return scattering_matrix(0.5, 0.5 * sign)


@dataclass(frozen=True)
class QswChannel:
    """Survival amplitudes of the cosine and sine standing waves."""

    s_c: complex
    s_s: complex

    def __post_init__(self):
        for name in ("s_c", "s_s"):
            v = complex(getattr(self, name))
            if abs(v) > 1 + 1e-12:
                raise PhysicsError(f"|{name}| = {abs(v):.12g} exceeds 1")
            object.__setattr__(self, name, v)


# (L, R) -> (C, S)
QSW_BASIS = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT_HALF


def qsw_composite(channel: QswChannel | tuple[complex, complex]) -> np.ndarray:
    """Travelling-wave map of a sample that acts diagonally on standing waves.

    Changes basis to (cosine, sine) standing waves, multiplies each by its
    survival amplitude and changes back.
    """
    if not isinstance(channel, QswChannel):
        channel = QswChannel(*channel)
    B = QSW_BASIS
    return B.conj().T @ np.diag([channel.s_c, channel.s_s]) @ B


# -- thin films -------------------------------------------------------------


@dataclass(frozen=True)
class Layer:
    thickness_nm: float
    index: complex
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "index", complex(self.index))
        if not self.thickness_nm > 0:
            raise ConfigError(f"layer thickness must be > 0, got {self.thickness_nm}")
        if self.index.imag < 0:
            raise PhysicsError(f"negative extinction (gain) in layer {self.name or self.index}")


@dataclass(frozen=True)
class LayerStack:
    layers: tuple[Layer, ...]
    wavelength_nm: float = 810.0
    ambient_in: float = 1.0
    ambient_out: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if not self.wavelength_nm > 0:
            raise ConfigError("wavelength must be > 0")
        if not (self.ambient_in > 0 and self.ambient_out > 0):
            raise ConfigError("ambient indices must be > 0")

    def reversed(self) -> "LayerStack":
        return replace(
            self, layers=self.layers[::-1], ambient_in=self.ambient_out, ambient_out=self.ambient_in
        )

    @property
    def total_thickness_nm(self) -> float:
        return sum(layer.thickness_nm for layer in self.layers)


def _one_side(stack: LayerStack) -> tuple[complex, complex]:
    # characteristic-matrix method, exp(-i w t) convention, Im(n) >= 0 absorbs
    k0 = 2 * math.pi / stack.wavelength_nm
    M = np.eye(2, dtype=complex)
    for layer in stack.layers:
        n = layer.index
        delta = k0 * n * layer.thickness_nm
        c, s = np.cos(delta), np.sin(delta)
        M = M @ np.array([[c, -1j * s / n], [-1j * n * s, c]])
    n0, n1 = stack.ambient_in, stack.ambient_out
    B, C = M @ np.array([1.0, n1])
    denom = n0 * B + C
    r = (n0 * B - C) / denom
    t = 2 * n0 / denom * math.sqrt(n1 / n0)
    return complex(t), complex(r)


@dataclass(frozen=True)
class StackResponse:
    t: complex
    r_left: complex
    r_right: complex

    def __iter__(self):
        return iter((self.t, self.r_left, self.r_right))

    @property
    def T(self) -> float:
        return abs(self.t) ** 2

    @property
    def R_left(self) -> float:
        return abs(self.r_left) ** 2

    @property
    def R_right(self) -> float:
        return abs(self.r_right) ** 2

    @property
    def A_left(self) -> float:
        return 1.0 - self.T - self.R_left

    @property
    def A_right(self) -> float:
        return 1.0 - self.T - self.R_right

    def matrix(self) -> np.ndarray:
        return scattering_matrix(self.t, self.r_left, self.r_right)


def stack_response(stack: LayerStack) -> StackResponse:
    """Amplitude coefficients of a stack at normal incidence."""
    t, r_left = _one_side(stack)
    _, r_right = _one_side(stack.reversed())
    return StackResponse(t, r_left, r_right)


def sample_matrix(sample) -> np.ndarray:
    """2x2 scattering matrix for a stack, a spec or an explicit matrix."""
    if isinstance(sample, LayerStack):
        M = stack_response(sample).matrix()
    elif isinstance(sample, (StackResponse, BeamsplitterSpec)):
        M = sample.matrix()
    elif isinstance(sample, QswChannel):
        M = qsw_composite(sample)
    else:
        M = np.asarray(sample, dtype=complex)
    if M.shape != (2, 2):
        raise ConfigError(f"a two-port sample needs a 2x2 matrix, got {M.shape}")
    return check_passive(M)


def coherent_response(sample, a_l: complex, a_r: complex) -> tuple[complex, complex, float]:
    """Classical two-beam illumination of a sample.

    Returns the two outgoing amplitudes (see the module docstring for the
    port convention) and the absorbed power fraction.
    """
    if abs(abs(a_l) ** 2 + abs(a_r) ** 2 - 1) > 1e-9:
        raise ConfigError("input amplitudes must satisfy |a_L|^2 + |a_R|^2 = 1")
    S = sample_matrix(sample)
    out_l, out_r = S @ np.array([a_l, a_r], dtype=complex)
    absorbed = 1.0 - abs(out_l) ** 2 - abs(out_r) ** 2
    return complex(out_l), complex(out_r), float(absorbed)


# -- design -----------------------------------------------------------------


@dataclass(frozen=True)
class Param:
    """Named free parameter inside a :class:`StackTemplate`."""

    name: str


@dataclass(frozen=True)
class LayerTemplate:
    thickness_nm: float | Param
    n: float | Param
    k: float | Param = 0.0
    name: str = ""

    def build(self, values: Mapping[str, float]) -> Layer:
        def get(v):
            return values[v.name] if isinstance(v, Param) else v

        return Layer(get(self.thickness_nm), complex(get(self.n), get(self.k)), self.name)

    def params(self) -> list[str]:
        return [v.name for v in (self.thickness_nm, self.n, self.k) if isinstance(v, Param)]


@dataclass(frozen=True)
class StackTemplate:
    layers: tuple[LayerTemplate, ...]
    bounds: Mapping[str, tuple[float, float]]
    wavelength_nm: float = 810.0
    ambient_in: float = 1.0
    ambient_out: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "bounds", dict(self.bounds))
        used = self.param_names
        missing = [p for p in used if p not in self.bounds]
        if missing:
            raise ConfigError(f"no bounds for parameter(s) {missing}")
        for name, (lo, hi) in self.bounds.items():
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise ConfigError(f"bounds for {name} must be finite")
            if lo > hi:
                raise ConfigError(f"inverted bounds for {name}: ({lo}, {hi})")

    @property
    def param_names(self) -> list[str]:
        return list(dict.fromkeys(p for layer in self.layers for p in layer.params()))

    def build(self, values: Mapping[str, float] | Sequence[float]) -> LayerStack:
        if not isinstance(values, Mapping):
            values = dict(zip(self.param_names, values))
        return LayerStack(
            tuple(layer.build(values) for layer in self.layers),
            self.wavelength_nm,
            self.ambient_in,
            self.ambient_out,
        )


@dataclass(frozen=True)
class DesignResult:
    stack: LayerStack
    params: dict[str, float]
    residual: float
    global_phase: float
    response: StackResponse


def design_residual(resp: StackResponse, target: BeamsplitterSpec) -> tuple[float, float]:
    """Squared distance to the target, minimized over a common phase factor.

    A common phase on ``t, r_left, r_right`` is equivalent to moving both
    reference planes and does not change any photon statistics.  Returns
    ``(residual, phase)`` with the optimal phase applied as ``exp(i*phase)``.
    For asymmetric stacks the reflection error is averaged over both sides.
    """
    a = np.array([resp.t, resp.r_left, resp.r_right])
    b = np.array([target.t, target.r, target.r])
    w = np.array([1.0, 0.5, 0.5])
    overlap = np.sum(w * a.conj() * b)
    res = float(np.sum(w * (np.abs(a) ** 2 + np.abs(b) ** 2)) - 2 * abs(overlap))
    phase = float(np.angle(overlap)) if overlap != 0 else 0.0
    return max(res, 0.0), phase


def _start_points(bounds: np.ndarray, n_starts: int) -> np.ndarray:
    lo, hi = bounds[:, 0], bounds[:, 1]
    center = (lo + hi) / 2
    halton = qmc.Halton(d=len(lo), scramble=False).random(n_starts)[1:]
    return np.vstack([center, lo + halton * (hi - lo)])


def design_stack(
    template: StackTemplate,
    target: BeamsplitterSpec,
    n_starts: int = 5,
) -> DesignResult:
    """Fit free template parameters so the stack responds like ``target``.

    Bounded Nelder-Mead from ``n_starts`` deterministic start points (the
    box center plus an unscrambled Halton sequence).  The lowest residual
    wins; ties go to the earlier start.
    """
    names = template.param_names
    if not names:
        stack = template.build({})
        resp = stack_response(stack)
        res, phase = design_residual(resp, target)
        return DesignResult(stack, {}, res, phase, resp)
    if len(names) > 4:
        raise ConfigError(f"at most 4 free parameters supported, got {len(names)}")
    bounds = np.array([template.bounds[n] for n in names], dtype=float)

    def objective(x):
        return design_residual(stack_response(template.build(x)), target)[0]

    best = None
    for x0 in _start_points(bounds, n_starts):
        sol = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            bounds=bounds,
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000},
        )
        if best is None or sol.fun < best.fun:
            best = sol
    x = np.clip(best.x, bounds[:, 0], bounds[:, 1])
    stack = template.build(x)
    resp = stack_response(stack)
    res, phase = design_residual(resp, target)
    return DesignResult(stack, dict(zip(names, map(float, x))), res, phase, resp)
