"""Gaussian fits of HOM dips and peaks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import least_squares

from .errors import FitError

_RESTART_SCALES = ((1.0, 0.0), (0.5, 0.0), (2.0, 0.0), (1.0, 0.5), (1.0, -0.5))


def gaussian(z, baseline, amplitude, center, width):
    z = np.asarray(z, dtype=float)
    return baseline + amplitude * np.exp(-((z - center) ** 2) / (2 * width**2))


@dataclass(frozen=True)
class HomFit:
    """Fitted ``baseline + amplitude * exp(-(z - center)^2 / (2 width^2))``.

    ``width`` and ``center`` are NaN for a featureless curve.  ``success`` is
    False when no restart converged; the parameters are then NaN.
    """

    baseline: float
    amplitude: float
    center: float
    width: float
    stderr: tuple[float, float, float, float]
    chi2: float
    extremum_stderr: float = float("nan")
    success: bool = True
    flat: bool = False

    @property
    def extremum(self) -> float:
        """Level at the feature center (dip floor or peak top)."""
        return self.baseline + self.amplitude


FAILED = HomFit(*(float("nan"),) * 4, stderr=(float("nan"),) * 4, chi2=float("inf"), success=False)


def _initial_guess(z, y):
    b0 = 0.5 * (y[0] + y[-1])
    k = int(np.argmax(np.abs(y - b0)))
    a0 = y[k] - b0
    above = np.abs(y - b0) >= abs(a0) / 2
    span = np.ptp(z[above]) if above.sum() > 1 else 0.0
    w0 = span / (2 * math.sqrt(2 * math.log(2))) if span > 0 else np.ptp(z) / 10
    return np.array([b0, a0, z[k], max(w0, np.min(np.diff(z)))])


def fit_gaussian(
    z: Sequence[float], y: Sequence[float], sigma: Sequence[float] | None = None
) -> HomFit:
    """Levenberg-Marquardt Gaussian fit with a handful of deterministic restarts.

    With ``sigma`` the residuals are weighted and the covariance is
    absolute; without it the covariance is scaled by the reduced chi^2.
    """
    z = np.asarray(z, dtype=float)
    y = np.asarray(y, dtype=float)
    if z.shape != y.shape or z.size < 8:
        raise FitError("need at least 8 points spanning the feature")
    if sigma is None:
        w = np.ones_like(y)
    else:
        sigma = np.asarray(sigma, dtype=float)
        if sigma.shape != y.shape or not np.all(np.isfinite(sigma)) or np.any(sigma <= 0):
            raise FitError("sigma must be finite and positive")
        w = 1.0 / sigma

    scale = max(1.0, float(np.max(np.abs(y))))
    if np.ptp(y) <= 1e-12 * scale:
        base = float(np.mean(y))
        return HomFit(base, 0.0, float("nan"), float("nan"), (0.0, 0.0, float("nan"), float("nan")), 0.0, flat=True)

    p0 = _initial_guess(z, y)

    def resid(p):
        return (gaussian(z, *p) - y) * w

    best = None
    for wscale, shift in _RESTART_SCALES:
        guess = p0.copy()
        guess[3] *= wscale
        guess[2] += shift * p0[3]
        try:
            sol = least_squares(resid, guess, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=20000)
        except (ValueError, np.linalg.LinAlgError):
            continue
        if sol.status <= 0 or not np.all(np.isfinite(sol.x)):
            continue
        chi2 = float(np.sum(sol.fun**2))
        if best is None or chi2 < best[1]:
            best = (sol, chi2)
    if best is None:
        return FAILED
    sol, chi2 = best
    b, a, c, wd = sol.x
    J = sol.jac
    try:
        cov = np.linalg.inv(J.T @ J)
    except np.linalg.LinAlgError:
        cov = np.full((4, 4), np.nan)
    if sigma is None:
        dof = max(1, z.size - 4)
        cov = cov * chi2 / dof
    se = np.sqrt(np.abs(np.diag(cov)))
    ext_se = math.sqrt(abs(cov[0, 0] + cov[1, 1] + 2 * cov[0, 1]))
    return HomFit(float(b), float(a), float(c), float(abs(wd)), tuple(map(float, se)), chi2, ext_se)


def fit_hom_curve(result) -> HomFit:
    """Fit a :class:`~antihom.experiment.ScanResult` in normalized units.

    Noisy results are fitted as ``counts / reference_counts``, weighted by
    Poisson errors.  A second pass re-weights with the first-pass model
    (Pearson weights) to avoid the low-count bias of data-derived errors.
    """
    z = np.asarray(result.positions, dtype=float)
    if result.counts is None:
        return fit_gaussian(z, result.normalized)
    ref = float(result.reference_counts)
    counts = np.asarray(result.counts, dtype=float)
    y = counts / ref
    first = fit_gaussian(z, y, np.sqrt(np.maximum(counts, 1.0)) / ref)
    if not first.success or first.flat:
        return first
    model = np.maximum(gaussian(z, first.baseline, first.amplitude, first.center, first.width) * ref, 1.0)
    second = fit_gaussian(z, y, np.sqrt(model) / ref)
    return second if second.success else first
