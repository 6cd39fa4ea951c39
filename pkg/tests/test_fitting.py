import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antihom.errors import FitError
from antihom.experiment import ScanConfig, hom_scan
from antihom.fitting import fit_gaussian, fit_hom_curve, gaussian
from antihom.optics import Layer, LayerStack
from antihom.states import WavePacketSpec

SIN = LayerStack((Layer(100.0, 2.1),), 810.0)
POSITIONS = np.arange(-60.0, 61.0, 2.0)


@settings(max_examples=30, deadline=None)
@given(
    b=st.floats(0.5, 2.0),
    a=st.floats(-0.95, 1.5).filter(lambda x: abs(x) > 0.05),
    c=st.floats(-10.0, 10.0),
    w=st.floats(4.0, 15.0),
)
def test_gaussian_round_trip(b, a, c, w):
    z = np.linspace(-60, 60, 61)
    fit = fit_gaussian(z, gaussian(z, b, a, c, w))
    assert fit.success
    assert fit.baseline == pytest.approx(b, rel=1e-6)
    assert fit.amplitude == pytest.approx(a, rel=1e-6)
    assert fit.center == pytest.approx(c, rel=1e-6, abs=1e-6)
    assert fit.width == pytest.approx(w, rel=1e-6)


def test_noiseless_scan_width():
    fit = fit_hom_curve(hom_scan(ScanConfig(POSITIONS, 0.0, SIN)))
    sigma = WavePacketSpec().sigma_omega
    # g^2 = exp(-sigma^2 tau^2) with tau = 2 z / c
    assert fit.width == pytest.approx(299_792_458.0 / (2 * math.sqrt(2) * sigma) * 1e6, rel=1e-6)
    assert fit.extremum == pytest.approx((0.60351 - 0.39649) ** 2 / (0.60351**2 + 0.39649**2), abs=1e-4)


def test_flat_curve():
    z = np.linspace(-10, 10, 11)
    fit = fit_gaussian(z, np.full_like(z, 0.7))
    assert fit.flat and fit.amplitude == 0.0 and fit.baseline == pytest.approx(0.7)
    assert math.isnan(fit.width)


def test_too_few_points():
    with pytest.raises(FitError):
        fit_gaussian(np.arange(7.0), np.arange(7.0))
    with pytest.raises(FitError):
        fit_gaussian(np.arange(10.0), np.arange(10.0), sigma=np.zeros(10))


def test_noisy_fit_within_errors():
    exact = fit_hom_curve(hom_scan(ScanConfig(POSITIONS, 0.0, SIN))).extremum
    inside = 0
    for seed in range(20):
        fit = fit_hom_curve(hom_scan(ScanConfig(POSITIONS, 0.0, SIN, noise=True, rng_seed=seed)))
        assert fit.success and not fit.flat
        inside += abs(fit.extremum - exact) <= 3 * fit.extremum_stderr
    assert inside >= 18
