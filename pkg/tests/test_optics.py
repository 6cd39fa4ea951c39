import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from antihom.errors import ConfigError, PhysicsError
from antihom.experiment import pair_output
from antihom.fock import coincidence_probability, loss_distribution
from antihom.optics import (
    BeamsplitterSpec,
    Layer,
    LayerStack,
    LayerTemplate,
    Param,
    QswChannel,
    StackTemplate,
    coherent_response,
    design_stack,
    lossless_bs,
    lossy_bs,
    qsw_composite,
    stack_response,
)

from oracles import fresnel_stack

# chromium index used for design tests; any metal-like value works
CR = complex(3.6, 4.3)
HALF = math.sqrt(0.5)


def sin_film(d=100.0):
    return LayerStack((Layer(d, 2.1, "SiN"),), 810.0)


def cr_sin_cr_template():
    return StackTemplate(
        (
            LayerTemplate(Param("x"), CR.real, CR.imag, "Cr"),
            LayerTemplate(Param("y"), 2.1, 0.0, "SiN"),
            LayerTemplate(Param("x"), CR.real, CR.imag, "Cr"),
        ),
        {"x": (1.0, 20.0), "y": (100.0, 300.0)},
    )


# -- ideal splitters ----------------------------------------------------------


def test_lossless_identity():
    assert np.allclose(lossless_bs(1.0), np.eye(2))


@pytest.mark.parametrize("t_mag", [0.0, 0.3, HALF, math.sqrt(0.6), 1.0])
@pytest.mark.parametrize("sign", [1, -1])
def test_lossless_unitary(t_mag, sign):
    M = lossless_bs(t_mag, sign)
    assert np.max(np.abs(M.conj().T @ M - np.eye(2))) < 1e-12
    assert BeamsplitterSpec(M[0, 0], M[1, 0]).lossless


def test_lossless_range():
    with pytest.raises(ConfigError):
        lossless_bs(1.2)


def test_lossless_50_50_full_coalescence():
    assert coincidence_probability(pair_output(0.0, lossless_bs(HALF))) < 1e-15


def test_lossless_sin_like_dip_floor():
    T, R = 0.6, 0.4
    M = lossless_bs(math.sqrt(T))
    floor = coincidence_probability(pair_output(0.0, M, 1.0)) / coincidence_probability(pair_output(0.0, M, 0.0))
    assert floor == pytest.approx((T - R) ** 2 / (T**2 + R**2), abs=1e-12)
    assert floor == pytest.approx(0.0769230769, abs=1e-9)


def test_lossy_singular_values():
    s = np.linalg.svd(lossy_bs(1), compute_uv=False)
    assert np.allclose(s, [1.0, 0.0], atol=1e-15)
    s = np.linalg.svd(lossy_bs(-1), compute_uv=False)
    assert np.allclose(s, [1.0, 0.0], atol=1e-15)


def test_lossy_plus_bosonic_coincidence():
    assert coincidence_probability(pair_output(0.0, lossy_bs(1))) == pytest.approx(0.25, abs=1e-12)


def test_lossy_minus_fermionic():
    d = pair_output(math.pi, lossy_bs(-1))
    assert coincidence_probability(d) == pytest.approx(0.0, abs=1e-12)
    assert loss_distribution(d) == {1: pytest.approx(1.0, abs=1e-12)}


def test_spec_rejects_gain():
    with pytest.raises(PhysicsError):
        BeamsplitterSpec(0.9, 0.9)


# -- standing waves -----------------------------------------------------------


def test_qsw_identity():
    assert np.allclose(qsw_composite((1, 1)), np.eye(2), atol=1e-15)


def test_qsw_cosine_absorbed_is_lossy_minus():
    assert np.max(np.abs(qsw_composite((0, 1)) - lossy_bs(-1))) < 1e-12


def test_qsw_sine_absorbed_is_lossy_plus():
    assert np.max(np.abs(qsw_composite((1, 0)) - lossy_bs(1))) < 1e-12


def test_qsw_closed_form_and_linearity():
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = rng.uniform(-0.7, 0.7, 2) + 1j * rng.uniform(-0.7, 0.7, 2)
        b = rng.uniform(-0.7, 0.7, 2) + 1j * rng.uniform(-0.7, 0.7, 2)
        sc, ss = a
        want = np.array([[(sc + ss) / 2, (sc - ss) / 2], [(sc - ss) / 2, (sc + ss) / 2]])
        assert np.allclose(qsw_composite(a), want, atol=1e-15)
        lhs = qsw_composite((a + b) / 2)
        assert np.allclose(lhs, (qsw_composite(a) + qsw_composite(b)) / 2, atol=1e-15)


def test_qsw_rejects_amplification():
    with pytest.raises(PhysicsError):
        QswChannel(1.1, 0.5)


# -- thin films ---------------------------------------------------------------


def test_empty_stack():
    r = stack_response(LayerStack((), 810.0))
    assert r.t == pytest.approx(1.0)
    assert abs(r.r_left) < 1e-15 and abs(r.r_right) < 1e-15


def test_layer_validation():
    with pytest.raises(ConfigError):
        Layer(0.0, 2.0)
    with pytest.raises(PhysicsError):
        Layer(10.0, complex(2.0, -0.1))
    with pytest.raises(ConfigError):
        LayerStack((), -1.0)


def test_sin_100nm_reflectance():
    r = stack_response(sin_film())
    t_ref, r_ref = fresnel_stack([(100.0, 2.1)], 810.0)
    assert r.t == pytest.approx(t_ref, abs=1e-12)
    assert r.r_left == pytest.approx(r_ref, abs=1e-12)
    assert 0.38 <= r.R_left <= 0.42
    assert 0.58 <= r.T <= 0.62
    # closed form for a single lossless film
    n, delta = 2.1, 2 * math.pi * 2.1 * 100 / 810
    x = (n * n - 1) ** 2 * math.sin(delta) ** 2
    assert r.R_left == pytest.approx(x / (4 * n * n + x), abs=1e-12)


def test_sin_halfwave_antireflection():
    r = stack_response(sin_film(195.0))
    assert r.R_left < 0.05


def _random_stack(data, lossy):
    n_layers = data.draw(st.integers(1, 4))
    layers = []
    for _ in range(n_layers):
        d = data.draw(st.floats(1.0, 400.0))
        n = data.draw(st.floats(1.0, 4.0))
        k = data.draw(st.floats(0.0, 5.0)) if lossy else 0.0
        layers.append(Layer(d, complex(n, k)))
    n_in = data.draw(st.floats(1.0, 2.0))
    n_out = data.draw(st.floats(1.0, 2.0))
    return LayerStack(tuple(layers), data.draw(st.floats(300.0, 1500.0)), n_in, n_out)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_passivity_and_reciprocity(data):
    stack = _random_stack(data, lossy=True)
    r = stack_response(stack)
    assert r.T + r.R_left <= 1 + 1e-10
    assert r.T + r.R_right <= 1 + 1e-10
    assert r.A_left >= -1e-12 and r.A_right >= -1e-12
    t_rev, _ = fresnel_stack([(lay.thickness_nm, lay.index) for lay in stack.reversed().layers],
                             stack.wavelength_nm, stack.ambient_out, stack.ambient_in)
    assert abs(t_rev - r.t) < 1e-12
    t_ref, r_ref = fresnel_stack([(lay.thickness_nm, lay.index) for lay in stack.layers],
                                 stack.wavelength_nm, stack.ambient_in, stack.ambient_out)
    assert abs(t_ref - r.t) < 1e-10 and abs(r_ref - r.r_left) < 1e-10


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_lossless_limit(data):
    stack = _random_stack(data, lossy=False)
    r = stack_response(stack)
    assert abs(r.T + r.R_left - 1) < 1e-10
    assert abs(r.T + r.R_right - 1) < 1e-10
    # unitary S = [[t, rr], [rl, t]] forces arg(rl) + arg(rr) - 2 arg(t) = pi
    if abs(r.r_left) > 1e-6 and abs(r.t) > 1e-6:
        phase = np.angle(r.r_left * r.r_right / r.t**2)
        assert abs(abs(phase) - math.pi) < 1e-6


@settings(max_examples=40, deadline=None)
@given(d=st.floats(1.0, 500.0), n=st.floats(1.0, 4.0), d2=st.floats(1.0, 500.0), n2=st.floats(1.0, 4.0))
def test_lossless_symmetric_quadrature(d, n, d2, n2):
    stack = LayerStack((Layer(d, n), Layer(d2, n2), Layer(d, n)), 810.0)
    r = stack_response(stack)
    if abs(r.r_left) > 1e-6 and abs(r.t) > 1e-6:
        assert abs(abs(np.angle(r.r_left / r.t)) - math.pi / 2) < 1e-6


# -- coherent illumination ----------------------------------------------------


def test_coherent_empty_stack():
    for a in [(1, 0), (HALF, HALF), (HALF, -1j * HALF)]:
        assert coherent_response(LayerStack((), 810.0), *a)[2] == pytest.approx(0.0, abs=1e-15)


def test_coherent_ideal_lossy_plus():
    _, _, absorbed = coherent_response(lossy_bs(1), HALF, HALF)
    assert absorbed == pytest.approx(0.0, abs=1e-15)
    _, _, absorbed = coherent_response(lossy_bs(1), HALF, -HALF)
    assert absorbed == pytest.approx(1.0, abs=1e-15)


def test_coherent_rejects_unnormalized():
    with pytest.raises(ConfigError):
        coherent_response(lossy_bs(1), 1.0, 1.0)


def test_coherent_port_convention():
    stack = LayerStack((Layer(40, complex(2.0, 0.3)), Layer(90, 1.5)), 810.0)
    resp = stack_response(stack)
    out_l, out_r, _ = coherent_response(stack, 1.0, 0.0)
    assert out_l == pytest.approx(resp.t) and out_r == pytest.approx(resp.r_left)
    out_l, out_r, _ = coherent_response(stack, 0.0, 1.0)
    assert out_l == pytest.approx(resp.r_right) and out_r == pytest.approx(resp.t)


# -- design -------------------------------------------------------------------


def test_design_cr_sin_cr_lossy_plus():
    res = design_stack(cr_sin_cr_template(), BeamsplitterSpec(0.5, 0.5))
    assert res.residual < 0.02
    x, y = res.params["x"], res.params["y"]
    assert 1 <= x <= 20 and 100 <= y <= 300
    # selective standing-wave absorption of the designed stack
    anti = coherent_response(res.stack, HALF * np.exp(1j * 0), -HALF)[2]
    sym = coherent_response(res.stack, HALF, HALF)[2]
    assert anti == pytest.approx(1.0, abs=0.05)
    assert sym == pytest.approx(0.0, abs=0.05)


def test_design_identity_empty_template():
    res = design_stack(StackTemplate((), {}), BeamsplitterSpec(1.0, 0.0))
    assert res.residual == pytest.approx(0.0, abs=1e-15)
    assert res.params == {}


def test_design_single_layer_lossy_minus():
    template = StackTemplate(
        (
            LayerTemplate(Param("gap"), 1.0),
            LayerTemplate(Param("x"), CR.real, CR.imag, "Cr"),
            LayerTemplate(Param("gap"), 1.0),
        ),
        {"x": (0.1, 20.0), "gap": (1.0, 400.0)},
    )
    res = design_stack(template, BeamsplitterSpec(0.5, -0.5))
    assert res.residual < 0.05


def test_design_deterministic():
    a = design_stack(cr_sin_cr_template(), BeamsplitterSpec(0.5, 0.5))
    b = design_stack(cr_sin_cr_template(), BeamsplitterSpec(0.5, 0.5))
    assert a.params == b.params
    assert a.residual == b.residual


def test_template_validation():
    with pytest.raises(ConfigError):
        StackTemplate((LayerTemplate(Param("x"), 2.0),), {"x": (5.0, 1.0)})
    with pytest.raises(ConfigError):
        StackTemplate((LayerTemplate(Param("x"), 2.0),), {})
    many = tuple(LayerTemplate(Param(f"p{i}"), 2.0) for i in range(5))
    with pytest.raises(ConfigError):
        design_stack(StackTemplate(many, {f"p{i}": (1.0, 2.0) for i in range(5)}), BeamsplitterSpec(0.5, 0.5))
