import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import exp1

from tfloc.gamma import (product_inequality_scan, tau, tau_detail, tau_spectrum,
                         vst_condition)
from tfloc.quadrature import QuadratureError, gauss_laguerre
from tfloc.weights import RadialWeight, make_weight

QUAD = RadialWeight.from_profile(lambda r: 1 + np.pi * r * r)

# tau_{n,s} from 30-digit adaptive quadrature (mpmath), frozen
ORACLE = {
    ("subexp:1,0.5", 0, 1): 2.0116355829463652,
    ("subexp:1,0.5", 0, -1): 0.51556354372133242,
    ("subexp:1,0.5", 1, 2): 5.7709697535133077,
    ("subexp:1,0.5", 10, -1): 0.25901891776376434,
    ("subexp:1,0.5", 100, 1): 10.812767547127743,
    ("subexp:1,0.5", 100, 2): 117.32665916611246,
    ("subexp:1,0.75", 0, 2): 3.5645323909095032,
    ("subexp:1,0.75", 10, 1): 4.9491599680203141,
    ("subexp:1,0.75", 100, -1): 0.025712662085978826,
    ("subexp:1,0.75", 100, 2): 1600.3028754611701,
    ("loglin:1", 0, 1): 1.5440587378244757,
    ("loglin:1", 1, -1): 0.56149777714231068,
    ("loglin:1", 10, 2): 11.757136679599719,
    ("loglin:1", 100, 1): 14.39764675966704,
}


def test_constant_weight():
    assert tau(make_weight("constant"), 7, 3.0) == pytest.approx(1.0, abs=1e-11)


def test_quadratic_profile_closed_form():
    assert tau(QUAD, 3, 1.0) == pytest.approx(5.0, rel=1e-10)


def test_exponential_integral_oracle():
    assert tau(QUAD, 0, -1.0) == pytest.approx(np.e * exp1(1.0), rel=1e-10)
    assert tau(QUAD, 0, -1.0) == pytest.approx(0.5963474, abs=1e-7)


@pytest.mark.parametrize("key", sorted(ORACLE))
def test_against_frozen_oracle(key):
    spec, n, s = key
    assert tau(make_weight(spec), n, s) == pytest.approx(ORACLE[key], rel=1e-10)


def test_closed_form_up_to_512():
    for n in list(range(0, 70)) + [100, 257, 400, 512]:
        assert tau(QUAD, n, 1.0) == pytest.approx(n + 2, rel=1e-10)


def test_square_of_quadratic_profile():
    assert tau(QUAD ** 2, 0, 1.0) == pytest.approx(5.0, rel=1e-10)


def test_spectrum_polynomial_closed_form():
    sp = tau_spectrum(make_weight("polynomial:2"), 1.0, 20)
    n = np.arange(21)
    assert np.allclose(sp.values, 1 + (n + 1) / np.pi, rtol=1e-10)
    assert sp.values[0] == pytest.approx(1.3183099, abs=1e-7)


def test_spectrum_of_constant_is_ones():
    assert np.allclose(tau_spectrum(make_weight("constant"), 2.0, 30).values, 1.0, atol=1e-11)


@pytest.mark.parametrize("spec", ["polynomial:2", "subexp:1,0.5", "loglin:1"])
def test_spectrum_monotone_for_increasing_weight(spec):
    v = tau_spectrum(make_weight(spec), 1.0, 120).values
    assert np.all(np.diff(v) >= -1e-12 * v[1:])


def test_spectrum_csv_header_and_rows():
    text = tau_spectrum(make_weight("constant"), 1.0, 3).to_csv().splitlines()
    assert text[0] == "alpha,s,tau,est_error"
    assert len(text) == 5


def test_two_dimensional_csv_indices():
    w = RadialWeight.product_of(make_weight("polynomial:2"), make_weight("constant"))
    text = tau_spectrum(w, 1.0, 2).to_csv().splitlines()
    assert text[1].startswith("(0;0)")


def test_laguerre_route_on_polynomial_weight():
    w = make_weight("polynomial:2")
    for n in (0, 5, 64):
        a = tau_detail(w, n, 1.0, method="laguerre").value
        assert a == pytest.approx(1 + (n + 1) / np.pi, rel=1e-10)


def test_routes_agree_below_65():
    w = make_weight("subexp:1,0.5")
    for n in (0, 5, 20, 64):
        for s in (1.0, -1.0, 2.0):
            a = tau_detail(w, n, s, method="auto").value
            b = tau_detail(w, n, s, method="legendre").value
            assert a == pytest.approx(b, rel=1e-9)


def test_laguerre_nodes_integrate_moments():
    u, logw = gauss_laguerre(30, 4.0)
    w = np.exp(logw)
    assert np.sum(w) == pytest.approx(1.0, rel=1e-13)
    assert np.sum(w * u) == pytest.approx(5.0, rel=1e-12)   # Gamma(5) mean
    assert np.sum(w * u * u) == pytest.approx(30.0, rel=1e-12)


def test_nonconvergence_reported():
    with pytest.raises(QuadratureError) as exc:
        tau_detail(make_weight("subexp:1,0.5"), 0, 1.0, method="laguerre", rtol=1e-15, nodes=200)
    assert exc.value.estimate is not None


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        tau(make_weight("constant"), (1, 2), 1.0)


def test_product_scan_constant():
    sc = product_inequality_scan(make_weight("constant"), 1.0, -1.0, 10)
    assert sc.sup == pytest.approx(1.0) and sc.inf == pytest.approx(1.0)


def test_product_scan_first_value():
    sc = product_inequality_scan(QUAD, 1.0, -1.0, 5)
    assert sc.gamma[0] == pytest.approx(2 * np.e * exp1(1.0), rel=1e-10)
    assert sc.gamma[0] == pytest.approx(1.1926947, abs=1e-7)


def test_product_scan_subexp_plateau():
    sc = product_inequality_scan(make_weight("subexp:1,0.5"), 1.0, -1.0, 500)
    assert sc.inf >= 1 - 1e-9
    assert sc.plateau_change(400) < 1e-3


def test_vst_condition_values():
    assert vst_condition(make_weight("constant"), 1.0, -1.0, 10) == pytest.approx(1.0)
    r = vst_condition(QUAD, 1.0, -1.0, 200)
    g = [tau(QUAD, k, 1.0) * tau(QUAD, k, -1.0) for k in range(201)]
    assert r == pytest.approx(max(g) / min(g), rel=1e-9)


def test_vst_condition_scale_invariant():
    w = make_weight("subexp:1,0.5")
    a = vst_condition(w, 1.0, -1.0, 60)
    b = vst_condition(w.scaled(3.7), 1.0, -1.0, 60)
    assert a == pytest.approx(b, rel=1e-10)


def test_tensor_factorization():
    phi, psi = make_weight("polynomial:2"), make_weight("subexp:1,0.5")
    w = RadialWeight.product_of(phi, psi)
    for (m, n) in [(0, 0), (3, 7), (12, 1)]:
        for s in (1.0, -1.0):
            assert tau(w, (m, n), s) == pytest.approx(tau(phi, m, s) * tau(psi, n, s), rel=1e-9)


WEIGHTS = st.sampled_from(["polynomial:2", "polynomial:-1", "subexp:1,0.5", "subexp:2,0.25",
                           "loglin:1", "peetre:3"])


@settings(max_examples=25, deadline=None)
@given(WEIGHTS, st.integers(0, 300), st.floats(0.25, 3.0))
def test_cauchy_schwarz_property(spec, n, s):
    w = make_weight(spec)
    assert tau(w, n, s) * tau(w, n, -s) >= 1 - 1e-9


@settings(max_examples=25, deadline=None)
@given(WEIGHTS, st.integers(0, 300), st.floats(-3.0, 3.0))
def test_positivity_property(spec, n, s):
    assert tau(make_weight(spec), n, s) > 0
