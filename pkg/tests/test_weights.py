import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tfloc.weights import (GRSError, RadialWeight, eval_weight, grs_diagnostic, make_weight,
                           moderateness_report, require_grs)


def test_polynomial_zero_is_constant():
    m = make_weight("polynomial:0")
    z = np.array([0, 1 + 2j, -7j])
    assert np.allclose(m(z), 1.0)


def test_subexponential_value():
    assert make_weight("subexp:1,0.5")(4.0) == pytest.approx(np.e**2, rel=1e-14)
    assert make_weight("subexp:1,0.5")(4.0) == pytest.approx(7.389056, abs=1e-6)


def test_loglin_at_origin():
    assert make_weight("loglin:1")(0.0) == pytest.approx(1.0)


def test_eval_examples():
    assert eval_weight(make_weight("polynomial:2"), 1.0 + 0j) == pytest.approx(2.0)
    assert eval_weight(make_weight("exponential:1"), 1j) == pytest.approx(np.e)


def test_product_weight():
    a, b = make_weight("polynomial:2"), make_weight("subexp:1,0.5")
    m = make_weight({"family": "product", "factors": ["polynomial:2", "subexp:1,0.5"]})
    z = np.array([[1 + 1j, 2.0], [0.5j, -3 + 1j]])
    assert np.allclose(m(z), a(z[:, 0]) * b(z[:, 1]))


def test_invalid_parameters():
    with pytest.raises(ValueError):
        make_weight("subexp:1,1.5")
    with pytest.raises(ValueError):
        make_weight("nosuch:1")
    with pytest.raises(ValueError):
        make_weight({"family": "polynomial", "params": [1], "colour": "red"})
    with pytest.raises(ValueError):
        make_weight("polynomial:1,2")


def test_spec_round_trip():
    m = make_weight("subexp:1,0.5") ** 0.5
    assert make_weight(m.to_spec()) == m


def test_log_domain_no_overflow():
    m = make_weight("subexp:1,0.5")
    assert np.isfinite(m.log(1e12))
    assert m.log(1e12) == pytest.approx(1e6)


@pytest.mark.parametrize("spec", ["peetre:2", "exponential:1", "polynomial:2", "subexp:1,0.5",
                                  "subexp:1,0.75", "loglin:1"])
def test_moderate_against_own_envelope(spec):
    assert moderateness_report(make_weight(spec)).passed


def test_gaussian_growth_fails():
    m = RadialWeight.from_profile(lambda r: r * r, log=True)
    rep = moderateness_report(m, make_weight("exponential:10"))
    assert not rep.passed
    assert rep.sup_ratio > 1


def test_square_root_moderate_against_root_envelope():
    for spec in ["polynomial:2", "subexp:1,0.5", "loglin:1"]:
        m = make_weight(spec)
        assert moderateness_report(m.sqrt(), m.envelope() ** 0.5).passed


def test_grs_polynomial():
    rep = grs_diagnostic(make_weight("peetre:3"), 1.0, 10_000)
    assert rep.values[-1] == pytest.approx((1 + 1e4) ** (3e-4), rel=1e-12)
    assert rep.values[-1] == pytest.approx(1.00277, abs=1e-5)
    assert rep.verdict == "to_one"


def test_grs_subexponential():
    rep = grs_diagnostic(make_weight("subexp:1,0.5"), 1.0, 10_000)
    assert rep.values[-1] == pytest.approx(np.exp(1e-2), rel=1e-12)
    assert rep.values[-1] == pytest.approx(1.01005, abs=1e-5)
    assert rep.verdict == "to_one"


def test_grs_exponential_fails():
    rep = grs_diagnostic(make_weight("exponential:1"), 1.0, 10_000)
    assert np.allclose(rep.values, np.e)
    assert rep.verdict == "bounded_away"
    with pytest.raises(GRSError):
        require_grs(make_weight("exponential:1"))


def test_grs_short_sequence_rejected():
    with pytest.raises(ValueError):
        grs_diagnostic(make_weight("peetre:1"), 1.0, 5)


def test_loglin_grs_passes():
    assert grs_diagnostic(make_weight("loglin:1"), 1.0).verdict == "to_one"


@settings(max_examples=40, deadline=None)
@given(st.floats(-6, 6), st.floats(-6, 6), st.floats(-6, 6), st.floats(-6, 6),
       st.sampled_from(["polynomial:2", "polynomial:-3", "subexp:2,0.5", "loglin:1"]))
def test_two_sided_moderateness_property(x1, y1, x2, y2, spec):
    m = make_weight(spec)
    v = m.envelope()
    z1, z2 = complex(x1, y1), complex(x2, y2)
    ratio = m(z1) / m(z2)
    assert ratio <= v(z1 - z2) * (1 + 1e-9)
    assert ratio >= (1 - 1e-9) / v(z1 - z2)


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0, 2 * np.pi))
def test_radial_property(x, y, phi):
    m = make_weight("subexp:1,0.75")
    z = complex(x, y)
    assert m(z) == pytest.approx(m(z * np.exp(1j * phi)), rel=1e-12)
