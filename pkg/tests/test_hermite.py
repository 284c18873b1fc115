import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tfloc.hermite import (Grid, GridFunction, HermiteBasis, HermiteCoeffs, UnderResolvedError,
                           gaussian, hermite_coeffs, hermite_eval, hermite_functions,
                           hermite_synthesize, hermite_tensor, stft_hermite_analytic)

GRID = Grid.for_hermite(64)


def test_h0_at_origin():
    assert hermite_eval(0, 0.0) == pytest.approx(2**0.25, rel=1e-15)
    assert hermite_eval(0, 0.0) == pytest.approx(1.1892071, abs=1e-7)


def test_h0_is_the_gaussian():
    x = GRID.axis
    assert np.allclose(hermite_eval(0, x), 2**0.25 * np.exp(-np.pi * x * x), rtol=0, atol=1e-15)


def test_h3_unit_norm():
    x = GRID.axis
    assert np.sum(hermite_eval(3, x) ** 2) * GRID.spacing == pytest.approx(1.0, abs=1e-10)


def test_odd_parity_h5():
    x = np.linspace(-4, 4, 801)
    assert np.allclose(hermite_eval(5, -x), -hermite_eval(5, x), atol=1e-14)


def test_leading_coefficient_positive():
    # h_n(x) ~ c x^n for large x with c > 0
    x = np.array([3.0 + np.sqrt(n / np.pi) for n in range(12)])
    vals = [hermite_eval(n, xi) for n, xi in enumerate(x)]
    assert all(v > 0 for v in vals)


def test_negative_degree_rejected():
    with pytest.raises(ValueError):
        hermite_eval(-1, 0.0)


def test_orthonormal_up_to_64():
    assert HermiteBasis(64, GRID).gram_deviation() < 1e-10


def test_stable_up_to_256():
    grid = Grid.for_hermite(256)
    H = hermite_functions(256, grid.axis)
    assert np.all(np.isfinite(H))
    G = H @ H.T * grid.spacing
    assert np.max(np.abs(G - np.eye(257))) < 1e-10


def test_tensor_values():
    assert hermite_tensor((0, 0), np.array([0.0, 0.0])) == pytest.approx(np.sqrt(2))
    pts = np.stack([np.zeros(7), np.linspace(-1, 1, 7)], axis=-1)
    assert np.allclose(hermite_tensor((1, 0), pts), 0.0)


def test_tensor_orthogonality():
    g2 = Grid(6.0, 6.0 / 128, 2)
    pts = g2.points()
    a = hermite_tensor((1, 2), pts)
    b = hermite_tensor((2, 1), pts)
    assert abs(np.sum(a * b) * g2.cell) < 1e-10
    assert np.sum(a * a) * g2.cell == pytest.approx(1.0, abs=1e-10)


def test_tensor_dimension_mismatch():
    with pytest.raises(ValueError):
        hermite_tensor((1, 2), np.zeros((4, 3)))


def test_analytic_stft_values():
    assert stft_hermite_analytic(0, 0.0) == pytest.approx(1.0)
    assert abs(stft_hermite_analytic(1, 1.0)) == pytest.approx(np.sqrt(np.pi) * np.exp(-np.pi / 2),
                                                               rel=1e-12)
    assert abs(stft_hermite_analytic(1, 1.0)) == pytest.approx(0.3684570, abs=1e-7)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_analytic_stft_modulus_peak(n):
    r = np.linspace(0.01, 4, 40001)
    mod = np.abs(stft_hermite_analytic(n, r))
    assert r[np.argmax(mod)] == pytest.approx(np.sqrt(n / np.pi), abs=1e-3)


def test_analytic_stft_matches_direct_quadrature():
    # V_h h_n(x, xi) = int h_n(t) h(t - x) e^{-2 pi i xi t} dt, straight Riemann sum
    t = GRID.axis
    for n, z in [(0, 0.7 - 0.3j), (2, -1.1 + 0.4j), (5, 1.3 + 1.2j)]:
        direct = np.sum(hermite_eval(n, t) * hermite_eval(0, t - z.real)
                        * np.exp(-2j * np.pi * z.imag * t)) * GRID.spacing
        assert stft_hermite_analytic(n, z) == pytest.approx(direct, abs=1e-13)


def test_coeffs_of_h2():
    f = hermite_synthesize(HermiteCoeffs.unit(2, 5), GRID)
    c = hermite_coeffs(f, 5)
    assert np.allclose(c.values, HermiteCoeffs.unit(2, 5).values, atol=1e-8)


def test_coeffs_of_mix():
    c0 = HermiteCoeffs(np.array([1.0, 1.0]) / np.sqrt(2))
    c = hermite_coeffs(hermite_synthesize(c0, GRID), 3)
    assert c.values[0] == pytest.approx(1 / np.sqrt(2), abs=1e-8)
    assert c.values[1] == pytest.approx(1 / np.sqrt(2), abs=1e-8)


def test_coeffs_of_shifted_gaussian():
    # <pi(1) h, h_n> = conj(V_h h_n(1))
    x = GRID.axis
    f = GridFunction(GRID, 2**0.25 * np.exp(-np.pi * (x - 1.0) ** 2))
    c = hermite_coeffs(f, 20)
    ref = np.conj([stft_hermite_analytic(n, 1.0) for n in range(21)])
    assert np.allclose(c.values, ref, atol=1e-10)
    n = np.arange(21)
    from scipy.special import gammaln
    assert np.allclose(np.abs(c.values),
                       np.exp(-np.pi / 2 + 0.5 * (n * np.log(np.pi) - gammaln(n + 1))), atol=1e-10)


def test_under_resolved_grid():
    coarse = Grid(4.0, 0.25)
    f = GridFunction(coarse, np.zeros(coarse.size))
    with pytest.raises(UnderResolvedError):
        hermite_coeffs(f, 40)


def test_synthesize_zero_and_unit():
    assert np.all(hermite_synthesize(HermiteCoeffs(np.zeros(4)), GRID).values == 0)
    f = hermite_synthesize(HermiteCoeffs.unit(3, 3), GRID)
    assert np.allclose(f.values, hermite_eval(3, GRID.axis))


def test_gaussian_samples():
    assert gaussian(GRID).norm() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=30))
def test_round_trip_property(vals):
    c = HermiteCoeffs(np.array(vals))
    f = hermite_synthesize(c, GRID)
    back = hermite_synthesize(hermite_coeffs(f, c.cutoff), GRID)
    assert (back - f).norm() < 1e-8 * max(1.0, f.norm())


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 64), st.integers(0, 64))
def test_orthonormality_property(m, n):
    x = GRID.axis
    ip = np.sum(hermite_eval(m, x) * hermite_eval(n, x)) * GRID.spacing
    assert abs(ip - (m == n)) < 1e-10
