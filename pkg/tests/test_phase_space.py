import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tfloc.hermite import GridFunction, HermiteCoeffs, UnderResolvedError, stft_hermite_analytic
from tfloc.phase_space import (NotAFrameError, PhaseGrid, analytic_agreement, as_function,
                               default_grid, frame_bounds, gabor_coeffs, gabor_multiplier_apply,
                               gabor_reconstruct, gabor_system, istft, mixed_norm,
                               mod_norm_frame, mod_norm_grid, mod_norm_hermite, stft)
from tfloc.weights import make_weight


@pytest.fixture(scope="module")
def system():
    return gabor_system(a=0.5, b=0.5)


@pytest.fixture(scope="module")
def window():
    return as_function(HermiteCoeffs.unit(0, 0), default_grid(16))


def test_stft_gaussian_modulus(window):
    F = stft(window, window)
    z = F.points()
    assert np.allclose(np.abs(F.values), np.exp(-np.pi * np.abs(z) ** 2 / 2), atol=1e-12)


def test_stft_matches_closed_form_with_phase(window):
    f = as_function(HermiteCoeffs.unit(3, 3), window.grid)
    F = stft(f, window)
    z = F.points()
    disc = np.abs(z) <= 2.5
    assert np.allclose(F.values[disc], stft_hermite_analytic(3, z[disc]), atol=1e-12)


def test_analytic_agreement_tolerance():
    rel, ab = analytic_agreement(cutoff=8)
    assert rel < 1e-6
    assert ab < 1e-12


def test_moyal_identity(window):
    f = as_function(HermiteCoeffs(np.array([1.0, 0.5j, -0.25, 0.1])), window.grid)
    F = stft(f, window)
    assert F.l2_norm() == pytest.approx(f.norm() * window.norm(), rel=1e-10)


def test_istft_round_trip(window):
    f = as_function(HermiteCoeffs(np.array([0.3, 1.0, 0.0, -0.5j, 0.2])), window.grid)
    back = istft(stft(f, window), window)
    assert (back - f).norm() / f.norm() < 1e-9


def test_phase_grid_points_shape():
    P = PhaseGrid(2.0, 0.5)
    assert P.points().shape == (P.axis.size, P.axis.size)
    assert P.axis[0] == -2.0 and P.axis[-1] == 1.5
    with pytest.raises(ValueError):
        PhaseGrid(1.0, 0.3)


def test_field_csv_header(window):
    text = stft(window, window, PhaseGrid(2.0, 1.0 / 8)).to_csv().splitlines()
    assert text[0] == "x,xi,re,im"


def test_frame_bounds_gaussian(system):
    A, B = frame_bounds(system)
    assert 0 < A <= B
    # redundancy 1/(ab) = 4 for a unit-norm window
    assert A < 4 < B
    assert B / A < 1.05


def test_frame_operator_upper_bound(system):
    f = system.sample(HermiteCoeffs(np.array([1.0, 2.0, 0.5j])))
    Sf = system.frame_operator(f)
    q = np.vdot(f.values, Sf.values).real * system.grid.spacing / f.norm() ** 2
    A, B = frame_bounds(system)
    assert A * (1 - 1e-8) <= q <= B * (1 + 1e-8)


def test_reconstruction(system):
    for n in (0, 7, 19):
        f = HermiteCoeffs.unit(n, 19)
        g = system.sample(f)
        r = gabor_reconstruct(gabor_coeffs(f, system), system)
        assert (r - g).norm() / g.norm() < 1e-8


def test_not_a_frame():
    with pytest.raises(NotAFrameError):
        gabor_system(a=1.1, b=1.1)


def test_bad_lattice():
    with pytest.raises(ValueError):
        gabor_system(a=0.0, b=0.5)


def test_multiplier_identity_is_frame_operator(system):
    f = system.sample(HermiteCoeffs.unit(2, 2))
    a = gabor_multiplier_apply(system, None, f)
    b = gabor_multiplier_apply(system, np.ones(system.lattice.shape), f)
    assert np.allclose(a.values, b.values)


def test_multiplier_length_mismatch(system):
    with pytest.raises(ValueError):
        gabor_multiplier_apply(system, np.ones(3), HermiteCoeffs.unit(0, 0))


def test_mod_norm_unweighted_is_l2():
    f = HermiteCoeffs(np.array([1.0, 1.0j]))
    assert mod_norm_grid(f, 2).value == pytest.approx(np.sqrt(2.0), rel=1e-9)


def test_mod_norm_hermite_matches_grid():
    f = HermiteCoeffs(np.array([1.0, 0.0, 0.5]))
    theta = make_weight("polynomial:1")
    a = mod_norm_hermite(f, theta).value
    b = mod_norm_grid(f, 2, 2, theta).value
    assert a == pytest.approx(b, rel=1e-6)


def test_mod_norm_infinity_of_gaussian():
    assert mod_norm_grid(HermiteCoeffs.unit(0, 0), np.inf).value == pytest.approx(1.0, rel=1e-12)


def test_mod_norm_boundary_check():
    with pytest.raises(UnderResolvedError):
        mod_norm_grid(HermiteCoeffs.unit(0, 0), 2, 2, "subexp:3,0.9", phase=PhaseGrid(3.0, 1 / 16))


def test_mod_norm_exponent_validation():
    with pytest.raises(ValueError):
        mod_norm_grid(HermiteCoeffs.unit(0, 0), 0.5)


def test_frame_norm_equivalence(system):
    m = make_weight("polynomial:2")
    for n in (0, 4, 9):
        f = HermiteCoeffs.unit(n, n)
        r = mod_norm_frame(f, 2, m, system).value / mod_norm_grid(f, 2, 2, m).value
        assert 1.0 < r < 3.0


def test_frame_norm_rejects_mixed(system):
    with pytest.raises(ValueError):
        mod_norm_frame(HermiteCoeffs.unit(0, 0), 1, None, system, q=2)


def test_mixed_norm_l1(window):
    F = stft(as_function(HermiteCoeffs.unit(1, 1), window.grid), window)
    # |V_h h_1(z)| = sqrt(pi) |z| e^{-pi |z|^2 / 2} integrates to sqrt(2 pi)
    # the cone |z| at the origin limits the Riemann sum to O(delta^3)
    assert mixed_norm(F, 1, 1) == pytest.approx(np.sqrt(2 * np.pi), rel=1e-4)


@settings(max_examples=15, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=10))
def test_stft_isometry_property(c):
    if np.linalg.norm(c) < 1e-6:
        return
    f = HermiteCoeffs(np.array(c))
    F = stft(as_function(f, default_grid(16)), as_function(HermiteCoeffs.unit(0, 0), default_grid(16)))
    assert F.l2_norm() == pytest.approx(f.norm(), rel=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.floats(1.0, 4.0), st.floats(0.5, 3.0))
def test_mod_norm_monotone_in_weight_property(s, r):
    f = HermiteCoeffs(np.array([1.0, 0.5]))
    lo = mod_norm_grid(f, 2, 2, f"polynomial:{r}").value
    hi = mod_norm_grid(f, 2, 2, f"polynomial:{r + s}").value
    assert hi >= lo
