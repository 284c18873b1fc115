import numpy as np
import pytest

from tfloc.gamma import tau
from tfloc.hermite import HermiteCoeffs
from tfloc.operators import (DenseOperator, TailError, canonical_diagonal, compose,
                             domination_check, envelope_check, identity, localization_matrix,
                             probe_points, shift_coefficients, tf_kernel)
from tfloc.phase_space import PhaseGrid
from tfloc.weights import RadialWeight, make_weight


def offdiag_ratio(M):
    off = np.abs(M - np.diag(np.diag(M)))
    return off.max() / np.abs(np.diag(M)).min()


def test_constant_weight_gives_identity():
    M = localization_matrix("gaussian", "constant", 20).matrix
    assert np.allclose(M, np.eye(21), atol=1e-12)


@pytest.mark.parametrize("spec", ["polynomial:2", "subexp:1,0.5", "loglin:1"])
def test_radial_weight_is_hermite_diagonal(spec):
    A = localization_matrix("gaussian", spec, 24)
    M = A.matrix
    assert offdiag_ratio(M) < 1e-10
    assert A.hermitian_defect() < 1e-12
    t = np.array([tau(make_weight(spec), n) for n in range(25)])
    assert np.allclose(np.diag(M).real, t, rtol=1e-9)


def test_non_radial_weight_is_not_diagonal():
    m = lambda z: 1.0 + np.real(z) ** 2
    assert offdiag_ratio(localization_matrix("gaussian", m, 8).matrix) > 1e-3


def test_sampled_window_route_matches_closed_form():
    N = 10
    a = localization_matrix("gaussian", "polynomial:2", N).matrix
    b = localization_matrix(HermiteCoeffs.unit(0, 0), "polynomial:2", N).matrix
    assert np.max(np.abs(a - b)) < 1e-8


def test_sampled_route_spacing_limit():
    with pytest.raises(ValueError):
        localization_matrix(HermiteCoeffs.unit(1, 1), "constant", 4, phase=PhaseGrid(8.0, 0.25))


def test_sampled_route_tail():
    with pytest.raises(TailError):
        localization_matrix(HermiteCoeffs.unit(0, 0), "exponential:6", 4, phase=PhaseGrid(3.0, 1 / 16))


def test_fast_growth_rejected():
    with pytest.raises(TailError):
        localization_matrix("gaussian", RadialWeight.from_profile(lambda r: 4 * r * r, log=True), 4)


def test_window_type_error():
    with pytest.raises(TypeError):
        localization_matrix(42, "constant", 4)


def test_canonical_diagonal():
    J = canonical_diagonal("polynomial:2", 10)
    assert np.allclose(J.eigenvalues, 1 + (np.arange(11) + 1) / np.pi, rtol=1e-10)
    c = HermiteCoeffs(np.ones(11))
    assert np.allclose(J.apply(c).values, J.eigenvalues)


def test_compose_mismatch():
    with pytest.raises(ValueError):
        compose(identity(3), identity(4))


def test_dense_csv_header():
    text = identity(1).to_csv().splitlines()
    assert text[0] == "row,col,re,im"
    assert len(text) == 5


def test_shift_coefficients_unitary_column():
    C = shift_coefficients(64, np.array([0.5 + 0.25j]))
    assert np.sum(np.abs(C) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_probe_points_in_disc():
    pts, k = probe_points(64, 0.25)
    assert np.all(np.abs(pts) <= np.sqrt(64 / np.pi) / 2 + 1e-12)


@pytest.fixture(scope="module")
def identity_kernel():
    return tf_kernel(identity(48))


def test_identity_kernel_is_gaussian(identity_kernel):
    K = identity_kernel
    w = K.offsets[np.isfinite(K.envelope)]
    assert np.allclose(K.envelope[np.isfinite(K.envelope)], np.exp(-np.pi * np.abs(w) ** 2 / 2),
                       atol=1e-10)
    assert K.constancy < 1e-10


def test_kernel_tail_error():
    with pytest.raises(TailError):
        tf_kernel(identity(8), radius=3.0)


@pytest.mark.parametrize("spec", ["polynomial:2", "peetre:3"])
def test_composition_domination(identity_kernel, spec):
    m = make_weight(spec)
    T = compose(localization_matrix("gaussian", m.reciprocal(), 48),
                localization_matrix("gaussian", m, 48))
    K = tf_kernel(T)
    C, _ = domination_check(K, m, identity_kernel.envelope)
    Ch, _ = domination_check(K, m, identity_kernel.envelope, power=0.5)
    assert 0 < C <= 1 and 0 < Ch <= 1
    assert envelope_check(K, m.envelope()).passed


def test_envelope_check_flat_kernel_fails(identity_kernel):
    flat = tf_kernel(identity(48))
    flat.envelope = np.where(np.isfinite(flat.envelope), 1.0, np.nan)
    assert not envelope_check(flat, "polynomial:2").passed


def test_dense_apply_resizes():
    A = DenseOperator(2 * np.eye(4))
    out = A.apply(HermiteCoeffs(np.ones(2)))
    assert np.allclose(out.values, [2, 2, 0, 0])
