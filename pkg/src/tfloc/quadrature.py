"""Quadrature rules: generalized Gauss-Laguerre (Golub-Welsch), windowed
Gauss-Legendre and polar product rules on the complex plane."""

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh_tridiagonal


class QuadratureError(RuntimeError):
    """Raised when a self-checking quadrature fails to converge."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


@lru_cache(maxsize=512)
def gauss_laguerre(k, alpha):
    """Nodes and log-weights of the k-point rule for x**alpha * exp(-x).

    Weights are normalized so they sum to one, i.e. the rule integrates
    against the Gamma(alpha + 1) probability density.  Nodes are the
    eigenvalues of the Jacobi matrix, weights the squared first components
    of its eigenvectors.
    """
    i = np.arange(k, dtype=float)
    diag = 2.0 * i + alpha + 1.0
    j = np.arange(1, k, dtype=float)
    off = np.sqrt(j * (j + alpha))
    nodes, vecs = eigh_tridiagonal(diag, off)
    w = vecs[0] ** 2
    with np.errstate(divide="ignore"):
        logw = np.log(w)
    nodes.setflags(write=False)
    logw.setflags(write=False)
    return nodes, logw


@lru_cache(maxsize=64)
def _leggauss(k):
    x, w = leggauss(k)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(k, lo, hi):
    """k-point Gauss-Legendre nodes and weights on [lo, hi]."""
    x, w = _leggauss(k)
    half = 0.5 * (hi - lo)
    return half * x + 0.5 * (hi + lo), half * w


def composite_legendre(edges, k):
    """Gauss-Legendre with k nodes on each panel between consecutive edges."""
    xs, ws = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(k, lo, hi)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def polar_rule(radius, n_angle, panel=0.5, k=16):
    """Product rule on the disc |z| <= radius in the complex plane.

    Composite Gauss-Legendre in r (Jacobian r included) times the uniform
    trapezoid rule in the angle, which integrates e^{i j phi} exactly for
    |j| < n_angle.

    Returns
    -------
    z : complex ndarray, flat
    w : real ndarray, flat
    """
    n_panels = max(1, int(np.ceil(radius / panel)))
    edges = np.linspace(0.0, radius, n_panels + 1)
    r, wr = composite_legendre(edges, k)
    phi = 2.0 * np.pi * np.arange(n_angle) / n_angle
    z = r[:, None] * np.exp(1j * phi[None, :])
    w = (wr * r)[:, None] * np.full(n_angle, 2.0 * np.pi / n_angle)[None, :]
    return z.ravel(), w.ravel()


def polar_rule_sqrt(radius, n_angle, panel=0.25, k=16):
    """Polar product rule with the radial variable mapped to w = sqrt(r).

    Integrands like r^{2n+1} e^{a r^{1/2}} are smooth in w, so composite
    Gauss-Legendre in w keeps spectral accuracy at the origin.  The
    Jacobian r dr = 2 w^3 dw is folded into the weights.
    """
    top = np.sqrt(radius)
    n_panels = max(1, int(np.ceil(top / panel)))
    edges = np.linspace(0.0, top, n_panels + 1)
    w, ww = composite_legendre(edges, k)
    r = w * w
    phi = 2.0 * np.pi * np.arange(n_angle) / n_angle
    z = r[:, None] * np.exp(1j * phi[None, :])
    wt = (2.0 * ww * w**3)[:, None] * np.full(n_angle, 2.0 * np.pi / n_angle)[None, :]
    return z.ravel(), wt.ravel()
