"""Bargmann transform, weighted Fock norms, Toeplitz operators on Fock space,
and the intertwining check B(J_m f) = T_{m'}(B f).

d = 1 throughout.  Normalized monomials e_n(z) = (pi^n / n!)^{1/2} z^n are
orthonormal in the Fock space with measure e^{-pi |z|^2} dz, and B h_n = e_n.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gammaln

from .gamma import tau
from .hermite import GridFunction, HermiteCoeffs, UnderResolvedError
from .operators import _radius_for, _weight_log, localization_matrix
from .phase_space import as_function, default_grid
from .quadrature import polar_rule_sqrt
from .weights import make_weight


@dataclass(frozen=True)
class FockFunction:
    """F = sum a_n e_n (``coeffs``) or point samples F(points)."""

    coeffs: Optional[np.ndarray] = None
    points: Optional[np.ndarray] = None
    samples: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.coeffs is None and self.samples is None:
            raise ValueError("need monomial coefficients or samples")
        if self.coeffs is not None:
            object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))

    @classmethod
    def monomial(cls, n):
        c = np.zeros(n + 1, dtype=complex)
        c[n] = 1.0
        return cls(c)

    def __call__(self, z):
        if self.coeffs is None:
            raise ValueError("sampled Fock functions cannot be evaluated off their points")
        return monomial_table(self.coeffs.size - 1, z).T @ self.coeffs

    def norm(self):
        """Fock norm from the coefficients (orthonormal monomials)."""
        return float(np.linalg.norm(self.coeffs))

    def __mul__(self, c):
        if self.coeffs is not None:
            return FockFunction(self.coeffs * c)
        return FockFunction(None, self.points, self.samples * c)

    __rmul__ = __mul__


def monomial_table(cutoff, z):
    """e_n(z) for n = 0..cutoff, shape (cutoff + 1,) + z.shape, via the stable ratio
    e_{n+1} = sqrt(pi / (n + 1)) z e_n."""
    z = np.asarray(z, dtype=complex)
    E = np.empty((cutoff + 1,) + z.shape, dtype=complex)
    E[0] = 1.0
    for n in range(cutoff):
        E[n + 1] = np.sqrt(np.pi / (n + 1)) * z * E[n]
    return E


def bargmann(f, z):
    """B f(z) = 2^{1/4} e^{-pi z^2/2} int f(t) e^{-pi t^2} e^{2 pi t z} dt.

    HermiteCoeffs use B h_n = e_n; GridFunctions are integrated on their grid.
    """
    z = np.asarray(z, dtype=complex)
    if isinstance(f, HermiteCoeffs):
        if f.dimension != 1:
            raise ValueError("Bargmann routes are implemented for d = 1")
        return FockFunction(f.values)(z)
    if isinstance(f, GridFunction):
        if f.grid.dimension != 1:
            raise ValueError("Bargmann routes are implemented for d = 1")
        t = f.grid.axis
        L = f.grid.half_width
        zr = np.abs(z.real)
        if np.any(zr > L - 4.0):
            raise UnderResolvedError(f"grid half-width {L} too small for Re z up to {zr.max():.3g}")
        zf = z.ravel()
        expo = (-np.pi * zf[:, None] ** 2 / 2.0 - np.pi * t[None, :] ** 2
                + 2.0 * np.pi * t[None, :] * zf[:, None])
        vals = 2.0**0.25 * (np.exp(expo) @ f.values) * f.grid.spacing
        return vals.reshape(z.shape)
    raise TypeError("expected HermiteCoeffs or GridFunction")


def bargmann_coeffs(f):
    """B f as a FockFunction (coefficient route)."""
    return FockFunction(f.values)


# -- Fock norms ------------------------------------------------------------------

def fock_norm(F, p=2, q=None, m=None, half_width=8.0, spacing=1.0 / 16, radius=None):
    """(int (int |F(x+iy)|^p m^p e^{-p pi |z|^2/2} dx)^{q/p} dy)^{1/q}.

    p = q < inf uses a polar rule; mixed or infinite exponents use a uniform
    grid over [-L, L]^2.
    """
    q = p if q is None else q
    logm, _ = _weight_log(m if m is not None else "constant")
    if p == q and np.isfinite(p):
        cutoff = F.coeffs.size - 1
        R = radius or _radius_for(lambda z: p / 2.0 * logm(z), cutoff)
        z, w = polar_rule_sqrt(R, 2 * cutoff + 64)
        a = np.abs(F(z)) * np.exp(logm(z) - np.pi * np.abs(z) ** 2 / 2.0)
        return float(np.sum(w * a**p) ** (1.0 / p))
    ax = -half_width + spacing * np.arange(int(round(2 * half_width / spacing)) + 1)
    Z = ax[:, None] + 1j * ax[None, :]
    A = np.abs(F(Z)) * np.exp(logm(Z) - np.pi * np.abs(Z) ** 2 / 2.0)
    edge = np.maximum(np.abs(Z.real), np.abs(Z.imag)) >= half_width - 1.0
    if np.max(A[edge], initial=0.0) > 1e-10 * np.max(A):
        raise UnderResolvedError("Fock integrand not negligible at the grid boundary")
    inner = np.max(A, axis=0) if np.isinf(p) else (np.sum(A**p, axis=0) * spacing) ** (1.0 / p)
    return float(np.max(inner) if np.isinf(q) else (np.sum(inner**q) * spacing) ** (1.0 / q))


def monomial_gram(cutoff):
    """<e_m, e_n> under e^{-pi |z|^2} dz by polar quadrature."""
    z, w = polar_rule_sqrt(_radius_for(lambda z: np.zeros(np.shape(z)), cutoff), 2 * cutoff + 64)
    E = monomial_table(cutoff, z) * np.exp(-np.pi * np.abs(z) ** 2 / 2.0)[None, :]
    return (E * w[None, :]) @ E.conj().T


# -- Toeplitz operators -----------------------------------------------------------

def toeplitz_apply(m, F, points=None, route="radial"):
    """T_m F.

    ``route="radial"``: T_m e_n = tau_n(m) e_n, returns a coefficient FockFunction.
    ``route="quadrature"``: T_m F(w) = int m(z) F(z) e^{pi conj(z) w} e^{-pi |z|^2} dz
    evaluated at ``points`` with a polar rule, returns samples.
    """
    if route == "radial":
        m = make_weight(m if m is not None else "constant")
        t = np.array([tau(m, n) for n in range(F.coeffs.size)])
        return FockFunction(F.coeffs * t)
    if route != "quadrature":
        raise ValueError("route must be 'radial' or 'quadrature'")
    if points is None:
        raise ValueError("the quadrature route needs evaluation points")
    w_pts = np.asarray(points, dtype=complex)
    logm, _ = _weight_log(m if m is not None else "constant")
    wmax = float(np.max(np.abs(w_pts), initial=0.0))
    cutoff = F.coeffs.size - 1
    # |F(z) e^{pi conj(z) w} e^{-pi|z|^2}| <= |F(z)| e^{-pi|z|^2/2} e^{pi |z| |w| - pi|z|^2/2}
    R = _radius_for(lambda z: logm(z) + np.pi * np.abs(z) * wmax - np.pi * np.abs(z) ** 2 / 2.0
                    + np.pi * wmax**2 / 4.0, 2 * cutoff) + wmax
    n_angle = int(2 * cutoff + 64 + 4 * np.pi * R * wmax)
    z, wt = polar_rule_sqrt(R, n_angle, panel=0.125)
    dens = wt * np.exp(logm(z)) * F(z)
    flat = w_pts.ravel()
    out = np.empty(flat.size, dtype=complex)
    for s in range(0, flat.size, 64):
        blk = flat[s:s + 64]
        out[s:s + 64] = np.exp(np.pi * np.conj(z)[None, :] * blk[:, None]
                               - np.pi * np.abs(z)[None, :] ** 2) @ dens
    return FockFunction(None, w_pts, out.reshape(w_pts.shape))


def m_prime(m):
    """m'(z) = m(conj z); radial weights are their own m'."""
    m = make_weight(m)
    return m


def intertwine_check(m, f, points):
    """max |B(J_m f) - T_{m'}(B f)| / max |T_{m'}(B f)| over the points.

    Left side: J_m f from the phase-space localization matrix, sampled on a
    time grid and Bargmann-transformed by grid quadrature.  Right side: the
    coefficient Bargmann transform of f followed by the quadrature Toeplitz
    operator.
    """
    m = make_weight(m)
    points = np.asarray(points, dtype=complex)
    N = f.cutoff
    J = localization_matrix("gaussian", m, N)
    grid = default_grid(N)
    lhs = bargmann(as_function(J.apply(f), grid), points)
    rhs = toeplitz_apply(m_prime(m), bargmann_coeffs(f), points, route="quadrature").samples
    return float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(rhs)))


def disc_points(radius=3.0, n=13):
    ax = np.linspace(-radius, radius, n)
    Z = (ax[:, None] + 1j * ax[None, :]).ravel()
    return Z[np.abs(Z) <= radius + 1e-12]
