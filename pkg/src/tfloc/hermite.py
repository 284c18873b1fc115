"""Hermite functions in the e^{-pi x^2} scaling, sampling grids and the
closed-form short-time Fourier transform of Hermite functions against the
Gaussian window.

Conventions used throughout the package:

* time-frequency shift  pi(x, xi) g(t) = exp(2 pi i xi t) g(t - x)
* inner product         <f, g> = int f(t) conj(g(t)) dt
* phase-space points are complex numbers z = x + i xi (one per coordinate)
"""

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.special import gammaln


class UnderResolvedError(ValueError):
    """The sampling grid cannot represent the requested functions."""


@dataclass(frozen=True)
class Grid:
    """Uniform grid t_k = -L + k * spacing, k = 0 .. 2L/spacing - 1, per axis."""

    half_width: float
    spacing: float
    dimension: int = 1

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if self.half_width <= 0 or self.spacing <= 0:
            raise ValueError("half_width and spacing must be positive")
        n = 2.0 * self.half_width / self.spacing
        if abs(n - round(n)) > 1e-9 * n:
            raise ValueError("2 * half_width must be a multiple of spacing")

    @classmethod
    def for_hermite(cls, cutoff, dimension=1):
        L = max(6.0, 2.0 * np.sqrt(cutoff / np.pi))
        per_axis = 1024 if dimension == 1 else 128
        return cls(L, L / per_axis, dimension)

    @property
    def size(self):
        return int(round(2.0 * self.half_width / self.spacing))

    @property
    def shape(self):
        return (self.size,) * self.dimension

    @property
    def axis(self):
        return -self.half_width + self.spacing * np.arange(self.size)

    @property
    def cell(self):
        return self.spacing**self.dimension

    def points(self):
        """Sample points, shape ``shape + (dimension,)``."""
        ax = self.axis
        if self.dimension == 1:
            return ax[:, None]
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        return np.stack([X, Y], axis=-1)


@dataclass(frozen=True)
class GridFunction:
    """Complex samples of a function on a :class:`Grid`."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.grid.shape:
            raise ValueError(f"samples have shape {v.shape}, grid needs {self.grid.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("samples must be finite")
        object.__setattr__(self, "values", v)

    def inner(self, other):
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        return np.vdot(other.values, self.values) * self.grid.cell

    def norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.grid.cell))

    def __add__(self, other):
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        return GridFunction(self.grid, self.values + other.values)

    def __sub__(self, other):
        if other.grid != self.grid:
            raise ValueError("grid mismatch")
        return GridFunction(self.grid, self.values - other.values)

    def __mul__(self, c):
        return GridFunction(self.grid, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True)
class HermiteCoeffs:
    """Coefficients c_alpha of f = sum c_alpha h_alpha, alpha_j <= cutoff.

    ``values`` has shape ``(cutoff + 1,) * dimension``.
    """

    values: np.ndarray
    dimension: int = 1

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != self.dimension or len(set(v.shape)) != 1:
            raise ValueError("coefficients must be a square array of rank dimension")
        object.__setattr__(self, "values", v)

    @property
    def cutoff(self):
        return self.values.shape[0] - 1

    @classmethod
    def unit(cls, alpha, cutoff, dimension=1):
        alpha = _as_index(alpha, dimension)
        c = np.zeros((cutoff + 1,) * dimension, dtype=complex)
        c[alpha] = 1.0
        return cls(c, dimension)

    @classmethod
    def from_vector(cls, vec, dimension=1):
        vec = np.asarray(vec, dtype=complex)
        n = int(round(vec.size ** (1.0 / dimension)))
        return cls(vec.reshape((n,) * dimension), dimension)

    @property
    def vector(self):
        return self.values.ravel()

    def resize(self, cutoff):
        """Zero-pad or truncate to a new cutoff."""
        out = np.zeros((cutoff + 1,) * self.dimension, dtype=complex)
        k = min(cutoff, self.cutoff) + 1
        sl = (slice(0, k),) * self.dimension
        out[sl] = self.values[sl]
        return HermiteCoeffs(out, self.dimension)

    def norm(self):
        return float(np.linalg.norm(self.values))

    def __add__(self, other):
        n = max(self.cutoff, other.cutoff)
        return HermiteCoeffs(self.resize(n).values + other.resize(n).values, self.dimension)

    def __mul__(self, c):
        return HermiteCoeffs(self.values * c, self.dimension)

    __rmul__ = __mul__


def multi_indices(cutoff, dimension=1):
    """All multi-indices with entries <= cutoff, in C (row-major) order."""
    return list(product(range(cutoff + 1), repeat=dimension))


def _as_index(alpha, dimension):
    if np.isscalar(alpha):
        alpha = (int(alpha),)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != dimension:
        raise ValueError(f"multi-index {alpha} does not match dimension {dimension}")
    if min(alpha) < 0:
        raise ValueError("multi-index entries must be >= 0")
    return alpha


def hermite_functions(cutoff, x):
    """Values of h_0 .. h_cutoff at x; result has shape ``(cutoff + 1,) + x.shape``.

    Three-term recurrence

        h_{n+1} = 2 sqrt(pi/(n+1)) x h_n - sqrt(n/(n+1)) h_{n-1},

    seeded with h_0 = 2^{1/4} exp(-pi x^2).  The leading coefficient of every
    h_n is positive.
    """
    x = np.asarray(x, dtype=float)
    H = np.empty((cutoff + 1,) + x.shape)
    H[0] = 2.0**0.25 * np.exp(-np.pi * x * x)
    if cutoff >= 1:
        H[1] = 2.0 * np.sqrt(np.pi) * x * H[0]
    for n in range(1, cutoff):
        H[n + 1] = 2.0 * np.sqrt(np.pi / (n + 1)) * x * H[n] - np.sqrt(n / (n + 1)) * H[n - 1]
    return H


def hermite_eval(n, x):
    """Orthonormal Hermite function h_n at the points x."""
    if n < 0:
        raise ValueError("degree must be >= 0")
    return hermite_functions(n, x)[n]


def hermite_tensor(alpha, x):
    """h_alpha(x) = prod_j h_{alpha_j}(x_j); ``x`` has trailing axis d."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x[None]
    alpha = np.atleast_1d(alpha)
    if x.shape[-1] != alpha.size:
        raise ValueError("dimension mismatch between multi-index and points")
    out = np.ones(x.shape[:-1])
    for j, a in enumerate(alpha):
        out = out * hermite_eval(int(a), x[..., j])
    return out


def _stft_log_modulus(n, r):
    n = np.asarray(n, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logr = np.log(r)
        term = np.where(n == 0, 0.0, n * logr)
    return term + 0.5 * n * np.log(np.pi) - 0.5 * gammaln(n + 1) - 0.5 * np.pi * r * r


def stft_hermite_analytic(alpha, z):
    """V_h h_alpha(z) for the Gaussian window h, evaluated in closed form.

    ``z`` holds phase-space points x + i xi (trailing axis d when d > 1).
    With the conventions of this module

        V_h h_n(x, xi) = exp(-pi i x xi) (pi^n / n!)^{1/2} (x - i xi)^n exp(-pi |z|^2 / 2),

    and the d-dimensional value is the product over coordinates.
    """
    alpha = np.atleast_1d(alpha)
    z = np.asarray(z, dtype=complex)
    if alpha.size == 1 and (z.ndim == 0 or z.shape[-1] != 1):
        z = z[..., None]
    if z.shape[-1] != alpha.size:
        raise ValueError("dimension mismatch between multi-index and points")
    out = np.ones(z.shape[:-1], dtype=complex)
    for j, a in enumerate(alpha):
        zj = z[..., j]
        r = np.abs(zj)
        phase = np.exp(-1j * np.pi * zj.real * zj.imag - 1j * a * np.angle(zj))
        out = out * phase * np.exp(_stft_log_modulus(a, r))
    return out


def stft_hermite_table(cutoff, z):
    """V_h h_n(z) for n = 0 .. cutoff at complex points z (d = 1).

    Returns shape ``(cutoff + 1,) + z.shape``.
    """
    z = np.asarray(z, dtype=complex)
    n = np.arange(cutoff + 1).reshape((-1,) + (1,) * z.ndim)
    r = np.abs(z)[None]
    phase = np.exp(-1j * np.pi * z.real * z.imag)[None] * np.exp(-1j * n * np.angle(z)[None])
    return phase * np.exp(_stft_log_modulus(n, r))


class HermiteBasis:
    """Hermite functions h_alpha, alpha_j <= cutoff, sampled on a grid."""

    def __init__(self, cutoff, grid=None, dimension=1):
        self.grid = grid if grid is not None else Grid.for_hermite(cutoff, dimension)
        self.dimension = self.grid.dimension
        self.cutoff = cutoff
        self.table = hermite_functions(cutoff, self.grid.axis)  # (N+1, n)

    def gram_deviation(self):
        """max |<h_m, h_n> - delta_mn| over the basis (per-axis Gram)."""
        G = self.table @ self.table.T * self.grid.spacing
        dev = np.max(np.abs(G - np.eye(self.cutoff + 1)))
        # tensor Gram deviation is bounded by (1 + dev)^d - 1
        return (1.0 + dev) ** self.dimension - 1.0

    def analyze(self, values):
        v = np.asarray(values, dtype=complex)
        T = self.table * self.grid.spacing
        if self.dimension == 1:
            return T @ v
        return T @ v @ T.T

    def synthesize(self, coeffs):
        c = np.asarray(coeffs, dtype=complex)
        if self.dimension == 1:
            return self.table.T @ c
        return self.table.T @ c @ self.table


def hermite_coeffs(f, cutoff, tol=1e-8):
    """Hermite coefficients c_alpha = <f, h_alpha> by grid quadrature.

    Raises :class:`UnderResolvedError` when the grid cannot hold h_0 .. h_cutoff
    orthonormally to within ``tol``.
    """
    basis = HermiteBasis(cutoff, f.grid)
    dev = basis.gram_deviation()
    if dev > tol:
        raise UnderResolvedError(
            f"grid (L={f.grid.half_width}, spacing={f.grid.spacing}) does not resolve "
            f"Hermite functions up to degree {cutoff}: Gram deviation {dev:.2e} > {tol:.0e}"
        )
    return HermiteCoeffs(basis.analyze(f.values), f.grid.dimension)


def hermite_synthesize(c, grid=None):
    """Samples of sum_alpha c_alpha h_alpha on ``grid``."""
    if grid is None:
        grid = Grid.for_hermite(c.cutoff, c.dimension)
    if grid.dimension != c.dimension:
        raise ValueError("grid and coefficient dimensions differ")
    basis = HermiteBasis(c.cutoff, grid)
    return GridFunction(grid, basis.synthesize(c.values))


def gaussian(grid):
    """The normalized Gaussian h(t) = 2^{d/4} exp(-pi |t|^2) on ``grid``."""
    pts = grid.points()
    vals = 2.0 ** (grid.dimension / 4) * np.exp(-np.pi * np.sum(pts**2, axis=-1))
    return GridFunction(grid, vals)
