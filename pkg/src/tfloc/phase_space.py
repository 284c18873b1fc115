"""Sampled short-time Fourier transforms, Gabor systems on separable
lattices aZ x bZ, frame bounds and dual windows, and modulation-space norms.

Everything here works in one dimension (d = 1).  The Hermite-diagonal routes
for d = 2 live in :mod:`tfloc.gamma` and :mod:`tfloc.operators`.

    V_g f(x, xi) = <f, pi(x, xi) g> = int f(t) conj(g(t - x)) e^{-2 pi i xi t} dt
"""

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .gamma import tau
from .hermite import (
    Grid,
    GridFunction,
    HermiteCoeffs,
    UnderResolvedError,
    hermite_coeffs,
    hermite_functions,
)
from .weights import RadialWeight, make_weight

DEFAULT_SPACING = 1.0 / 128
PHASE_HALF_WIDTH = 8.0
PHASE_SPACING = 1.0 / 16
BOUNDARY_TOL = 1e-8


class NotAFrameError(ValueError):
    """The Gabor system has (numerically) no positive lower frame bound."""


def default_grid(cutoff=64):
    """Time grid for phase-space work: L >= 8 covering h_cutoff, spacing 1/128."""
    L = max(PHASE_HALF_WIDTH, float(np.ceil(2.0 * np.sqrt(cutoff / np.pi))))
    return Grid(L, DEFAULT_SPACING)


def _require_1d(grid):
    if grid.dimension != 1:
        raise ValueError("phase-space routes are implemented for d = 1 only")


@dataclass(frozen=True)
class PhaseGrid:
    """Points -L_z + j delta, j = 0 .. 2 L_z / delta - 1, on both axes."""

    half_width: float = PHASE_HALF_WIDTH
    spacing: float = PHASE_SPACING

    def __post_init__(self):
        n = 2.0 * self.half_width / self.spacing
        if self.spacing <= 0 or abs(n - round(n)) > 1e-9 * n:
            raise ValueError("2 * half_width must be a positive multiple of spacing")

    @property
    def size(self):
        return int(round(2.0 * self.half_width / self.spacing))

    @property
    def axis(self):
        return -self.half_width + self.spacing * np.arange(self.size)

    def points(self):
        """Complex points x + i xi, shape (n_x, n_xi)."""
        ax = self.axis
        return ax[:, None] + 1j * ax[None, :]


@dataclass(frozen=True)
class PhaseField:
    """Samples F[j, m] of a function on phase space at (x_j, xi_m)."""

    grid: PhaseGrid
    values: np.ndarray

    @property
    def cell(self):
        return self.grid.spacing**2

    def points(self):
        return self.grid.points()

    def l2_norm(self):
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.cell))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "xi", "re", "im"])
        ax = self.grid.axis
        for j, x in enumerate(ax):
            for m, xi in enumerate(ax):
                v = self.values[j, m]
                w.writerow([repr(float(x)), repr(float(xi)), repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()


# -- windows -------------------------------------------------------------------

def as_function(f, grid=None):
    """Coerce HermiteCoeffs (or a GridFunction) to samples on ``grid``."""
    if isinstance(f, GridFunction):
        if grid is not None and f.grid != grid:
            raise ValueError("grid mismatch")
        return f
    if isinstance(f, HermiteCoeffs):
        grid = grid or default_grid(f.cutoff)
        H = hermite_functions(f.cutoff, grid.axis)
        return GridFunction(grid, f.values @ H)
    raise TypeError("expected GridFunction or HermiteCoeffs")


def _shift_samples(values, k):
    """values(t - k * spacing) with zero fill."""
    out = np.zeros_like(values)
    n = values.size
    if k >= 0:
        out[k:] = values[: n - k] if k < n else 0
    else:
        out[: n + k] = values[-k:] if -k < n else 0
    return out


def _shift_indices(grid, phase):
    ratio = phase.spacing / grid.spacing
    off = (phase.half_width) / grid.spacing
    if abs(ratio - round(ratio)) > 1e-9 or abs(off - round(off)) > 1e-9:
        raise ValueError("phase-grid spacing and half-width must be multiples of the time spacing")
    return -int(round(off)) + int(round(ratio)) * np.arange(phase.size)


def _fft_period(grid, phase):
    P = 1.0 / (phase.spacing * grid.spacing)
    if abs(P - round(P)) > 1e-9 * P:
        raise ValueError("1 / (delta * spacing) must be an integer")
    P = int(round(P))
    if phase.size > P:
        raise ValueError("frequency axis longer than one period of the sampled transform")
    return P


def _shifted_windows(g, phase):
    ks = _shift_indices(g.grid, phase)
    return np.array([_shift_samples(g.values, k) for k in ks])


def stft(f, g, phase=None):
    """Sampled V_g f on a phase grid.

    For each time shift x_j the product f(t) conj(g(t - x_j)) is transformed
    by one FFT of period 1/(delta * spacing); samples are weighted by the time
    spacing so that the Riemann sums reproduce Moyal's identity.
    """
    phase = phase or PhaseGrid()
    if isinstance(f, HermiteCoeffs):
        f = as_function(f, g.grid)
    if f.grid != g.grid:
        raise ValueError("signal and window live on different grids")
    _require_1d(f.grid)
    if not np.any(g.values):
        raise ValueError("window is identically zero")
    grid = f.grid
    P = _fft_period(grid, phase)
    t = grid.axis
    Lz, d = phase.half_width, phase.spacing
    G = _shifted_windows(g, phase)                              # (n_x, n_t)
    U = f.values[None, :] * np.conj(G) * np.exp(2j * np.pi * Lz * t)[None, :]
    n = t.size
    pad = (-n) % P
    U = np.pad(U, ((0, 0), (0, pad))).reshape(U.shape[0], -1, P).sum(axis=1)
    F = np.fft.fft(U, axis=1)[:, : phase.size]
    m = np.arange(phase.size)
    F *= grid.spacing * np.exp(2j * np.pi * m * d * grid.half_width)[None, :]
    return PhaseField(phase, F)


def istft(F, g, grid=None):
    """Synthesis f = delta^2 sum_z F(z) pi(z) g, samples on the window's grid."""
    grid = grid or g.grid
    if grid != g.grid:
        raise ValueError("synthesis grid must be the window grid")
    _require_1d(grid)
    phase = F.grid
    P = _fft_period(grid, phase)
    t = grid.axis
    Lz, d = phase.half_width, phase.spacing
    m = np.arange(phase.size)
    C = F.values * np.exp(-2j * np.pi * m * d * grid.half_width)[None, :]
    C = np.pad(C, ((0, 0), (0, P - phase.size)))
    S = np.fft.ifft(C, axis=1) * P                                # (n_x, P)
    k = np.arange(t.size) % P
    S = S[:, k] * np.exp(-2j * np.pi * Lz * t)[None, :]
    G = _shifted_windows(g, phase)
    vals = np.sum(S * G, axis=0) * phase.spacing**2
    return GridFunction(grid, vals)


# -- Gabor systems -------------------------------------------------------------

def _window_coeffs(g, cutoff=64):
    """Hermite coefficients of a window given as 'gaussian', coefficients or samples."""
    if isinstance(g, str):
        if g in ("gaussian", "h"):
            return HermiteCoeffs.unit(0, 0)
        raise ValueError(f"unknown window {g!r}")
    if isinstance(g, HermiteCoeffs):
        return g
    if isinstance(g, GridFunction):
        c = hermite_coeffs(g, cutoff)
        tail = abs(g.norm() ** 2 - c.norm() ** 2)
        if tail > 1e-10 * max(1.0, g.norm() ** 2):
            raise UnderResolvedError(f"window not captured by Hermite functions up to {cutoff}")
        return c
    raise TypeError("window must be 'gaussian', HermiteCoeffs or GridFunction")


@dataclass
class GaborSystem:
    """Gabor system G(g, aZ x bZ) truncated to lattice points in [-L, L]^2.

    The atoms pi(lambda) g are sampled on their own grid (half-width L + 4,
    spacing dividing a).  ``hermite_frame`` is the frame operator compressed
    to span{h_0 .. h_K}; its spectrum supplies the frame bounds.
    """

    window: HermiteCoeffs
    a: float
    b: float
    half_width: float
    grid: Grid
    lattice: np.ndarray            # complex lambda = ka + i lb, flat
    atoms: np.ndarray              # (n_lambda, n_t)
    hermite_cutoff: int
    hermite_frame: np.ndarray      # (K+1, K+1)
    bounds: tuple
    dual: Optional[GridFunction] = field(default=None, repr=False)
    dual_trace: Optional[object] = field(default=None, repr=False)

    @property
    def window_samples(self):
        return as_function(self.window, self.grid)

    def analysis(self, f):
        return np.conj(self.atoms) @ f.values * self.grid.spacing

    def synthesis(self, c):
        return GridFunction(self.grid, self.atoms.T @ c)

    def frame_operator(self, f):
        """S f, computed as the multiplier with m = 1 (same code path)."""
        return gabor_multiplier_apply(self, None, f)

    def sample(self, f):
        return as_function(f, self.grid)


def _atom_grid(a, L):
    per = max(1, int(np.ceil(32.0 * a)))
    spacing = a / per
    half = spacing * np.ceil((L + 4.0) / spacing)
    return Grid(half, spacing)


def _lattice(a, b, L):
    ks = np.arange(-int(np.floor(L / a + 1e-12)), int(np.floor(L / a + 1e-12)) + 1) * a
    ls = np.arange(-int(np.floor(L / b + 1e-12)), int(np.floor(L / b + 1e-12)) + 1) * b
    X, Xi = np.meshgrid(ks, ls, indexing="ij")
    return (X + 1j * Xi).ravel()


def _atoms(window, grid, lattice):
    t = grid.axis
    x, xi = lattice.real, lattice.imag
    H = hermite_functions(window.cutoff, t[None, :] - x[:, None])    # (Kg+1, n_l, n_t)
    shifted = np.tensordot(window.values, H, axes=(0, 0))
    return np.exp(2j * np.pi * xi[:, None] * t[None, :]) * shifted


def _compressed_frame(atoms, grid, cutoff):
    Hm = hermite_functions(cutoff, grid.axis)
    A = np.conj(atoms) @ Hm.T * grid.spacing                           # <h_i, pi(lambda) g>
    S = A.conj().T @ A
    return 0.5 * (S + S.conj().T), A


def frame_bounds_at(system_or_atoms, grid, cutoff):
    S, _ = _compressed_frame(system_or_atoms, grid, cutoff)
    ev = np.linalg.eigvalsh(S)
    return float(ev[0]), float(ev[-1])


def gabor_system(g="gaussian", a=0.5, b=0.5, L=8.0, hermite_cutoff=64, dual=True, tol=1e-13):
    """Build the truncated Gabor system and its canonical dual window.

    Raises :class:`NotAFrameError` when the lower frame bound collapses: the
    compressed bound A_K drops below 3/4 of A_{K/2} when the Hermite span
    doubles, or A/B < 1e-6.
    """
    if a <= 0 or b <= 0:
        raise ValueError("lattice parameters must be positive")
    w = _window_coeffs(g)
    nrm = w.norm()
    if nrm == 0:
        raise ValueError("window is identically zero")
    w = w * (1.0 / nrm)
    grid = _atom_grid(a, L)
    lattice = _lattice(a, b, L)
    atoms = _atoms(w, grid, lattice)
    K = hermite_cutoff
    S, _ = _compressed_frame(atoms, grid, K)
    ev = np.linalg.eigvalsh(S)
    A, B = float(ev[0]), float(ev[-1])
    A_half = float(np.linalg.eigvalsh(S[: K // 2 + 1, : K // 2 + 1])[0])
    if A <= 0 or A / B < 1e-6 or A < 0.75 * A_half:
        raise NotAFrameError(
            f"G(g, {a:g}Z x {b:g}Z) is not a frame: lower bound {A:.3g} "
            f"(was {A_half:.3g} on half the Hermite span), upper bound {B:.3g}"
        )
    system = GaborSystem(w, a, b, L, grid, lattice, atoms, K, S, (A, B))
    if dual:
        system.dual, system.dual_trace = dual_window(system, tol=tol)
    return system


def frame_bounds(system):
    """(A, B): extreme eigenvalues of the Hermite-compressed frame operator."""
    return system.bounds


def dual_window(system, tol=1e-13):
    """gamma = S^{-1} g by conjugate gradients on the sampled frame operator."""
    from .krylov import pcg

    g = system.window_samples
    x, trace = pcg(lambda v: system.frame_operator(GridFunction(system.grid, v)).values,
                   g.values, tol=tol, maxiter=2000)
    return GridFunction(system.grid, x), trace


def gabor_coeffs(f, system):
    """c_lambda = <f, pi(lambda) g> over the truncated lattice."""
    return system.analysis(system.sample(f))


def gabor_reconstruct(c, system):
    """sum_lambda c_lambda pi(lambda) gamma with the canonical dual window."""
    if system.dual is None:
        system.dual, system.dual_trace = dual_window(system)
    grid = system.grid
    t = grid.axis
    lam = system.lattice
    ks = np.rint(lam.real / grid.spacing).astype(int)
    out = np.zeros(t.size, dtype=complex)
    gam = system.dual.values
    for x_shift in np.unique(ks):
        sel = ks == x_shift
        mod = np.exp(2j * np.pi * lam.imag[sel][:, None] * t[None, :])
        out += _shift_samples(gam, int(x_shift)) * (c[sel] @ mod)
    return GridFunction(grid, out)


def gabor_multiplier_apply(system, m, f):
    """G_m f = sum_lambda m(lambda) <f, pi(lambda) g> pi(lambda) g (gamma = g).

    ``m=None`` means m = 1; a callable is evaluated at the lattice points and
    an array is taken as the values m(lambda) directly.
    """
    f = system.sample(f)
    c = system.analysis(f)
    if m is not None:
        c = c * lattice_values(m, system.lattice)
    return system.synthesis(c)


def lattice_values(m, lattice):
    if callable(m):
        return np.asarray(m(lattice), dtype=float)
    vals = np.asarray(m, dtype=float)
    if vals.shape != lattice.shape:
        raise ValueError("multiplier values do not match the lattice")
    return vals


# -- modulation norms ----------------------------------------------------------

@dataclass(frozen=True)
class ModNormResult:
    value: float
    method: str
    params: dict

    def to_dict(self):
        return {"value": self.value, "method": self.method, **self.params}


def _lp(a, p, axis, cell):
    if np.isinf(p):
        return np.max(a, axis=axis)
    return (np.sum(a**p, axis=axis) * cell) ** (1.0 / p)


def _weight(m):
    if m is None:
        return make_weight("constant")
    return make_weight(m) if not isinstance(m, RadialWeight) else m


def mixed_norm(F, p, q, m=None, check=True):
    """||F m||_{L^{p,q}}: inner p-norm over x, outer q-norm over xi."""
    m = _weight(m)
    z = F.points()
    W = np.abs(F.values) * m(z)
    if check:
        ax = F.grid.axis
        edge = np.maximum(np.abs(ax)[:, None], np.abs(ax)[None, :]) >= F.grid.half_width - 1.0
        tot = np.sum(W**2)
        if tot > 0 and np.sum(W[edge] ** 2) > BOUNDARY_TOL * tot:
            raise UnderResolvedError(
                "phase grid too small: boundary mass "
                f"{np.sum(W[edge] ** 2) / tot:.2e} of the total exceeds {BOUNDARY_TOL:g}"
            )
    d = F.grid.spacing
    inner = _lp(W, p, 0, d)
    return float(_lp(inner, q, 0, d))


def mod_norm_grid(f, p=2, q=None, m=None, g=None, phase=None):
    """||f||_{M^{p,q}_m} as a Riemann sum of V_g f over the phase grid."""
    q = p if q is None else q
    for e in (p, q):
        if not (e >= 1):
            raise ValueError("p and q must lie in [1, inf]")
    if isinstance(f, HermiteCoeffs):
        f = as_function(f)
    if g is None:
        g = as_function(HermiteCoeffs.unit(0, 0), f.grid)
    F = stft(f, g, phase)
    m = _weight(m)
    val = mixed_norm(F, p, q, m)
    return ModNormResult(val, "grid", {"p": p, "q": q, "weight": m.name,
                                       "delta": F.grid.spacing, "L_z": F.grid.half_width})


def mod_norm_frame(f, p, m, system, q=None):
    """Weighted l^p norm of the Gabor coefficients (p = q only)."""
    if q is not None and q != p:
        raise ValueError("lattice norms are available for p = q only")
    m = _weight(m)
    c = np.abs(gabor_coeffs(f, system)) * m(system.lattice)
    val = float(np.max(c)) if np.isinf(p) else float(np.sum(c**p) ** (1.0 / p))
    return ModNormResult(val, "frame", {"p": p, "q": p, "weight": m.name,
                                        "a": system.a, "b": system.b})


def mod_norm_hermite(f, theta):
    """sqrt(sum |c_alpha|^2 tau_alpha(theta^2))."""
    theta = _weight(theta)
    if isinstance(f, GridFunction):
        raise TypeError("mod_norm_hermite takes HermiteCoeffs")
    th2 = theta**2
    total = 0.0
    for idx in zip(*np.nonzero(f.values)):
        total += abs(f.values[idx]) ** 2 * tau(th2, idx, 1.0)
    return ModNormResult(float(np.sqrt(total)), "hermite",
                         {"p": 2, "q": 2, "weight": theta.name, "cutoff": f.cutoff})


def analytic_agreement(cutoff=16, radius=3.0, floor=1e-8, phase=None):
    """Sampled |V_h h_n| against the closed form for n <= cutoff on |z| <= radius.

    Returns (max relative error where the closed form is >= floor, max
    absolute error everywhere on the disc).  Near z = 0 the closed form
    vanishes like |z|^n, so relative errors there carry no information.
    """
    from .hermite import stft_hermite_analytic

    g = as_function(HermiteCoeffs.unit(0, 0), default_grid(cutoff))
    rel, ab = 0.0, 0.0
    for n in range(cutoff + 1):
        F = stft(as_function(HermiteCoeffs.unit(n, n), g.grid), g, phase)
        z = F.points()
        disc = np.abs(z) <= radius
        ref = np.abs(stft_hermite_analytic(n, z[disc]))
        err = np.abs(np.abs(F.values[disc]) - ref)
        ab = max(ab, float(err.max()))
        big = ref >= floor
        rel = max(rel, float(np.max(err[big] / ref[big])))
    return rel, ab
