"""Localization operators, the canonical Hermite-diagonal operators J_theta,
compositions, and time-frequency kernel diagnostics.

Operators act on the Hermite truncation span{h_0 .. h_N}; matrix entries are
M[beta, alpha] = <T h_alpha, h_beta>.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import gammaln

from .gamma import tau_spectrum
from .hermite import GridFunction, HermiteCoeffs, UnderResolvedError, stft_hermite_table
from .phase_space import (  # noqa: F401  (gabor_multiplier_apply is part of this module's API)
    PhaseGrid,
    as_function,
    default_grid,
    gabor_multiplier_apply,
    stft,
)
from .quadrature import polar_rule_sqrt
from .weights import RadialWeight, make_weight

_TAIL = 36.0          # integrand must drop by e^{-36} at the edge of the disc
_MAX_RADIUS = 64.0


class TailError(UnderResolvedError):
    """The integration domain cannot contain the integrand's mass."""


@dataclass
class DenseOperator:
    matrix: np.ndarray
    basis: tuple = ("hermite", None)
    provenance: str = ""

    @property
    def cutoff(self):
        return self.matrix.shape[0] - 1

    def apply(self, c):
        if isinstance(c, HermiteCoeffs):
            return HermiteCoeffs(self.matrix @ c.resize(self.cutoff).values)
        return self.matrix @ c

    def hermitian_defect(self):
        M = self.matrix
        return float(np.max(np.abs(M - M.conj().T)) / max(np.max(np.abs(M)), 1e-300))

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", "col", "re", "im"])
        for (i, j), v in np.ndenumerate(self.matrix):
            w.writerow([i, j, repr(float(v.real)), repr(float(v.imag))])
        return buf.getvalue()


@dataclass
class DiagonalOperator:
    """Operator diagonal in the Hermite basis (d = 1 or 2)."""

    spectrum: object        # TauSpectrum
    provenance: str = ""

    @property
    def eigenvalues(self):
        return self.spectrum.values

    @property
    def cutoff(self):
        return self.spectrum.cutoff

    @property
    def matrix(self):
        return np.diag(self.eigenvalues.ravel()).astype(complex)

    def apply(self, c):
        if isinstance(c, HermiteCoeffs):
            return HermiteCoeffs(self.eigenvalues * c.resize(self.cutoff).values, c.dimension)
        return self.eigenvalues.ravel() * c


def _weight_log(m):
    """Vectorized log m(z) for a RadialWeight, spec, or callable."""
    if isinstance(m, (RadialWeight, str, dict)):
        w = make_weight(m)
        return w.log, w.name
    if callable(m):
        return (lambda z: np.log(np.asarray(m(z), dtype=float))), getattr(m, "__name__", "callable")
    if m is None:
        return (lambda z: np.zeros(np.shape(z))), "constant"
    raise TypeError("weight must be a RadialWeight, spec or callable")


def _radius_for(logm, cutoff):
    """Disc radius beyond which |V_h h_n|^2 m is negligible for all n <= cutoff."""
    r = np.linspace(0.0, _MAX_RADIUS, 4097)
    phis = np.linspace(0, 2 * np.pi, 17)[:-1]
    lm = np.max([logm(r * np.exp(1j * p)) for p in phis], axis=0)
    n = np.arange(cutoff + 1)[:, None]
    lr = np.log(np.maximum(np.pi * r * r, 1e-300))
    f = n * lr[None, :] - gammaln(n + 1) - np.pi * r * r + lm[None, :]
    env = np.max(f, axis=0)
    big = np.flatnonzero(env >= np.max(env) - _TAIL)
    start = big[-1] + 1
    if start >= r.size:
        raise TailError(f"weight grows too fast: integrand still significant at |z| = {_MAX_RADIUS}")
    return float(r[start])


def localization_matrix(g, m, cutoff, phase=None, n_angle=None):
    """Truncated A^g_m with entries int m(z) V_g h_alpha(z) conj(V_g h_beta(z)) dz.

    For the Gaussian window the closed-form STFT of Hermite functions is
    integrated with a polar rule (radius mapped to sqrt(r)); any other window
    goes through the sampled STFT on a phase grid with Riemann weights.
    """
    logm, name = _weight_log(m)
    if g is None or (isinstance(g, str) and g in ("gaussian", "h")):
        R = _radius_for(logm, cutoff)
        nphi = n_angle or (2 * cutoff + 64)
        z, w = polar_rule_sqrt(R, nphi)
        V = stft_hermite_table(cutoff, z)                           # (N+1, Q)
        wm = w * np.exp(logm(z))
        M = (np.conj(V) * wm[None, :]) @ V.T
        prov = f"localization(gaussian, {name}, polar R={R:.3g})"
    else:
        phase = phase or PhaseGrid()
        if phase.spacing > 1.0 / 8:
            raise ValueError("phase spacing must be <= 1/8 for sampled localization operators")
        if isinstance(g, HermiteCoeffs):
            win = as_function(g * (1.0 / g.norm()), default_grid(max(cutoff, g.cutoff)))
        elif isinstance(g, GridFunction):
            win = g * (1.0 / g.norm())
        else:
            raise TypeError("window must be 'gaussian', HermiteCoeffs or GridFunction")
        Vs = []
        for n in range(cutoff + 1):
            F = stft(as_function(HermiteCoeffs.unit(n, n), win.grid), win, phase)
            Vs.append(F.values.ravel())
        V = np.array(Vs)
        zz = phase.points().ravel()
        mz = np.exp(logm(zz))
        mass = np.abs(V) ** 2 * mz[None, :]
        ax = phase.axis
        edge = (np.maximum(np.abs(ax)[:, None], np.abs(ax)[None, :]) >= phase.half_width - 1.0).ravel()
        if np.sum(mass[:, edge]) > 1e-10 * np.sum(mass):
            raise TailError("phase grid too small for the weight's growth")
        M = (np.conj(V) * (mz * phase.spacing**2)[None, :]) @ V.T
        prov = f"localization(sampled window, {name}, delta={phase.spacing:g})"
    return DenseOperator(M, ("hermite", cutoff), prov)


def canonical_diagonal(theta, cutoff):
    """J_theta: eigenvalue tau_alpha(theta) on h_alpha (no phase-space quadrature)."""
    theta = make_weight(theta)
    return DiagonalOperator(tau_spectrum(theta, 1.0, cutoff), f"J({theta.name})")


def identity(cutoff):
    return DenseOperator(np.eye(cutoff + 1, dtype=complex), ("hermite", cutoff), "identity")


def compose(A, B):
    """A o B as a dense matrix on the common truncation."""
    MA, MB = A.matrix, B.matrix
    if MA.shape != MB.shape:
        raise ValueError(f"shape mismatch: {MA.shape} vs {MB.shape}")
    return DenseOperator(MA @ MB, ("hermite", MA.shape[0] - 1),
                         f"({getattr(A, 'provenance', '')}) o ({getattr(B, 'provenance', '')})")


# -- time-frequency kernels -----------------------------------------------------

@dataclass
class TFKernel:
    """K(y, z) = <T pi(z) h, pi(y) h> on a square phase lattice and its
    offset envelope H(w) = max_{y - z = w} |K(y, z)|."""

    points: np.ndarray          # complex, flat
    spacing: float
    values: np.ndarray          # K[y, z]
    offsets: np.ndarray         # complex offsets on the (2n-1)^2 grid
    envelope: np.ndarray        # H on that grid (nan where no pair)
    constancy: float = field(default=np.nan)  # max spread of |K| within one offset

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["y", "z", "absK"])
        for i, y in enumerate(self.points):
            for j, z in enumerate(self.points):
                w.writerow([f"{y.real:.6g}{y.imag:+.6g}j", f"{z.real:.6g}{z.imag:+.6g}j",
                            repr(float(abs(self.values[i, j])))])
        return buf.getvalue()


def probe_points(cutoff, spacing=0.25, radius=None):
    """Square lattice points inside |z| <= radius (default sqrt(N/pi)/2)."""
    radius = np.sqrt(cutoff / np.pi) / 2.0 if radius is None else radius
    k = int(np.floor(radius / spacing))
    ax = spacing * np.arange(-k, k + 1)
    Z = (ax[:, None] + 1j * ax[None, :]).ravel()
    return Z[np.abs(Z) <= radius + 1e-12], k


def shift_coefficients(cutoff, z):
    """Hermite coefficients <pi(z) h, h_alpha> = conj(V_h h_alpha(z)), shape (N+1, nz)."""
    return np.conj(stft_hermite_table(cutoff, np.asarray(z)))


def tf_kernel(T, cutoff=None, spacing=0.25, radius=None, tail_tol=1e-6):
    """Time-frequency kernel of a Hermite-basis operator against the Gaussian."""
    M = T.matrix
    N = M.shape[0] - 1 if cutoff is None else cutoff
    if M.shape[0] != N + 1:
        raise ValueError("operator truncation does not match cutoff")
    pts, k = probe_points(N, spacing, radius)
    C = shift_coefficients(N, pts)
    tail = np.sqrt(np.maximum(0.0, 1.0 - np.sum(np.abs(C) ** 2, axis=0)))
    if np.max(tail) > tail_tol:
        raise TailError(f"pi(z)h leaves the Hermite span: tail {np.max(tail):.2e} > {tail_tol:g}")
    K = C.conj().T @ M @ C
    # offset envelope
    iy = np.rint(pts.real / spacing).astype(int)
    jy = np.rint(pts.imag / spacing).astype(int)
    di = (iy[:, None] - iy[None, :]) + 2 * k
    dj = (jy[:, None] - jy[None, :]) + 2 * k
    n = 4 * k + 1
    flat = (di * n + dj).ravel()
    absK = np.abs(K).ravel()
    H = np.full(n * n, -np.inf)
    Hmin = np.full(n * n, np.inf)
    np.maximum.at(H, flat, absK)
    np.minimum.at(Hmin, flat, absK)
    seen = np.isfinite(H)
    spread = float(np.max(H[seen] - Hmin[seen]))
    H = np.where(seen, H, np.nan).reshape(n, n)
    ax = spacing * np.arange(-2 * k, 2 * k + 1)
    offsets = ax[:, None] + 1j * ax[None, :]
    return TFKernel(pts, spacing, K, offsets, H, spread)


@dataclass
class EnvelopeCheck:
    passed: bool
    tail_sums: np.ndarray
    shell_radii: np.ndarray
    tail_fraction: float
    decay_exponent: float
    decay_rate: float
    domination_constant: float = np.nan
    dominated: bool = True

    def to_dict(self):
        return {"passed": self.passed, "tail_fraction": self.tail_fraction,
                "decay_exponent": self.decay_exponent, "decay_rate": self.decay_rate,
                "domination_constant": self.domination_constant, "dominated": self.dominated,
                "tail_sums": [float(x) for x in self.tail_sums]}


def envelope_check(kernel, v, tail_threshold=1e-3):
    """Weighted l^1 tail of H v over radial shells, and a decay fit.

    Pass iff the shell tail sums strictly decrease and the outermost shell
    carries less than ``tail_threshold`` of the total mass.  The decay fit is
    H(w) ~ H(0) exp(-c |w|^kappa), fitted for 1 <= |w|.
    """
    v = make_weight(v)
    w = kernel.offsets
    H = kernel.envelope
    ok = np.isfinite(H)
    r = np.abs(w[ok])
    hv = H[ok] * v(w[ok]) * kernel.spacing**2
    shell = np.floor(r / kernel.spacing + 1e-9).astype(int)
    nsh = shell.max() + 1
    per_shell = np.bincount(shell, weights=hv, minlength=nsh)
    tails = np.cumsum(per_shell[::-1])[::-1]
    total = tails[0]
    strictly = bool(np.all(np.diff(tails) < 0))
    outer = tails[int(0.75 * nsh)] / total
    h0 = np.nanmax(H)
    sel = (r >= 1.0) & (H[ok] < h0)
    if np.count_nonzero(sel) >= 3:
        y = np.log(-np.log(H[ok][sel] / h0))
        x = np.log(r[sel])
        kappa, logc = np.polyfit(x, y, 1)
        rate = float(np.exp(logc))
    else:
        kappa, rate = np.nan, np.nan
    passed = strictly and outer < tail_threshold
    return EnvelopeCheck(passed, tails, kernel.spacing * np.arange(nsh), float(outer),
                         float(kappa), rate)


def dominating_convolution(v, H0, spacing, G=None, pad=6.0):
    """(G * (v H0) * G^*)(w) on a square grid, returned with its offsets.

    ``H0`` is an envelope sampled on an offset grid of the given spacing
    (nan entries count as 0); G defaults to |V_h h| = exp(-pi |w|^2 / 2).
    """
    v = make_weight(v)
    H0 = np.nan_to_num(np.asarray(H0, dtype=float))
    n0 = H0.shape[0]
    k0 = n0 // 2
    kp = int(np.ceil(pad / spacing))
    k = k0 + kp
    ax = spacing * np.arange(-k, k + 1)
    W = ax[:, None] + 1j * ax[None, :]
    Hbig = np.zeros(W.shape)
    Hbig[kp:kp + n0, kp:kp + n0] = H0
    Gw = np.exp(-np.pi * np.abs(W) ** 2 / 2.0) if G is None else G(W)
    Gstar = Gw[::-1, ::-1]
    inner = v(W) * Hbig
    D = fftconvolve(fftconvolve(Gw, inner, mode="same"), Gstar, mode="same") * spacing**4
    return W, D


def domination_check(kernel, m, H0, power=1.0):
    """max over probed offsets of H(w) / (G * (v_m^power H0) * G^*)(w).

    v_m is the submultiplicative envelope of m.  The composition
    A_{1/m} A_m has |K(y, z)| <= (G * (v_m G) * G^*)(y - z) because
    m(u') / m(u) <= v_m(u' - u), so the constant should not exceed 1.
    """
    m = make_weight(m)
    v = m.envelope() if power == 1.0 else m.envelope() ** power
    W, D = dominating_convolution(v, H0, kernel.spacing)
    n = kernel.envelope.shape[0]
    k = (W.shape[0] - n) // 2
    Dc = D[k:k + n, k:k + n]
    ok = np.isfinite(kernel.envelope)
    ratio = kernel.envelope[ok] / Dc[ok]
    return float(np.max(ratio)), Dc
