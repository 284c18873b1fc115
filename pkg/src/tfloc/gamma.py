"""Weighted gamma functions

    tau_{alpha,s}(theta) = int theta0(sqrt(u_1/pi), ..., sqrt(u_d/pi))^s
                               prod_j u_j^{alpha_j} e^{-u_j} / alpha_j!  du,

the eigenvalues of the canonical localization operator J_{theta^s} on the
Hermite function h_alpha, plus the product-inequality scans built on them.

Two quadrature routes, both evaluated in the log domain:

* ``laguerre``: generalized Gauss-Laguerre rule for the weight u^n e^{-u}
  (Golub-Welsch), used while every alpha_j <= 64.
* ``legendre``: Gauss-Legendre in w = sqrt(u) on a window around the
  Gamma(n + 1) bulk, [max(0, mu - 12 sigma), mu + 12 sigma] with
  mu = n + 1, sigma = sqrt(n + 1), widened until the integrand has
  dropped by e^{-40} at both open ends.

Node counts start at 200 per coordinate and double until two successive
values agree to ``rtol``.  If the Laguerre rule stalls (weights that are
not smooth in u, e.g. e^{a |z|^b}, converge only algebraically for small
n) the Legendre route takes over.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, logsumexp

from .hermite import multi_indices
from .weights import make_weight
from .quadrature import QuadratureError, gauss_laguerre, gauss_legendre

LAGUERRE_MAX_DEGREE = 64
START_NODES = 200
MAX_LAGUERRE_NODES = 400
MAX_LEGENDRE_NODES = 6400
_TAIL_DROP = 40.0


@dataclass(frozen=True)
class TauValue:
    value: float
    log_value: float
    error: float
    nodes: int
    method: str


def _laguerre_rule(n, k):
    u, logw = gauss_laguerre(k, float(n))
    return u, logw


def _legendre_window(n, log_tilt):
    """Window in u for the Legendre route, widened for heavy integrands."""
    mu, sigma = n + 1.0, np.sqrt(n + 1.0)
    lo, hi = max(0.0, mu - 12.0 * sigma), mu + 12.0 * sigma

    def logf(u):
        u = np.maximum(u, 1e-300)
        return n * np.log(u) - u + log_tilt(u)

    peak = max(logf(np.array([mu]))[0], logf(np.array([max(n, 1e-3)]))[0])
    for _ in range(60):
        if logf(np.array([hi]))[0] > peak - _TAIL_DROP:
            hi += 6.0 * sigma
        else:
            break
    for _ in range(60):
        if lo > 0 and logf(np.array([lo]))[0] > peak - _TAIL_DROP:
            lo = max(0.0, lo - 6.0 * sigma)
        else:
            break
    return lo, hi


def _legendre_rule(n, k, window):
    """Nodes u and log-weights for int (.) u^n e^{-u}/n! du via w = sqrt(u)."""
    lo, hi = window
    w, ww = gauss_legendre(k, np.sqrt(lo), np.sqrt(hi))
    u = w * w
    logw = np.log(ww) + np.log(2.0) + (2 * n + 1) * np.log(w) - u - gammaln(n + 1)
    return u, logw


def _tensor_log_tau(log_theta, rules, s):
    """log of sum over the tensor rule of exp(logw + s log theta)."""
    if len(rules) == 1:
        u, logw = rules[0]
        r = np.sqrt(u / np.pi)[:, None]
        return logsumexp(logw + s * log_theta(r))
    (u1, lw1), (u2, lw2) = rules
    r1 = np.sqrt(u1 / np.pi)
    r2 = np.sqrt(u2 / np.pi)
    R = np.stack(np.meshgrid(r1, r2, indexing="ij"), axis=-1)
    logw = lw1[:, None] + lw2[None, :]
    return logsumexp(logw + s * log_theta(R))


def _run(route, alpha, theta, s, rtol, k0, k_max):
    log_theta = theta.log_radial
    windows = None
    if route == "legendre":
        windows = [
            _legendre_window(a, lambda u, j=j: s * _axis_tilt(theta, u, j)) for j, a in enumerate(alpha)
        ]

    def estimate(k):
        if route == "laguerre":
            rules = [_laguerre_rule(a, k) for a in alpha]
        else:
            rules = [_legendre_rule(a, k, win) for a, win in zip(alpha, windows)]
        return _tensor_log_tau(log_theta, rules, s)

    k = k0
    err = np.inf
    prev = estimate(k)
    while 2 * k <= k_max:
        k *= 2
        cur = estimate(k)
        err = abs(np.expm1(cur - prev))
        if err <= rtol:
            return TauValue(float(np.exp(cur)), float(cur), float(err), k, route)
        prev = cur
    raise QuadratureError(
        f"{route} quadrature for alpha={alpha}, s={s} did not reach rtol={rtol:g} with {k} nodes",
        estimate=float(np.exp(prev)),
        error=float(err),
    )


def _axis_tilt(theta, u, j):
    """log theta along coordinate j with the other radii at 0 (window sizing only)."""
    r = np.zeros(np.shape(u) + (theta.dimension,))
    r[..., j] = np.sqrt(np.asarray(u) / np.pi)
    return theta.log_radial(r)


def tau_detail(theta, alpha, s=1.0, rtol=1e-11, nodes=START_NODES, method="auto"):
    """tau_{alpha,s}(theta) with its quadrature metadata."""
    theta = make_weight(theta)
    d = theta.dimension
    if np.isscalar(alpha):
        alpha = (alpha,)
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != d:
        raise ValueError("multi-index does not match weight dimension")
    if min(alpha) < 0:
        raise ValueError("multi-index entries must be >= 0")
    if s == 0:
        return TauValue(1.0, 0.0, 0.0, 0, "exact")
    use_laguerre = method == "laguerre" or (method == "auto" and max(alpha) <= LAGUERRE_MAX_DEGREE)
    if use_laguerre:
        try:
            return _run("laguerre", alpha, theta, s, rtol, nodes, MAX_LAGUERRE_NODES
                        if method == "auto" else 4 * MAX_LAGUERRE_NODES)
        except QuadratureError:
            if method == "laguerre":
                raise
    return _run("legendre", alpha, theta, s, rtol, nodes, MAX_LEGENDRE_NODES)


def tau(theta, alpha, s=1.0, **kw):
    """Weighted gamma function tau_{alpha,s}(theta) (a positive float)."""
    return tau_detail(theta, alpha, s, **kw).value


@dataclass
class TauSpectrum:
    """tau_{alpha,s}(theta) for every multi-index alpha_j <= cutoff."""

    weight_name: str
    exponent: float
    dimension: int
    cutoff: int
    values: np.ndarray
    errors: np.ndarray
    nodes: np.ndarray
    methods: np.ndarray = field(repr=False)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["alpha", "s", "tau", "est_error"])
        for idx in multi_indices(self.cutoff, self.dimension):
            a = idx[0] if self.dimension == 1 else "(" + ";".join(map(str, idx)) + ")"
            w.writerow([a, repr(float(self.exponent)), repr(float(self.values[idx])),
                        repr(float(self.errors[idx]))])
        return buf.getvalue()


def tau_spectrum(theta, s, cutoff, **kw):
    theta = make_weight(theta)
    d = theta.dimension
    shape = (cutoff + 1,) * d
    vals = np.empty(shape)
    errs = np.empty(shape)
    nodes = np.empty(shape, dtype=int)
    methods = np.empty(shape, dtype=object)
    for idx in multi_indices(cutoff, d):
        t = tau_detail(theta, idx, s, **kw)
        vals[idx], errs[idx], nodes[idx], methods[idx] = t.value, t.error, t.nodes, t.method
    return TauSpectrum(theta.name, s, d, cutoff, vals, errs, nodes, methods)


@dataclass
class ProductScan:
    """gamma(alpha) = tau_{alpha,s} tau_{alpha,t} tau_{alpha,-s-t} over alpha <= cutoff.

    Running extrema follow the order of ``multi_indices`` (by n for d = 1).
    """

    s: float
    t: float
    gamma: np.ndarray
    running_sup: np.ndarray
    running_inf: np.ndarray

    @property
    def sup(self):
        return float(self.running_sup[-1])

    @property
    def inf(self):
        return float(self.running_inf[-1])

    def plateau_change(self, start):
        """Relative growth of the running sup from flat index ``start`` to the end."""
        return float(self.running_sup[-1] / self.running_sup[start] - 1.0)

    def floor_change(self, start):
        return float(1.0 - self.running_inf[-1] / self.running_inf[start])


def product_inequality_scan(theta, s, t, cutoff, **kw):
    theta = make_weight(theta)
    spectra = {e: tau_spectrum(theta, e, cutoff, **kw).values for e in {s, t, -s - t}}
    g = (spectra[s] * spectra[t] * spectra[-s - t]).ravel()
    return ProductScan(s, t, g.reshape(spectra[s].shape),
                       np.maximum.accumulate(g), np.minimum.accumulate(g))


def vst_condition(theta, s, t, cutoff, **kw):
    """sup gamma / inf gamma: the condition number of J_{theta^s} J_{theta^t}
    J_{theta^{-s-t}} restricted to the Hermite truncation."""
    scan = product_inequality_scan(theta, s, t, cutoff, **kw)
    return scan.sup / scan.inf
