"""Radial phase-space weights, their submultiplicative envelopes, and
moderateness / GRS diagnostics.

A weight on phase space R^{2d} ~ C^d is stored through its radial profile:
m(z) = m0(|z_1|, ..., |z_d|).  Every evaluation runs in the log domain.
"""

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

FAMILY_ALIASES = {
    "polynomial": "polynomial",
    "poly": "polynomial",
    "peetre": "peetre",
    "subexponential": "subexponential",
    "subexp": "subexponential",
    "loglin": "loglin",
    "exponential": "exponential",
    "exp": "exponential",
    "constant": "constant",
    "const": "constant",
}

_N_PARAMS = {
    "polynomial": 1,
    "peetre": 1,
    "subexponential": 2,
    "loglin": 1,
    "exponential": 1,
    "constant": 0,
}


class GRSError(ValueError):
    """The envelope violates the GRS condition v(nz)^{1/n} -> 1."""


def _family_log(family, params, rho):
    if family == "constant":
        return np.zeros_like(rho)
    if family == "polynomial":
        (s,) = params
        return 0.5 * s * np.log1p(rho * rho)
    if family == "peetre":
        (s,) = params
        return s * np.log1p(rho)
    if family == "subexponential":
        a, b = params
        return a * rho**b
    if family == "loglin":
        (a,) = params
        return a * rho / np.log(np.e + rho)
    if family == "exponential":
        (a,) = params
        return a * rho
    raise ValueError(f"unknown weight family {family!r}")


def _family_envelope(family, params):
    if family == "constant":
        return ("constant", ())
    if family == "polynomial":
        return ("peetre", (abs(params[0]),))
    if family == "peetre":
        return ("peetre", (abs(params[0]),))
    if family == "subexponential":
        return ("subexponential", (abs(params[0]), params[1]))
    if family in ("loglin", "exponential"):
        return (family, (abs(params[0]),))
    raise ValueError(family)


@dataclass(frozen=True)
class RadialWeight:
    """A positive weight m(z) = c * m0(|z_1|, ..., |z_d|)^power.

    ``family`` is one of polynomial(s), peetre(s), subexponential(a, b),
    loglin(a), exponential(a), constant, product (per-coordinate factors) or
    profile (a user callable).  For families, |z| is the full Euclidean
    norm on C^d.  ``profile`` receives the radii with trailing axis d
    (squeezed when d = 1) and must return m0 (or log m0 with ``log=True``).
    """

    family: str
    params: tuple = ()
    dimension: int = 1
    power: float = 1.0
    log_scale: float = 0.0
    factors: tuple = ()
    profile: Optional[Callable] = field(default=None, compare=False)
    profile_is_log: bool = False
    envelope_weight: Optional["RadialWeight"] = field(default=None, compare=False)
    label: Optional[str] = None

    def __post_init__(self):
        fam = FAMILY_ALIASES.get(self.family, self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.dimension not in (1, 2):
            raise ValueError("dimension must be 1 or 2")
        if fam in _N_PARAMS:
            if len(self.params) != _N_PARAMS[fam]:
                raise ValueError(f"{fam} takes {_N_PARAMS[fam]} parameter(s), got {self.params}")
            if fam == "subexponential":
                a, b = self.params
                if not 0.0 < b < 1.0:
                    raise ValueError("subexponential weights need 0 < b < 1")
            if fam in ("subexponential", "loglin", "exponential") and self.params[0] < 0:
                raise ValueError("growth parameter a must be >= 0")
        elif fam == "product":
            if len(self.factors) != self.dimension:
                raise ValueError("product weight needs one 1-D factor per coordinate")
            if any(f.dimension != 1 for f in self.factors):
                raise ValueError("product factors must be 1-D weights")
        elif fam == "profile":
            if self.profile is None:
                raise ValueError("profile weights need a callable profile")
        else:
            raise ValueError(f"unknown weight family {self.family!r}")
        if not np.isfinite(self.power) or not np.isfinite(self.log_scale):
            raise ValueError("power and scale must be finite")

    # -- construction -------------------------------------------------
    @classmethod
    def from_profile(cls, m0, dimension=1, envelope=None, log=False, label=None):
        return cls("profile", (), dimension, profile=m0, profile_is_log=log,
                   envelope_weight=envelope, label=label)

    @classmethod
    def product_of(cls, *factors):
        return cls("product", (), len(factors), factors=tuple(factors))

    def __pow__(self, p):
        return replace(self, power=self.power * p, log_scale=self.log_scale * p)

    def scaled(self, c):
        if c <= 0:
            raise ValueError("scale must be positive")
        return replace(self, log_scale=self.log_scale + np.log(c))

    def reciprocal(self):
        return self**-1

    def sqrt(self):
        return self**0.5

    # -- evaluation -------------------------------------------------------
    def _base_log(self, r):
        if self.family == "product":
            return sum(f.log_radial(r[..., j:j + 1]) for j, f in enumerate(self.factors))
        if self.family == "profile":
            arg = r[..., 0] if self.dimension == 1 else r
            val = np.asarray(self.profile(arg), dtype=float)
            if self.profile_is_log:
                return val
            if np.any(val <= 0):
                raise ValueError("weight profile must be strictly positive")
            return np.log(val)
        rho = np.sqrt(np.sum(r * r, axis=-1))
        return _family_log(self.family, self.params, rho)

    def log_radial(self, r):
        """log m0 at radii r (trailing axis d; a bare array is fine for d = 1)."""
        r = np.asarray(r, dtype=float)
        if self.dimension == 1 and (r.ndim == 0 or r.shape[-1] != 1):
            r = r[..., None]
        if r.shape[-1] != self.dimension:
            raise ValueError("radius array does not match weight dimension")
        return self.power * self._base_log(np.abs(r)) + self.log_scale

    def radial(self, r):
        return np.exp(self.log_radial(r))

    def log(self, z):
        """log m(z) for phase-space points z (complex, trailing axis d)."""
        z = np.asarray(z, dtype=complex)
        if self.dimension == 1 and (z.ndim == 0 or z.shape[-1] != 1):
            z = z[..., None]
        return self.log_radial(np.abs(z))

    def __call__(self, z):
        return np.exp(self.log(z))

    # -- envelopes --------------------------------------------------------
    def envelope(self):
        """A submultiplicative v with m(z + y) <= v(y) m(z)."""
        if self.envelope_weight is not None:
            return self.envelope_weight ** abs(self.power)
        if self.family == "profile":
            raise ValueError("profile weight has no declared envelope")
        if self.family == "product":
            env = RadialWeight.product_of(*(f.envelope() for f in self.factors))
            return env ** abs(self.power)
        fam, params = _family_envelope(self.family, self.params)
        return RadialWeight(fam, params, self.dimension, power=abs(self.power))

    @property
    def grs_passing(self):
        """False for weights with genuinely exponential growth."""
        if self.family == "product":
            return all(f.grs_passing for f in self.factors) or self.power == 0
        if self.family == "exponential":
            return self.params[0] == 0 or self.power == 0
        if self.family == "profile" and self.envelope_weight is not None:
            return self.envelope_weight.grs_passing
        return True

    # -- serialization ----------------------------------------------------
    @property
    def name(self):
        if self.label:
            return self.label
        if self.family == "product":
            base = "product(" + ",".join(f.name for f in self.factors) + ")"
        elif self.family == "profile":
            base = "profile"
        else:
            base = f"{self.family}:" + ",".join(f"{p:g}" for p in self.params)
        if self.power != 1.0:
            base += f"^{self.power:g}"
        if self.log_scale != 0.0:
            base = f"{np.exp(self.log_scale):g}*" + base
        return base

    def to_spec(self):
        if self.family == "profile":
            raise ValueError("profile weights are not serializable")
        spec = {"family": self.family, "params": list(self.params), "dimension": self.dimension}
        if self.family == "product":
            spec["factors"] = [f.to_spec() for f in self.factors]
        if self.power != 1.0:
            spec["power"] = self.power
        if self.log_scale != 0.0:
            spec["scale"] = float(np.exp(self.log_scale))
        return spec


def make_weight(spec, dimension=None):
    """Build a :class:`RadialWeight` from a dict spec or a ``family:p1,p2`` string,
    e.g. ``"subexp:1,0.5"`` for e^{|z|^{1/2}}."""
    if isinstance(spec, RadialWeight):
        return spec
    if isinstance(spec, str):
        fam, _, rest = spec.partition(":")
        params = [float(p) for p in rest.split(",") if p.strip()] if rest else []
        spec = {"family": fam.strip(), "params": params}
    spec = dict(spec)
    unknown = set(spec) - {"family", "params", "dimension", "factors", "power", "scale"}
    if unknown:
        raise ValueError(f"unknown weight fields: {sorted(unknown)}")
    dim = spec.get("dimension", dimension or 1)
    family = FAMILY_ALIASES.get(spec["family"], spec["family"])
    if family == "product":
        factors = tuple(make_weight(f, 1) for f in spec["factors"])
        w = RadialWeight.product_of(*factors)
    else:
        w = RadialWeight(family, tuple(spec.get("params", ())), dim)
    if "power" in spec:
        w = w ** float(spec["power"])
    if "scale" in spec:
        w = w.scaled(float(spec["scale"]))
    return w


def eval_weight(m, z):
    """m(z) at phase-space points z."""
    return m(z)


def default_probe(dimension=1):
    """41 x 41 points on [-8, 8]^2 (d = 1); coarser 4-D grids for d = 2."""
    if dimension == 1:
        ax = np.linspace(-8.0, 8.0, 41)
        X, Y = np.meshgrid(ax, ax, indexing="ij")
        z = (X + 1j * Y).ravel()[:, None]
        return z, z
    def grid4(n):
        ax = np.linspace(-8.0, 8.0, n)
        P = np.stack(np.meshgrid(ax, ax, ax, ax, indexing="ij"), -1).reshape(-1, 4)
        return P[:, :2] + 1j * P[:, 2:]
    return grid4(9), grid4(5)


@dataclass
class EnvelopeReport:
    """Outcome of a sampled moderateness check of m against v."""

    ratios: np.ndarray          # per probe y: sup_z m(z+y) / (v(y) m(z))
    lower_ratios: np.ndarray    # per probe y: inf_z m(z+y) v(y) / m(z)
    sup_ratio: float
    inf_lower: float
    tolerance: float
    passed: bool
    grs: Optional["GRSReport"] = None

    def to_dict(self):
        out = {"sup_ratio": self.sup_ratio, "inf_lower": self.inf_lower,
               "tolerance": self.tolerance, "passed": self.passed}
        if self.grs is not None:
            out["grs"] = self.grs.to_dict()
        return out


def moderateness_report(m, v=None, probe=None, tol=1e-9):
    """Check m(z + y) <= v(y) m(z) (and the mirrored lower bound) on a probe set.

    Failure is reported, never raised.
    """
    if v is None:
        v = m.envelope()
    zs, ys = probe if probe is not None else default_probe(m.dimension)
    zs = np.asarray(zs, dtype=complex)
    ys = np.asarray(ys, dtype=complex)
    if zs.ndim == 1:
        zs, ys = zs[:, None], ys[:, None]
    log_mz = m.log(zs)                      # (nz,)
    log_vy = v.log(ys)                      # (ny,)
    ratios = np.empty(len(ys))
    lowers = np.empty(len(ys))
    for i, y in enumerate(ys):
        diff = m.log(zs + y[None, :]) - log_mz
        ratios[i] = np.max(diff) - log_vy[i]
        lowers[i] = np.min(diff) + log_vy[i]
    ratios = np.exp(ratios)
    lowers = np.exp(lowers)
    sup_ratio = float(np.max(ratios))
    inf_lower = float(np.min(lowers))
    passed = bool(sup_ratio <= 1.0 + tol and inf_lower >= 1.0 - tol)
    return EnvelopeReport(ratios, lowers, sup_ratio, inf_lower, tol, passed)


@dataclass
class GRSReport:
    n: np.ndarray
    values: np.ndarray        # v(n z)^{1/n}
    converging: bool

    @property
    def verdict(self):
        return "to_one" if self.converging else "bounded_away"

    def to_dict(self):
        return {"n_max": int(self.n[-1]), "last": float(self.values[-1]), "verdict": self.verdict}


def grs_diagnostic(v, z, n_max=10_000):
    """The sequence v(n z)^{1/n}, n = 1 .. n_max, with a trend verdict.

    The verdict is "to_one" when log v(n z)/n keeps shrinking over the tail
    (it halves or better for polynomial growth, decays like n^{b-1} for
    subexponential and 1/log n for loglin growth) and "bounded_away" when it
    stalls at a positive level, as for exponential weights.
    """
    if n_max < 10:
        raise ValueError("n_max must be >= 10")
    n = np.arange(1, n_max + 1)
    z = np.asarray(z, dtype=complex).reshape(-1)
    pts = n[:, None] * z[None, :]
    ell = v.log(pts if v.dimension > 1 else pts[:, 0]) / n
    vals = np.exp(ell)
    end, half = ell[-1], ell[n_max // 2 - 1]
    tail = ell[n_max // 2 - 1:]
    monotone = bool(np.all(np.diff(tail) <= 1e-15 * np.maximum(1.0, np.abs(tail[:-1]))))
    converging = bool(end <= 1e-12 or (monotone and end < (1.0 - 1e-3) * half))
    if not v.grs_passing:
        converging = False
    return GRSReport(n, vals, converging)


def require_grs(v, probes=None, n_max=10_000):
    """Raise :class:`GRSError` unless v passes the GRS diagnostic."""
    if not v.grs_passing:
        raise GRSError(
            f"envelope {v.name} grows exponentially and violates the GRS condition "
            "lim v(nz)^(1/n) = 1; lifting experiments require GRS-passing envelopes"
        )
    probes = probes if probes is not None else [np.ones(v.dimension, dtype=complex)]
    for z in probes:
        rep = grs_diagnostic(v, z, n_max)
        if not rep.converging:
            raise GRSError(
                f"envelope {v.name}: v(nz)^(1/n) does not tend to 1 "
                f"(value {rep.values[-1]:.6g} at n={n_max})"
            )
