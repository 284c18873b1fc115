"""Finite-truncation experiments for the isomorphism theorems.

* ``iso_condition``: rho_alpha = tau_alpha(theta)^2 / tau_alpha(theta^2), the
  Hermite-diagonal ratio ||J_theta f||_2^2 / ||f||^2_{M^2_theta} on h_alpha.
* ``lifting_ratio``: r(f) = ||A_m f||_{M^p_{mu/m}} / ||f||_{M^p_mu} over a
  seeded test set, with grid modulation norms.
* ``hilbert_iso_pair_check``: generalized eigenvalue bounds of
  <A_m f, f> against ||f||^2_{M^2_theta}, theta = m^{1/2}.
* ``precond_solve``: G_m f = b by CG preconditioned with G_{1/m}.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cholesky, eigh

from .gamma import tau, tau_spectrum
from .hermite import GridFunction, HermiteCoeffs
from .krylov import cgnr, pcg
from .operators import localization_matrix
from .phase_space import (
    PhaseGrid,
    _compressed_frame,
    as_function,
    default_grid,
    gabor_multiplier_apply,
    lattice_values,
    mod_norm_grid,
)
from .weights import RadialWeight, make_weight, require_grs

DEFAULT_SEED = 20240611


@dataclass
class IsoReport:
    weight: str
    cutoff: int
    values: np.ndarray
    sup: float
    inf: float
    refinement: list = field(default_factory=list)

    @property
    def ratio(self):
        return self.sup / self.inf

    def refinement_change(self):
        """Relative change of (sup, inf) between the coarse and fine truncation."""
        (_, s0, i0), (_, s1, i1) = self.refinement[0], self.refinement[-1]
        return abs(s1 / s0 - 1.0), abs(i1 / i0 - 1.0)

    def to_dict(self):
        return {"weight": self.weight, "N": self.cutoff, "sup": self.sup, "inf": self.inf,
                "ratio": self.ratio,
                "refinement": [{"N": n, "sup": s, "inf": i} for n, s, i in self.refinement]}


def rho_values(theta, cutoff):
    theta = make_weight(theta)
    t1 = tau_spectrum(theta, 1.0, cutoff).values
    t2 = tau_spectrum(theta**2, 1.0, cutoff).values
    return (t1 * t1 / t2).ravel()


def iso_condition(theta, cutoff):
    """rho_alpha for alpha <= cutoff with sup / inf at cutoff/2 and cutoff."""
    theta = make_weight(theta)
    rho = rho_values(theta, cutoff)
    half = rho[: cutoff // 2 + 1] if theta.dimension == 1 else \
        rho.reshape((cutoff + 1,) * 2)[: cutoff // 2 + 1, : cutoff // 2 + 1].ravel()
    ref = [(cutoff // 2, float(half.max()), float(half.min())),
           (cutoff, float(rho.max()), float(rho.min()))]
    return IsoReport(theta.name, cutoff, rho, float(rho.max()), float(rho.min()), ref)


def quotient(mu, m):
    """The weight mu / m (log-domain profile)."""
    mu, m = make_weight(mu), make_weight(m)
    return RadialWeight.from_profile(lambda r: mu.log_radial(r) - m.log_radial(r),
                                     mu.dimension, log=True, label=f"{mu.name}/{m.name}")


def test_set(n_hermite=15, n_random=15, degree=None, seed=DEFAULT_SEED):
    """h_0 .. h_{n_hermite-1} plus seeded random complex mixes of the same span."""
    degree = n_hermite - 1 if degree is None else degree
    rng = np.random.default_rng(seed)
    out = [HermiteCoeffs.unit(n, degree) for n in range(n_hermite)]
    for _ in range(n_random):
        c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
        out.append(HermiteCoeffs(c / np.linalg.norm(c)))
    return out


@dataclass
class LiftReport:
    ratios: np.ndarray
    params: dict

    @property
    def min(self):
        return float(self.ratios.min())

    @property
    def max(self):
        return float(self.ratios.max())

    @property
    def spread(self):
        return self.max / self.min

    def to_dict(self):
        return {**self.params, "min": self.min, "max": self.max, "spread": self.spread}


def lifting_ratio(g, m, mu=None, p=2, tests=None, cutoff=32, phase=None, seed=DEFAULT_SEED):
    """r(f) = ||A^g_m f||_{M^p_{mu/m}} / ||f||_{M^p_mu} for each test function.

    Raises :class:`~tfloc.weights.GRSError` for envelopes that fail the GRS
    condition.
    """
    m = make_weight(m)
    mu = make_weight(mu if mu is not None else "constant")
    require_grs(m.envelope())
    tests = tests if tests is not None else test_set(seed=seed)
    phase = phase or PhaseGrid()
    A = localization_matrix(g, m, cutoff, phase=phase if g not in (None, "gaussian", "h") else None)
    grid = default_grid(cutoff)
    target = quotient(mu, m)
    ratios = []
    for f in tests:
        if f.cutoff > cutoff and np.any(f.values[cutoff + 1:]):
            raise ValueError(f"test function of degree {f.cutoff} exceeds the cutoff {cutoff}")
        c = f.resize(cutoff)
        num = mod_norm_grid(as_function(A.apply(c), grid), p, p, target, phase=phase).value
        den = mod_norm_grid(as_function(c, grid), p, p, mu, phase=phase).value
        ratios.append(num / den)
    return LiftReport(np.array(ratios), {"weight": m.name, "mu": mu.name, "p": p, "N": cutoff,
                                         "delta": phase.spacing, "tests": len(tests), "seed": seed})


def hilbert_iso_pair_check(g, m, cutoff):
    """Bounds c, C with c ||f||^2_{M^2_theta} <= <A_m f, f> <= C ||f||^2_{M^2_theta}.

    ||f||^2_{M^2_theta} = sum |c_alpha|^2 tau_alpha(m) in the Hermite
    characterization, so the bounds are generalized eigenvalues of the
    localization matrix against diag(tau(m)).
    """
    m = make_weight(m)
    refinement = []
    for n in (cutoff // 2, cutoff):
        M = localization_matrix(g, m, n).matrix
        M = 0.5 * (M + M.conj().T)
        D = np.diag([tau(m, k) for k in range(n + 1)])
        ev = eigh(M, D, eigvals_only=True)
        refinement.append((n, float(ev[-1]), float(ev[0])))
    _, C, c = refinement[-1]
    return IsoReport(f"A({m.name})", cutoff, np.array([c, C]), C, c, refinement)


def quadratic_form(g, m, f, cutoff=None, phase=None):
    """(<A_m f, f>, ||V_g f * m^{1/2}||_2^2) for Hermite coefficients f."""
    m = make_weight(m)
    cutoff = cutoff or f.cutoff
    c = f.resize(cutoff)
    A = localization_matrix(g, m, cutoff)
    lhs = np.vdot(c.values, A.apply(c).values).real
    grid = default_grid(cutoff)
    win = None
    if g not in (None, "gaussian", "h"):
        win = as_function(g * (1.0 / g.norm()), grid)
    rhs = mod_norm_grid(as_function(c, grid), 2, 2, m.sqrt(), g=win, phase=phase).value ** 2
    return float(lhs), float(rhs)


# -- Gabor multiplier inversion -------------------------------------------------

def _mult(system, m):
    vals = lattice_values(make_weight(m) if isinstance(m, (str, dict)) else m, system.lattice)
    return lambda v: gabor_multiplier_apply(system, vals, GridFunction(system.grid, v)).values


def precond_solve(system, m, b, tol=1e-8, maxiter=2000, precondition=True):
    """Solve G_m f = b; CG preconditioned with G_{1/m}, or CGNR on G_m^2.

    Returns the solution as a GridFunction on the system grid and the trace.
    """
    m = make_weight(m) if isinstance(m, (str, dict)) else m
    b = system.sample(b) if isinstance(b, HermiteCoeffs) else b
    if b.grid != system.grid:
        raise ValueError("right-hand side must live on the system grid")
    A = _mult(system, m)
    if precondition:
        minv = (lambda z: 1.0 / np.asarray(m(z), dtype=float))
        x, trace = pcg(A, b.values, apply_M=_mult(system, minv), tol=tol, maxiter=maxiter)
        trace.preconditioner = "G_1/m"
    else:
        x, trace = cgnr(A, A, b.values, tol=tol, maxiter=maxiter)
    return GridFunction(system.grid, x), trace


def ritz_bracket(system, m, cutoff=64):
    """Extreme eigenvalues of G_{1/m} G_m on span{h_0..h_N} and the squared
    condition number of G_m there."""
    m = make_weight(m) if isinstance(m, (str, dict)) else m
    _, A = _compressed_frame(system.atoms, system.grid, cutoff)
    mv = lattice_values(m, system.lattice)
    Gm = A.conj().T @ (mv[:, None] * A)
    Gi = A.conj().T @ ((1.0 / mv)[:, None] * A)
    Gm = 0.5 * (Gm + Gm.conj().T)
    Gi = 0.5 * (Gi + Gi.conj().T)
    Lc = cholesky(Gi, lower=True)
    P = Lc.conj().T @ Gm @ Lc
    ev = np.linalg.eigvalsh(0.5 * (P + P.conj().T))
    evm = np.linalg.eigvalsh(Gm)
    return {"ritz_min": float(ev[0]), "ritz_max": float(ev[-1]),
            "precond_ratio": float(ev[-1] / ev[0]),
            "normal_condition": float((evm[-1] / evm[0]) ** 2)}
