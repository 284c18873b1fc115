"""The invariant suite behind ``tfloc selftest``: a desk-scale pass over every
module.  Results are deterministic (fixed seeds, no timings)."""

import numpy as np

from .bargmann import disc_points, intertwine_check, monomial_gram
from .gamma import product_inequality_scan, tau, tau_detail
from .hermite import Grid, HermiteBasis, HermiteCoeffs
from .lifting import iso_condition, precond_solve
from .operators import (compose, domination_check, envelope_check, identity,
                        localization_matrix, tf_kernel)
from .phase_space import (NotAFrameError, analytic_agreement, gabor_coeffs, gabor_multiplier_apply,
                          gabor_reconstruct, gabor_system)
from .weights import RadialWeight, grs_diagnostic, make_weight, moderateness_report

SEED = 7


def run_selftest(rep):
    # hermite
    dev = HermiteBasis(64, Grid.for_hermite(64)).gram_deviation()
    rep.check("hermite: Gram deviation < 1e-10 (N = 64)", dev < 1e-10, {"deviation": dev})
    worst, absolute = analytic_agreement(16, 3.0)
    rep.check("hermite: sampled |V_h h_n| matches closed form (n <= 16, |z| <= 3)", worst < 1e-6,
              {"rel": worst, "abs": absolute})

    # gamma
    th = RadialWeight.from_profile(lambda r: 1 + np.pi * r**2)
    err = max(abs(tau(th, n) / (n + 2) - 1) for n in (0, 3, 64, 65, 200, 512))
    rep.check("gamma: tau_n(1 + pi r^2) = n + 2", err < 1e-10, {"rel": err})
    one = make_weight("constant")
    rep.check("gamma: tau = 1 for theta = 1", abs(tau(one, 7, 3.0) - 1) < 1e-11)
    sub = make_weight("subexp:1,0.5")
    xv = max(abs(tau_detail(sub, n, s, method="laguerre").value
                 / tau_detail(sub, n, s, method="legendre").value - 1)
             for n in (10, 32, 64) for s in (1.0, -1.0))
    rep.check("gamma: Laguerre and Legendre routes agree (n <= 64)", xv < 1e-9, {"rel": xv})
    sc = product_inequality_scan(sub, 1, -1, 500)
    rep.check("gamma: tau_n,1 tau_n,-1 >= 1 and sup plateau (subexp 1, 1/2)",
              sc.inf >= 1 - 1e-9 and sc.plateau_change(400) < 1e-3,
              {"inf": sc.inf, "sup": sc.sup})
    rep.results["constant_C_subexp"] = sc.sup

    # weights
    for spec in ("polynomial:2", "subexp:1,0.5", "loglin:1"):
        r = moderateness_report(make_weight(spec))
        rep.check(f"weights: {spec} moderate against its envelope", r.passed, r.to_dict())
    grs = grs_diagnostic(make_weight("exponential:1"), 1.0)
    rep.check("weights: exponential envelope flagged by GRS", grs.verdict == "bounded_away")

    # operators
    M = localization_matrix("gaussian", sub, 48).matrix
    d = np.real(np.diag(M))
    off = np.max(np.abs(M - np.diag(np.diag(M))))
    ref = np.array([tau(sub, n) for n in range(49)])
    rep.check("operators: radial localization matrix is diagonal with tau entries",
              off / d.min() < 1e-6 and np.max(np.abs(d / ref - 1)) < 1e-6,
              {"offdiag": off / d.min()})
    m = make_weight("polynomial:1")
    K0 = tf_kernel(identity(64))
    T = compose(localization_matrix("gaussian", m.reciprocal(), 64),
                localization_matrix("gaussian", m, 64))
    K = tf_kernel(T)
    C, _ = domination_check(K, m, K0.envelope)
    ec = envelope_check(K, m.envelope())
    rep.check("operators: kernel of A_1/m A_m dominated and summable", C <= 1 + 1e-6 and ec.passed,
              {"constant": C, "tail_fraction": ec.tail_fraction})

    # phase space
    system = gabor_system("gaussian", 0.5, 0.5)
    rng = np.random.default_rng(SEED)
    c = HermiteCoeffs(rng.standard_normal(20) + 1j * rng.standard_normal(20))
    f = system.sample(c)
    res = (gabor_reconstruct(gabor_coeffs(f, system), system) - f).norm() / f.norm()
    rep.check("phase_space: Gabor reconstruction residual < 1e-8", res < 1e-8, {"residual": res})
    try:
        gabor_system("gaussian", 1.1, 1.1, dual=False)
        refused = False
    except NotAFrameError:
        refused = True
    rep.check("phase_space: a = b = 1.1 is not a frame", refused)

    # lifting
    r = iso_condition(sub, 300)
    rep.check("lifting: rho in (0, 1] and refinement-stable", r.inf > 0 and r.sup <= 1 + 1e-9
              and max(r.refinement_change()) < 1e-2, r.to_dict())
    truth = system.sample(HermiteCoeffs.unit(2, 2))
    b = gabor_multiplier_apply(system, m, truth)
    f1, t1 = precond_solve(system, m, b, 1e-8)
    _, t0 = precond_solve(system, m, b, 1e-8, precondition=False)
    e = (f1 - truth).norm() / truth.norm()
    rep.check("lifting: preconditioned Gabor multiplier inversion", t1.iterations < t0.iterations
              and e < 1e-7, {"pcg": t1.iterations, "cgnr": t0.iterations, "error": e})

    # bargmann
    G = monomial_gram(32)
    rep.check("bargmann: monomials orthonormal", np.max(np.abs(G - np.eye(33))) < 1e-9)
    f01 = HermiteCoeffs(np.ones(2))
    worst = max(intertwine_check(w, f01, disc_points(3.0))
                for w in ("constant", "polynomial:2", "subexp:1,0.5"))
    rep.check("bargmann: B J_m f = T_m B f", worst < 1e-6, {"residual": worst})
