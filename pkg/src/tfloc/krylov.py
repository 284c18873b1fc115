"""Conjugate-gradient solvers with residual traces.

``pcg`` runs preconditioned CG and applies minimal-residual smoothing
(Schoenauer / Zhou-Walker) to the iterates, so the reported residual history
is non-increasing.  ``cgnr`` is CG on the normal equations A^H A x = A^H b,
whose residuals ||b - A x|| are non-increasing by construction.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np


class ConvergenceError(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


@dataclass
class SolveTrace:
    iterations: int
    residuals: list = field(default_factory=list)   # relative, index 0 = initial guess
    final_residual: float = np.nan
    preconditioner: str = "none"
    converged: bool = False
    method: str = "pcg"

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["iter", "residual"])
        for i, r in enumerate(self.residuals):
            w.writerow([i, repr(float(r))])
        return buf.getvalue()

    def to_dict(self):
        return {"method": self.method, "preconditioner": self.preconditioner,
                "iterations": self.iterations, "final_residual": self.final_residual,
                "converged": self.converged}


def _norm(v):
    return float(np.linalg.norm(v))


def pcg(apply_A, b, apply_M=None, tol=1e-8, maxiter=1000, x0=None, raise_on_fail=False):
    """Solve A x = b for Hermitian positive (semi)definite A.

    ``apply_M`` applies the preconditioner (an approximation of A^{-1}).
    Stops when the smoothed relative residual ||b - A s|| / ||b|| <= tol.
    """
    b = np.asarray(b, dtype=complex)
    bn = _norm(b)
    tag = "none" if apply_M is None else "M"
    if bn == 0:
        return np.zeros_like(b), SolveTrace(0, [0.0], 0.0, tag, True)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=complex)
    r = b - apply_A(x) if x0 is not None else b.copy()
    z = apply_M(r) if apply_M else r
    p = z.copy()
    rz = np.vdot(r, z)
    s, rho = x.copy(), r.copy()
    hist = [_norm(rho) / bn]
    it = 0
    while it < maxiter and hist[-1] > tol:
        Ap = apply_A(p)
        pAp = np.vdot(p, Ap).real
        if pAp <= 0:
            break
        alpha = rz / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        it += 1
        # minimal-residual smoothing
        dr = r - rho
        dd = np.vdot(dr, dr).real
        if dd > 0:
            eta = -np.vdot(dr, rho).real / dd
            s = s + eta * (x - s)
            rho = rho + eta * dr
        hist.append(_norm(rho) / bn)
        if hist[-1] <= tol:
            # confirm against the true residual before stopping
            true = _norm(b - apply_A(s)) / bn
            if true <= tol:
                hist[-1] = true
                break
            # recursion drifted from the true residual: resynchronize
            rho = b - apply_A(s)
            hist[-1] = true
        z = apply_M(r) if apply_M else r
        rz_new = np.vdot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    final = _norm(b - apply_A(s)) / bn
    trace = SolveTrace(it, hist, final, tag, final <= tol * (1 + 1e-6), "pcg")
    if raise_on_fail and not trace.converged:
        raise ConvergenceError(f"pcg stopped at residual {final:.2e} after {it} iterations", trace)
    return s, trace


def cgnr(apply_A, apply_AH, b, tol=1e-8, maxiter=1000, raise_on_fail=False):
    """CG on the normal equations; residual history is ||b - A x|| / ||b||."""
    b = np.asarray(b, dtype=complex)
    bn = _norm(b)
    if bn == 0:
        return np.zeros_like(b), SolveTrace(0, [0.0], 0.0, "none", True, "cgnr")
    x = np.zeros_like(b)
    r = b.copy()
    z = apply_AH(r)
    p = z.copy()
    zz = np.vdot(z, z).real
    hist = [1.0]
    it = 0
    while hist[-1] > tol and it < maxiter and zz > 0:
        w = apply_A(p)
        alpha = zz / np.vdot(w, w).real
        x = x + alpha * p
        r = r - alpha * w
        it += 1
        hist.append(_norm(r) / bn)
        z = apply_AH(r)
        zz_new = np.vdot(z, z).real
        p = z + (zz_new / zz) * p
        zz = zz_new
    final = _norm(b - apply_A(x)) / bn
    trace = SolveTrace(it, hist, final, "none", final <= tol * (1 + 1e-6), "cgnr")
    if raise_on_fail and not trace.converged:
        raise ConvergenceError(f"cgnr stopped at residual {final:.2e} after {it} iterations", trace)
    return x, trace
