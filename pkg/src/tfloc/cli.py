"""Batch experiment runner.

    tfloc <command> [--config FILE] [--weight SPEC ...] [--N N] [--a A --b B]
                    [--p P --q Q --s S --t T] [--tol TOL] [--seed SEED] [--out DIR]

Commands: tau, inequalities, eigencheck, iso, lift, invert, kernel, bargmann,
selftest.  Each writes CSV/JSON reports into --out and prints a summary.
Exit status: 0 all asserted invariants hold, 1 an invariant failed,
2 invalid configuration (including GRS refusals).
"""

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__

COMMANDS = ("tau", "inequalities", "eigencheck", "iso", "lift", "invert", "kernel",
            "bargmann", "selftest")

DEFAULTS = {
    "tau": {"weight": ["subexp:1,0.5"], "N": 200, "s": 1.0},
    "inequalities": {"weight": ["polynomial:2", "subexp:1,0.5", "subexp:1,0.75", "loglin:1"],
                     "N": 500, "pairs": [[1, -1], [2, -1], [1, 1]]},
    "eigencheck": {"weight": ["subexp:1,0.5"], "N": 48},
    "iso": {"weight": ["polynomial:2", "subexp:1,0.5", "subexp:1,0.75", "loglin:1"], "N": 300},
    "lift": {"weight": ["polynomial:1", "subexp:1,0.5"], "N": 64, "p": 2.0, "delta": 1.0 / 16},
    "invert": {"weight": ["polynomial:1"], "a": 0.5, "b": 0.5, "tol": 1e-8},
    "kernel": {"weight": ["polynomial:1", "polynomial:2"], "N": 64},
    "bargmann": {"weight": ["constant", "polynomial:2", "subexp:1,0.5"], "N": 1},
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    command: str
    weight: list = field(default_factory=list)
    N: int = 64
    a: float = 0.5
    b: float = 0.5
    p: float = 2.0
    q: float = None
    s: float = 1.0
    t: float = -1.0
    pairs: list = None
    delta: float = 1.0 / 16
    tol: float = 1e-8
    seed: int = 20240611
    out: str = "tfloc-out"

    def validate(self):
        from .weights import make_weight

        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not isinstance(self.weight, list) or (not self.weight and self.command != "selftest"):
            raise ConfigError("at least one weight is required")
        for w in self.weight:
            try:
                make_weight(w)
            except (ValueError, KeyError, TypeError) as e:
                raise ConfigError(f"bad weight {w!r}: {e}") from None
        if int(self.N) != self.N or self.N < 1:
            raise ConfigError("N must be a positive integer")
        self.N = int(self.N)
        if self.a <= 0 or self.b <= 0:
            raise ConfigError("lattice parameters a, b must be positive")
        for name in ("p", "q"):
            v = getattr(self, name)
            if v is not None and not (v >= 1):
                raise ConfigError(f"{name} must lie in [1, inf]")
        for name in ("s", "t"):
            if abs(getattr(self, name)) > 8:
                raise ConfigError(f"exponent {name} outside [-8, 8]")
        if not (0 < self.tol < 1):
            raise ConfigError("tol must lie in (0, 1)")
        if not (0 < self.delta <= 0.5):
            raise ConfigError("delta must lie in (0, 1/2]")
        if self.pairs is not None:
            try:
                self.pairs = [[float(x), float(y)] for x, y in self.pairs]
            except (TypeError, ValueError):
                raise ConfigError("pairs must be a list of [s, t]") from None
        return self

    def to_dict(self):
        d = asdict(self)
        d.pop("out")  # where reports go is not part of what they report
        for k in ("p", "q"):
            if d[k] is not None and np.isinf(d[k]):
                d[k] = "inf"
        return d


def _number(text):
    return float("inf") if str(text).lower() in ("inf", "infinity") else float(text)


def build_parser():
    ap = argparse.ArgumentParser(prog="tfloc", description="Time-frequency localization experiments")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON config file; flags override its fields")
    ap.add_argument("--weight", action="append", help="weight spec family:p1,p2 (repeatable)")
    ap.add_argument("--N", type=int)
    ap.add_argument("--a", type=float)
    ap.add_argument("--b", type=float)
    ap.add_argument("--p", type=_number)
    ap.add_argument("--q", type=_number)
    ap.add_argument("--s", type=float)
    ap.add_argument("--t", type=float)
    ap.add_argument("--delta", type=float)
    ap.add_argument("--tol", type=float)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    return ap


def make_config(args):
    known = {f.name for f in fields(ExperimentConfig)} - {"command"}
    values = dict(DEFAULTS.get(args.command, {}))
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data.pop("command", None)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if isinstance(data.get("weight"), (str, dict)):
            data["weight"] = [data["weight"]]
        for k in ("p", "q"):
            if k in data and data[k] is not None:
                data[k] = _number(data[k])
        values.update(data)
    for name in known:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    return ExperimentConfig(args.command, **values).validate()


# -- report helpers ------------------------------------------------------------------

def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if np.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


class Report:
    def __init__(self, cfg):
        self.cfg = cfg
        self.checks = []
        self.results = {}
        self.files = {}

    def check(self, name, ok, detail=None):
        self.checks.append({"name": name, "passed": bool(ok), "detail": _clean(detail)})
        return ok

    def table(self, name, header, rows):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
        self.files[name] = buf.getvalue()

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def to_json(self):
        return json.dumps(_clean({"command": self.cfg.command, "version": __version__,
                                  "config": self.cfg.to_dict(), "passed": self.passed,
                                  "checks": self.checks, "results": self.results}),
                          indent=2, sort_keys=True) + "\n"

    def write(self):
        os.makedirs(self.cfg.out, exist_ok=True)
        for name, text in self.files.items():
            with open(os.path.join(self.cfg.out, name), "w") as fh:
                fh.write(text)
        with open(os.path.join(self.cfg.out, f"{self.cfg.command}.json"), "w") as fh:
            fh.write(self.to_json())

    def summary(self):
        lines = [f"tfloc {self.cfg.command} (version {__version__})"]
        for c in self.checks:
            lines.append(f"  [{'PASS' if c['passed'] else 'FAIL'}] {c['name']}")
        lines.append("all invariants hold" if self.passed else "invariant failure")
        return "\n".join(lines)


# -- commands ------------------------------------------------------------------------

def _weights(cfg):
    from .weights import make_weight
    return [make_weight(w) for w in cfg.weight]


def cmd_tau(cfg, rep):
    from .gamma import tau_spectrum
    rows = []
    for m in _weights(cfg):
        sp = tau_spectrum(m, cfg.s, cfg.N)
        sm = tau_spectrum(m, -cfg.s, cfg.N)
        prod = (sp.values * sm.values).ravel()
        for n in range(cfg.N + 1):
            rows.append([m.name, n, float(sp.values[n]), float(sm.values[n]), float(prod[n]),
                         float(max(sp.errors[n], sm.errors[n]))])
        rep.check(f"{m.name}: tau > 0", np.all(sp.values > 0) and np.all(sm.values > 0))
        rep.check(f"{m.name}: tau_s tau_-s >= 1", prod.min() >= 1 - 1e-9, {"min": prod.min()})
        rep.results[m.name] = {"min_product": prod.min(), "max_product": prod.max()}
    rep.table("tau.csv", ["weight", "alpha", "tau_s", "tau_minus_s", "product", "est_error"], rows)


def cmd_inequalities(cfg, rep):
    from .gamma import product_inequality_scan
    pairs = cfg.pairs or [[cfg.s, cfg.t]]
    N = cfg.N
    start = max(0, N - 100)
    rows = []
    for m in _weights(cfg):
        for s, t in pairs:
            sc = product_inequality_scan(m, s, t, N)
            g = sc.gamma.ravel()
            key = f"{m.name} s={s:g} t={t:g}"
            rep.check(f"{key}: gamma >= 1", g.min() >= 1 - 1e-9, {"inf": sc.inf})
            rep.check(f"{key}: sup plateau < 0.1% over [{start},{N}]",
                      sc.plateau_change(start) < 1e-3, {"change": sc.plateau_change(start)})
            rep.results[key] = {"sup": sc.sup, "inf": sc.inf, "sup_change": sc.plateau_change(start),
                                "inf_change": sc.floor_change(start)}
            for n, (gv, su, inf) in enumerate(zip(g, sc.running_sup, sc.running_inf)):
                rows.append([m.name, s, t, n, float(gv), float(su), float(inf)])
    rep.table("inequalities.csv", ["weight", "s", "t", "alpha", "gamma", "running_sup", "running_inf"],
              rows)


def cmd_eigencheck(cfg, rep):
    from .gamma import tau
    from .operators import localization_matrix
    for m in _weights(cfg):
        M = localization_matrix("gaussian", m, cfg.N).matrix
        d = np.real(np.diag(M))
        off = np.max(np.abs(M - np.diag(np.diag(M))))
        ref = np.array([tau(m, n) for n in range(cfg.N + 1)])
        rel = np.max(np.abs(d / ref - 1))
        herm = np.max(np.abs(M - M.conj().T)) / np.max(np.abs(M))
        lam = np.linalg.eigvalsh(0.5 * (M + M.conj().T))
        rep.check(f"{m.name}: off-diagonal / min diagonal < 1e-6", off / d.min() < 1e-6,
                  {"ratio": off / d.min()})
        rep.check(f"{m.name}: diagonal matches tau to 1e-6", rel < 1e-6, {"rel": rel})
        rep.check(f"{m.name}: Hermitian to 1e-9", herm < 1e-9, {"defect": herm})
        rep.check(f"{m.name}: positive definite", lam[0] > 0, {"min_eig": lam[0]})
        rep.results[m.name] = {"offdiag_ratio": off / d.min(), "diag_rel_err": rel}
        rep.table(f"eigencheck_{_slug(m.name)}.csv", ["alpha", "diagonal", "tau"],
                  [[n, d[n], ref[n]] for n in range(cfg.N + 1)])


def cmd_iso(cfg, rep):
    from .lifting import iso_condition
    rows = []
    for m in _weights(cfg):
        r = iso_condition(m, cfg.N)
        ds, di = r.refinement_change()
        rep.check(f"{m.name}: rho in (0, 1]", r.inf > 0 and r.sup <= 1 + 1e-9,
                  {"inf": r.inf, "sup": r.sup})
        rep.check(f"{m.name}: sup/inf move < 1% from N/2 to N", ds < 1e-2 and di < 1e-2,
                  {"sup_change": ds, "inf_change": di})
        rep.results[m.name] = r.to_dict()
        rows += [[m.name, n, float(v)] for n, v in enumerate(r.values)]
    rep.table("iso.csv", ["weight", "alpha", "rho"], rows)


def cmd_lift(cfg, rep):
    from .lifting import lifting_ratio, test_set as make_test_set
    from .phase_space import PhaseGrid
    from .weights import require_grs
    ws = _weights(cfg)
    for m in ws:
        require_grs(m.envelope())
    p = cfg.p
    coarse = PhaseGrid(8.0, 2 * cfg.delta)
    fine = PhaseGrid(8.0, cfg.delta)
    rows = []
    tests = make_test_set(n_hermite=min(15, cfg.N // 2 + 1), seed=cfg.seed)
    for m in ws:
        lo = lifting_ratio("gaussian", m, p=p, tests=tests, cutoff=cfg.N // 2, phase=coarse,
                           seed=cfg.seed)
        hi = lifting_ratio("gaussian", m, p=p, tests=tests, cutoff=cfg.N, phase=fine, seed=cfg.seed)
        change = abs(hi.spread / lo.spread - 1)
        rep.check(f"{m.name}: spread change < 5% under refinement", change < 0.05,
                  {"coarse": lo.spread, "fine": hi.spread})
        rep.results[m.name] = {"coarse": lo.to_dict(), "fine": hi.to_dict(), "change": change}
        rows += [[m.name, i, float(a), float(b)] for i, (a, b) in enumerate(zip(lo.ratios, hi.ratios))]
    rep.table("lift.csv", ["weight", "test", "ratio_coarse", "ratio_fine"], rows)


def cmd_invert(cfg, rep):
    from .hermite import HermiteCoeffs
    from .lifting import precond_solve, ritz_bracket
    from .phase_space import gabor_multiplier_apply, gabor_system
    system = gabor_system("gaussian", cfg.a, cfg.b)
    truth = system.sample(HermiteCoeffs.unit(2, 2))
    for m in _weights(cfg):
        b = gabor_multiplier_apply(system, m, truth)
        f1, t1 = precond_solve(system, m, b, cfg.tol)
        f0, t0 = precond_solve(system, m, b, cfg.tol, precondition=False)
        err = (f1 - truth).norm() / truth.norm()
        rb = ritz_bracket(system, m)
        rep.check(f"{m.name}: preconditioned solve converged", t1.converged, t1.to_dict())
        rep.check(f"{m.name}: fewer iterations than normal equations",
                  t1.iterations < t0.iterations, {"pcg": t1.iterations, "cgnr": t0.iterations})
        rep.check(f"{m.name}: residual history non-increasing",
                  bool(np.all(np.diff(t1.residuals) <= 0)))
        rep.check(f"{m.name}: recovery error < 1e-7", err < 1e-7, {"error": err})
        rep.check(f"{m.name}: Ritz ratio <= squared condition",
                  rb["precond_ratio"] <= rb["normal_condition"], rb)
        rep.results[m.name] = {"pcg": t1.to_dict(), "cgnr": t0.to_dict(), "recovery_error": err,
                               "ritz": rb, "frame_bounds": list(system.bounds)}
        rep.files[f"trace_pcg_{_slug(m.name)}.csv"] = t1.to_csv()
        rep.files[f"trace_cgnr_{_slug(m.name)}.csv"] = t0.to_csv()


def cmd_kernel(cfg, rep):
    from .operators import (compose, domination_check, envelope_check, identity,
                            localization_matrix, tf_kernel)
    K0 = tf_kernel(identity(cfg.N))
    rep.check("identity kernel depends only on y - z", K0.constancy < 1e-6, {"spread": K0.constancy})
    for m in _weights(cfg):
        T = compose(localization_matrix("gaussian", m.reciprocal(), cfg.N),
                    localization_matrix("gaussian", m, cfg.N))
        K = tf_kernel(T)
        C, _ = domination_check(K, m, K0.envelope)
        Ch, _ = domination_check(K, m, K0.envelope, power=0.5)
        ec = envelope_check(K, m.envelope())
        ec.domination_constant, ec.dominated = C, C <= 1 + 1e-6
        rep.check(f"{m.name}: H <= G*(v H0)*G^*", C <= 1 + 1e-6, {"constant": C})
        rep.check(f"{m.name}: H <= G*(v^1/2 H0)*G^*", Ch <= 1 + 1e-6, {"constant": Ch})
        rep.check(f"{m.name}: H v tail sums decrease", ec.passed, ec.to_dict())
        rep.results[m.name] = {**ec.to_dict(), "domination_constant_sqrt": Ch}
        w = K.offsets[np.isfinite(K.envelope)]
        h = K.envelope[np.isfinite(K.envelope)]
        rep.table(f"kernel_{_slug(m.name)}.csv", ["w_re", "w_im", "H"],
                  [[float(a.real), float(a.imag), float(b)] for a, b in zip(w, h)])


def cmd_bargmann(cfg, rep):
    from .bargmann import bargmann_coeffs, disc_points, intertwine_check, m_prime, toeplitz_apply
    from .hermite import HermiteCoeffs
    f = HermiteCoeffs(np.ones(cfg.N + 1))
    z = disc_points(3.0)
    for m in _weights(cfg):
        r = intertwine_check(m, f, z)
        rep.check(f"{m.name}: intertwining residual < 1e-6", r < 1e-6, {"residual": r})
        rep.results[m.name] = {"residual": r}
        F = toeplitz_apply(m_prime(m), bargmann_coeffs(f), z, route="quadrature").samples
        rep.table(f"fock_{_slug(m.name)}.csv", ["re_z", "im_z", "re_F", "im_F"],
                  [[float(a.real), float(a.imag), float(b.real), float(b.imag)]
                   for a, b in zip(z, F)])


def cmd_selftest(cfg, rep):
    from .selftest import run_selftest
    run_selftest(rep)


HANDLERS = {
    "tau": cmd_tau, "inequalities": cmd_inequalities, "eigencheck": cmd_eigencheck,
    "iso": cmd_iso, "lift": cmd_lift, "invert": cmd_invert, "kernel": cmd_kernel,
    "bargmann": cmd_bargmann, "selftest": cmd_selftest,
}


def _slug(name):
    return "".join(ch if ch.isalnum() else "_" for ch in name).strip("_")


def run(cfg):
    """Run one experiment; returns (exit code, Report)."""
    rep = Report(cfg)
    HANDLERS[cfg.command](cfg, rep)
    rep.write()
    return (0 if rep.passed else 1), rep


def main(argv=None):
    from .weights import GRSError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        code, rep = run(cfg)
    except (ConfigError, GRSError) as e:
        print(f"tfloc: error: {e}", file=sys.stderr)
        return 2
    print(rep.summary())
    return code


if __name__ == "__main__":
    sys.exit(main())
