"""Benchmark harness: run solvers on generated instances, annotate traces
with image-space distance and WTU, check invariants, and plot.

Runs write three files under the output directory, named
``<KIND>-s<seed>[-full]-<SOLVER>``:

* ``.csv``  per-iteration trace (columns fixed by :data:`acgm.trace.CSV_COLUMNS`)
* ``.json`` run summary: status, average LCE, totals, parameters
* ``.npz``  recorded points ``xs``, ``ys``, ``zs`` for post hoc checks
"""

import configparser
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import BaselineConfig, Variant, solve_baseline
from .oracle import descent_condition, sample_gradient
from .problems import Kind, gen, load_instance, oracle_bundle, save_instance, with_reference
from .solvers import DEFAULT_RD, Form, LineSearchError, SolverConfig, solve
from .trace import Trace, read_trace_csv, write_trace_csv
from .wtu import MATVEC_COSTS, CostModel, cumulative_wtu

__all__ = [
    "SOLVERS",
    "STRONGLY_CONVEX_ONLY",
    "RunSpec",
    "RunResult",
    "CheckResult",
    "VerifyReport",
    "load_config",
    "instance_path",
    "get_instance",
    "make_config",
    "run_benchmark",
    "annotate",
    "delta0",
    "verify_run",
    "emit_plots",
    "load_run",
]

SOLVERS = ("ACGM", "MACGM", "BACGM", "BMACGM", "FISTA-BT", "FISTA-CP", "MFISTA-CP",
           "ACGM-ES", "MACGM-ES")
STRONGLY_CONVEX_ONLY = ("BACGM", "BMACGM")

_ACGM_FORMS = {
    "ACGM": (Form.EXTRAPOLATED, False),
    "MACGM": (Form.EXTRAPOLATED, True),
    "ACGM-ES": (Form.ESTIMATE_SEQUENCE, False),
    "MACGM-ES": (Form.ESTIMATE_SEQUENCE, True),
    "BACGM": (Form.BORDER_CASE, False),
    "BMACGM": (Form.BORDER_CASE, True),
}

# tolerance on the reference optimum, which may be slightly suboptimal
_TOL_REF = 1e-9


@dataclass
class RunSpec:
    """One benchmark run.

    ``overrides`` may set any of ``L0, A0, gamma0, r_u, r_d,
    max_backtracks_per_iter``; ``L0`` defaults to ``L_f``.
    """

    problem: str
    seed: int
    solver: str
    iters: int = 300
    full: bool = False
    cost: CostModel = MATVEC_COSTS
    out: Path = Path("bench-out")
    overrides: dict = field(default_factory=dict)
    ref_iters: int = 5000

    def __post_init__(self):
        self.problem = Kind(self.problem).value
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        self.out = Path(self.out)

    @property
    def stem(self):
        return f"{self.problem}-s{self.seed}{'-full' if self.full else ''}-{self.solver}"


@dataclass
class RunResult:
    spec: RunSpec
    trace: Trace
    config: object
    csv_path: Path
    summary: dict


def load_config(path):
    """Read a flat ``key = value`` benchmark config (one ``[bench]`` section).

    Recognized keys: ``problem, solver, seed, iters, full, out, ref_iters``,
    the cost model ``t_f, t_g, t_psi, t_p`` and solver overrides
    ``L0, A0, gamma0, r_u, r_d, max_backtracks_per_iter``. ``seed`` is required.
    """
    parser = configparser.ConfigParser()
    with open(path) as fh:
        text = fh.read()
    if not text.lstrip().startswith("["):
        text = "[bench]\n" + text
    parser.read_string(text)
    sec = parser["bench"]
    if "seed" not in sec:
        raise ValueError(f"{path}: 'seed' is mandatory")
    cfg = {"seed": sec.getint("seed")}
    for key in ("problem", "solver", "out"):
        if key in sec:
            cfg[key] = sec[key]
    for key in ("iters", "ref_iters", "max_backtracks_per_iter"):
        if key in sec:
            cfg[key] = sec.getint(key)
    if "full" in sec:
        cfg["full"] = sec.getboolean("full")
    for key in ("t_f", "t_g", "t_psi", "t_p", "L0", "A0", "gamma0", "r_u", "r_d"):
        if key in sec:
            cfg[key] = sec.getfloat(key)
    unknown = set(sec) - set(cfg)
    if unknown:
        raise ValueError(f"{path}: unknown keys {sorted(unknown)}")
    return cfg


def instance_path(out, kind, seed, full=False):
    return Path(out) / "instances" / f"{Kind(kind).value}-s{seed}{'-full' if full else ''}.txt"


def get_instance(kind, seed, full=False, out=None, ref_iters=5000):
    """Instance with reference optimum, cached under ``out/instances`` when given."""
    path = instance_path(out, kind, seed, full) if out is not None else None
    if path is not None and path.exists():
        inst = load_instance(path)
        if inst.x_hat is not None:
            return inst
    inst = with_reference(gen(kind, seed, full), ref_iters)
    if path is not None:
        save_instance(inst, path)
    return inst


def make_config(solver, inst, iters, overrides=None):
    """Solver configuration for a named benchmark solver on `inst`.

    Defaults: ``L0 = L_f``, ``r_u = 2``, ``r_d = 0.9^(2/3)`` for ACGM
    variants, ``A0 = 0`` and ``gamma0 = 1``.
    """
    ov = dict(overrides or {})
    L0 = ov.pop("L0", inst.L_f)
    max_bt = ov.pop("max_backtracks_per_iter", 60)
    if solver in STRONGLY_CONVEX_ONLY and not inst.mu > 0:
        raise ValueError(f"{solver} needs a strongly convex problem")
    if solver in _ACGM_FORMS:
        form, monotone = _ACGM_FORMS[solver]
        return SolverConfig(x0=inst.x0, L0=L0, A0=ov.pop("A0", 0.0),
                            gamma0=ov.pop("gamma0", 1.0), r_u=ov.pop("r_u", 2.0),
                            r_d=ov.pop("r_d", DEFAULT_RD), K=iters, monotone=monotone,
                            form=form, max_backtracks_per_iter=max_bt)
    cfg = BaselineConfig(x0=inst.x0, L0=L0, r_u=ov.pop("r_u", 2.0), K=iters,
                         variant=Variant(solver), max_backtracks_per_iter=max_bt)
    ov = {k: v for k, v in ov.items() if k not in ("A0", "gamma0", "r_d")}
    if ov:
        raise ValueError(f"unsupported overrides for {solver}: {sorted(ov)}")
    return cfg


def _run_solver(problem, config, name):
    if isinstance(config, BaselineConfig):
        return solve_baseline(problem, config, name=name, record_points=True)
    return solve(problem, config, name=name, record_points=True)


def _is_monotone(config):
    if isinstance(config, BaselineConfig):
        return config.variant is Variant.MFISTA_CP
    return config.monotone


def _is_fista_bt(config):
    return isinstance(config, BaselineConfig) and config.variant is Variant.FISTA_BT


def delta0(trace, x_hat, F_hat):
    """Initial gap ``A0 (F(x0) - F_hat) + gamma0/2 ||x0 - x_hat||^2``."""
    dx = trace.x0 - x_hat
    gap = trace.A0 * (trace.F0 - F_hat) if trace.A0 > 0 else 0.0
    return gap + 0.5 * trace.gamma0 * float(np.dot(dx, dx))


def annotate(trace, config, cost, x_hat=None, F_hat=None):
    """Fill ``isd``, ``wtu_cum`` and ``upper_bound`` of every record in place."""
    wtu = cumulative_wtu(trace.records, cost, _is_monotone(config), _is_fista_bt(config))
    d0 = delta0(trace, x_hat, F_hat) if x_hat is not None else None
    for rec, w in zip(trace.records, wtu):
        rec.wtu_cum = w
        if F_hat is not None:
            rec.isd = rec.F - F_hat
        if d0 is not None and rec.A > 0:
            rec.upper_bound = d0 / rec.A
    return trace


def run_benchmark(spec: RunSpec, instance=None) -> RunResult:
    """Run one solver on one instance and write its trace files.

    A line-search failure does not raise: the partial trace is written and
    the summary ``status`` records the failure.
    """
    inst = instance or get_instance(spec.problem, spec.seed, spec.full, spec.out, spec.ref_iters)
    problem = oracle_bundle(inst)
    config = make_config(spec.solver, inst, spec.iters, spec.overrides)
    try:
        _, trace = _run_solver(problem, config, spec.solver)
    except LineSearchError as exc:
        trace = exc.trace
    annotate(trace, config, spec.cost, inst.x_hat, inst.F_hat)

    spec.out.mkdir(parents=True, exist_ok=True)
    csv_path = write_trace_csv(trace.records, spec.out / f"{spec.stem}.csv")
    if trace.xs:
        np.savez_compressed(spec.out / f"{spec.stem}.npz", xs=np.array(trace.xs),
                            ys=np.array(trace.ys), zs=np.array(trace.zs))
    Ls = trace.column("L")
    summary = {
        "problem": spec.problem, "seed": spec.seed, "full": spec.full, "solver": spec.solver,
        "iters": spec.iters, "completed": len(trace), "status": trace.status,
        "L_f": inst.L_f, "avg_L": float(Ls.mean()) if len(Ls) else None,
        "total_backtracks": int(sum(r.backtracks for r in trace.records)),
        "overshoots": int(sum(r.overshoot for r in trace.records)),
        "F0": trace.F0, "F_hat": inst.F_hat, "A0": trace.A0, "gamma0": trace.gamma0,
        "final_isd": trace.records[-1].isd if trace.records else None,
        "wtu_total": trace.records[-1].wtu_cum if trace.records else 0.0,
        "cost": asdict(spec.cost), "overrides": spec.overrides,
    }
    with open(spec.out / f"{spec.stem}.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    return RunResult(spec, trace, config, csv_path, summary)


def load_run(out, stem):
    """Rebuild a :class:`Trace` from the files written by :func:`run_benchmark`."""
    out = Path(out)
    with open(out / f"{stem}.json") as fh:
        summary = json.load(fh)
    inst = load_instance(instance_path(out, summary["problem"], summary["seed"],
                                       summary["full"]))
    trace = Trace(solver=summary["solver"], x0=inst.x0, F0=summary["F0"], A0=summary["A0"],
                  gamma0=summary["gamma0"], records=read_trace_csv(out / f"{stem}.csv"),
                  status=summary["status"])
    npz = out / f"{stem}.npz"
    if npz.exists():
        pts = np.load(npz)
        trace.xs, trace.ys, trace.zs = list(pts["xs"]), list(pts["ys"]), list(pts["zs"])
    config = make_config(summary["solver"], inst, summary["iters"], summary["overrides"])
    return trace, config, inst, summary


# -- verification ------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def __str__(self):
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


@dataclass
class VerifyReport:
    checks: list = field(default_factory=list)

    @property
    def ok(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self):
        return [c.name for c in self.checks]

    def add(self, name, passed, detail=""):
        self.checks.append(CheckResult(name, bool(passed), detail))

    def __str__(self):
        return "\n".join(str(c) for c in self.checks)


def _worst(values):
    return float(np.max(values)) if len(values) else 0.0


def verify_run(trace, config, problem, *, x_hat=None, F_hat=None, L_f=None, cost=None,
               n_samples=20, seed=0):
    """Check a trace against the invariants the method guarantees.

    Checks are skipped (not reported) when the data they need is absent:
    the reference optimum for ISD checks, ``L_f`` for worst-case bounds,
    recorded points for the descent test and ``cost`` for WTU.
    """
    rep = VerifyReport()
    recs = trace.records
    rep.add("status", trace.status == "ok", trace.status)
    if not recs:
        rep.add("nonempty", False, "trace has no records")
        return rep
    k = np.array([r.k for r in recs], dtype=float)
    A = trace.column("A")
    F = trace.column("F")
    L = trace.column("L")
    acgm = isinstance(config, SolverConfig)
    mu, mu_f, mu_psi = problem.mu, problem.mu_f, problem.mu_psi

    A_prev = np.concatenate([[trace.A0], A[:-1]])
    if acgm:
        # FISTA-BT reports t_k^2 / L_k, which may dip after an LCE increase
        rep.add("A_increasing", np.all(A > A_prev), f"min increment {np.min(A - A_prev):.3e}")

    if _is_monotone(config):
        F_prev = np.concatenate([[trace.F0], F[:-1]])
        rep.add("monotone", np.all(F <= F_prev),
                f"{int(np.sum(F > F_prev))} increases")

    if acgm:
        a = A - A_prev
        gamma = trace.gamma0 + (A - trace.A0) * mu
        lhs = (L + mu_psi) * a * a
        rel = np.abs(lhs - A * gamma) / (A * gamma)
        rep.add("guarantee_equality", np.all(rel <= 1e-8), f"max rel err {_worst(rel):.3e}")

    if trace.ys is not None and trace.zs is not None and len(trace.ys) == len(recs):
        rng = np.random.default_rng(seed)
        idx = np.sort(rng.choice(len(recs), size=min(n_samples, len(recs)), replace=False))
        bad = []
        for i in idx:
            y, z = np.asarray(trace.ys[i]), np.asarray(trace.zs[i])
            if not descent_condition(sample_gradient(problem, y), recs[i].L, z,
                                     problem.f_eval(z)):
                bad.append(int(recs[i].k))
        rep.add("descent", not bad, f"{len(idx)} sampled, failures at k={bad}")

    if x_hat is not None and F_hat is not None:
        tol = _TOL_REF * (1.0 + abs(F_hat))
        isd = F - F_hat
        rep.add("isd_nonnegative", np.all(isd >= -tol), f"min isd {np.min(isd):.3e}")
        d0 = delta0(trace, x_hat, F_hat)
        excess = A * isd - d0
        rep.add("isdub", np.all(excess <= 1e-6 * (1.0 + abs(F_hat))),
                f"Delta0 = {d0:.6g}, max A_k*isd - Delta0 = {_worst(excess):.3e}")

        if acgm and L_f is not None and trace.gamma0 >= trace.A0 * mu:
            L_u = max(config.r_u * L_f, config.r_d * config.L0)
            q_u = mu / (L_u + mu_psi)
            A_bar = A / trace.gamma0
            quad = (k + 1) ** 2 / (4 * (L_u - mu_f))
            rep.add("worst_case_A_quadratic", np.all(A_bar >= quad),
                    f"min ratio {np.min(A_bar / quad):.4g}")
            if mu > 0:
                lin = (1 - math.sqrt(q_u)) ** (-(k - 1)) / (L_u - mu_f)
                rep.add("worst_case_A_linear", np.all(A_bar >= lin),
                        f"min ratio {np.min(A_bar / lin):.4g}")
            env = np.minimum(4 / (k + 1) ** 2, (1 - math.sqrt(q_u)) ** (k - 1))
            bound = env * (L_u - mu_f) * d0 / trace.gamma0
            rep.add("worst_case_F", np.all(isd <= bound + 1e-6 * (1.0 + abs(F_hat))),
                    f"max isd/bound {_worst(isd / bound):.4g}")

    if cost is not None:
        w = trace.column("wtu_cum")
        if not np.any(np.isnan(w)):
            expect = cumulative_wtu(recs, cost, _is_monotone(config), _is_fista_bt(config))
            rep.add("wtu", np.all(np.diff(np.concatenate([[0.0], w])) >= 0)
                    and np.allclose(w, expect, rtol=0, atol=1e-9 * max(1.0, w[-1])),
                    f"total {w[-1]:g} WTU")
    return rep


# -- plots -------------------------------------------------------------------

def emit_plots(traces, axis="iterations", out=".", fmt="svg", upper_bounds=False):
    """Write log-scale ISD curves and LCE variation curves.

    Parameters
    ----------
    traces : mapping of label -> Trace
    axis : {"iterations", "wtu"}
    upper_bounds : bool
        Overlay ``U_k = Delta0 / A_k`` as dashed lines.

    Returns
    -------
    list of Path
    """
    if axis not in ("iterations", "wtu"):
        raise ValueError("axis must be 'iterations' or 'wtu'")
    traces = {lbl: tr for lbl, tr in traces.items() if len(tr)}
    if not traces:
        warnings.warn("no non-empty traces to plot")
        return []
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    xlabel = "iterations" if axis == "iterations" else "WTU"

    def xs(tr):
        return tr.column("k") if axis == "iterations" else tr.column("wtu_cum")

    paths = []
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for lbl, tr in traces.items():
        isd = tr.column("isd")
        isd = np.where(isd > 0, isd, np.nan)
        (line,) = ax.semilogy(xs(tr), isd, label=lbl)
        if upper_bounds:
            ax.semilogy(xs(tr), tr.column("upper_bound"), "--", color=line.get_color(),
                        label=f"{lbl} bound")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("ISD")
    ax.grid(True, which="both", ls=":")
    ax.legend()
    fig.tight_layout()
    paths.append(out / f"isd_vs_{axis}.{fmt}")
    fig.savefig(paths[-1])
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for lbl, tr in traces.items():
        ax.plot(xs(tr), tr.column("L"), label=lbl)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("LCE")
    ax.grid(True, ls=":")
    ax.legend()
    fig.tight_layout()
    paths.append(out / f"lce_vs_{axis}.{fmt}")
    fig.savefig(paths[-1])
    plt.close(fig)
    return paths
