"""Command-line benchmark driver.

Examples
--------
::

    acgm-bench ref --problem RR --seed 0 --out bench-out
    acgm-bench run --problem all --solver all --seed 0 --iters 300 --out bench-out
    acgm-bench verify --problem all --solver all --seed 0 --out bench-out
    acgm-bench plot --problem RR --seed 0 --axis wtu --out bench-out
"""

import argparse
import sys
from pathlib import Path

from .bench import (
    SOLVERS,
    STRONGLY_CONVEX_ONLY,
    RunSpec,
    emit_plots,
    get_instance,
    instance_path,
    load_config,
    load_run,
    run_benchmark,
    verify_run,
)
from .problems import Kind, gen, oracle_bundle, save_instance
from .wtu import CostModel

DEFAULT_SOLVERS = ("ACGM", "MACGM", "BACGM", "BMACGM", "FISTA-BT", "FISTA-CP", "MFISTA-CP")
_COST_KEYS = ("t_f", "t_g", "t_psi", "t_p")
_OVERRIDE_KEYS = ("L0", "A0", "gamma0", "r_u", "r_d", "max_backtracks_per_iter")


def _kinds(value):
    return [k.value for k in Kind] if value == "all" else [Kind(value).value]


def _strongly_convex(kind):
    return Kind(kind) in (Kind.RR, Kind.EN)


def _solvers(value, kind):
    if value == "all":
        return [s for s in DEFAULT_SOLVERS
                if _strongly_convex(kind) or s not in STRONGLY_CONVEX_ONLY]
    return [value]


def _settings(args):
    cfg = load_config(args.config) if args.config else {}
    for key in ("problem", "solver", "seed", "iters", "out", "ref_iters"):
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    if getattr(args, "full", False):
        cfg["full"] = True
    if "seed" not in cfg:
        raise SystemExit("error: a seed is required (--seed or 'seed' in the config file)")
    cfg.setdefault("problem", "all")
    cfg.setdefault("solver", "all")
    cfg.setdefault("iters", 300)
    cfg.setdefault("out", "bench-out")
    cfg.setdefault("full", False)
    cfg.setdefault("ref_iters", 5000)
    return cfg


def _cost(cfg):
    return CostModel(**{k: cfg[k] for k in _COST_KEYS if k in cfg})


def cmd_gen(cfg):
    for kind in _kinds(cfg["problem"]):
        inst = gen(kind, cfg["seed"], cfg["full"])
        path = save_instance(inst, instance_path(cfg["out"], kind, cfg["seed"], cfg["full"]))
        print(f"{kind}: {inst.shape[0]}x{inst.shape[1]}, L_f = {inst.L_f:.6g} -> {path}")
    return 0


def cmd_ref(cfg):
    for kind in _kinds(cfg["problem"]):
        inst = get_instance(kind, cfg["seed"], cfg["full"], cfg["out"], cfg["ref_iters"])
        print(f"{kind}: F_hat = {inst.F_hat:.12g}")
    return 0


def cmd_run(cfg):
    overrides = {k: cfg[k] for k in _OVERRIDE_KEYS if k in cfg}
    print(f"{'problem':8s} {'solver':10s} {'status':8s} {'avg L/L_f':>10s} "
          f"{'backtracks':>10s} {'WTU':>8s} {'final ISD':>12s}")
    failed = False
    for kind in _kinds(cfg["problem"]):
        for solver in _solvers(cfg["solver"], kind):
            spec = RunSpec(problem=kind, seed=cfg["seed"], solver=solver, iters=cfg["iters"],
                           full=cfg["full"], cost=_cost(cfg), out=Path(cfg["out"]),
                           overrides=dict(overrides), ref_iters=cfg["ref_iters"])
            s = run_benchmark(spec).summary
            ok = s["status"] == "ok"
            failed |= not ok
            isd = s["final_isd"]
            print(f"{kind:8s} {solver:10s} {'ok' if ok else 'FAILED':8s} "
                  f"{s['avg_L'] / s['L_f']:10.4f} {s['total_backtracks']:10d} "
                  f"{s['wtu_total']:8g} {isd if isd is None else format(isd, '12.4e')}")
    return 1 if failed else 0


def cmd_verify(cfg):
    out = Path(cfg["out"])
    failures = 0
    for kind in _kinds(cfg["problem"]):
        for solver in _solvers(cfg["solver"], kind):
            stem = RunSpec(problem=kind, seed=cfg["seed"], solver=solver,
                           full=cfg["full"]).stem
            if not (out / f"{stem}.csv").exists():
                print(f"{stem}: missing (run it first)")
                failures += 1
                continue
            trace, config, inst, summary = load_run(out, stem)
            cost = CostModel(**summary["cost"])
            rep = verify_run(trace, config, oracle_bundle(inst), x_hat=inst.x_hat,
                             F_hat=inst.F_hat, L_f=inst.L_f, cost=cost)
            print(f"{stem}: {'ok' if rep.ok else 'FAILED'}")
            for check in rep.checks:
                print(f"  {check}")
            failures += not rep.ok
    return 1 if failures else 0


def cmd_plot(cfg, axis, fmt):
    out = Path(cfg["out"])
    status = 0
    for kind in _kinds(cfg["problem"]):
        traces = {}
        for solver in _solvers(cfg["solver"], kind):
            stem = RunSpec(problem=kind, seed=cfg["seed"], solver=solver,
                           full=cfg["full"]).stem
            if (out / f"{stem}.csv").exists():
                traces[solver] = load_run(out, stem)[0]
        if not traces:
            print(f"{kind}: no traces found")
            status = 1
            continue
        paths = emit_plots(traces, axis=axis, out=out / "plots" / kind, fmt=fmt,
                           upper_bounds=_strongly_convex(kind))
        for p in paths:
            print(p)
    return status


def build_parser():
    parser = argparse.ArgumentParser(prog="acgm-bench", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key = value config file")
        p.add_argument("--problem", choices=[k.value for k in Kind] + ["all"])
        p.add_argument("--seed", type=int)
        p.add_argument("--full", action="store_true", help="full-scale instances")
        p.add_argument("--out", help="output directory (default bench-out)")
        return p

    common(sub.add_parser("gen", help="generate instances"))
    p = common(sub.add_parser("ref", help="compute reference optima"))
    p.add_argument("--ref-iters", dest="ref_iters", type=int)
    p = common(sub.add_parser("run", help="run benchmark solvers"))
    p.add_argument("--solver", choices=list(SOLVERS) + ["all"])
    p.add_argument("--iters", type=int)
    p.add_argument("--ref-iters", dest="ref_iters", type=int)
    p = common(sub.add_parser("verify", help="check invariants of saved runs"))
    p.add_argument("--solver", choices=list(SOLVERS) + ["all"])
    p = common(sub.add_parser("plot", help="plot saved runs"))
    p.add_argument("--solver", choices=list(SOLVERS) + ["all"])
    p.add_argument("--axis", choices=["iterations", "wtu"], default="iterations")
    p.add_argument("--format", dest="fmt", default="svg", choices=["svg", "pdf"])
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    cfg = _settings(args)
    if args.command == "gen":
        return cmd_gen(cfg)
    if args.command == "ref":
        return cmd_ref(cfg)
    if args.command == "run":
        return cmd_run(cfg)
    if args.command == "verify":
        return cmd_verify(cfg)
    return cmd_plot(cfg, args.axis, args.fmt)


if __name__ == "__main__":
    sys.exit(main())
