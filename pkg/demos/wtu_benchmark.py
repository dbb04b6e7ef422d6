"""
Benchmarking in wall-clock time units
=====================================

Iterations are not equally expensive: a failed descent test or a
rejected monotone step stalls the pipeline. With one matrix-vector
product costing 1 WTU, a gradient costs 2 WTU and each ACGM backtrack
3 WTU. This script runs the standard solver set on every reduced
problem, writes CSV traces and plots convergence against WTU.
"""

from pathlib import Path

from acgm.bench import RunSpec, emit_plots, run_benchmark
from acgm.cli import DEFAULT_SOLVERS

out = Path("bench-out")
for kind in ("LASSO", "NNLS", "L1LR", "RR", "EN"):
    traces = {}
    print(kind)
    for solver in DEFAULT_SOLVERS:
        if solver.startswith("B") and kind not in ("RR", "EN"):
            continue        # border-case variants need strong convexity
        res = run_benchmark(RunSpec(problem=kind, seed=0, solver=solver, iters=300, out=out))
        s = res.summary
        print(f"  {solver:10s} {s['wtu_total']:6g} WTU  final F - F_hat = {s['final_isd']:.2e}")
        traces[solver] = res.trace
    for path in emit_plots(traces, axis="wtu", out=out / "plots" / kind,
                           upper_bounds=kind in ("RR", "EN")):
        print(f"  wrote {path}")
