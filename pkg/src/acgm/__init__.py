"""Generalized accelerated composite gradient method (ACGM) with adaptive
line-search and optional monotonicity, plus a reproducible benchmark suite."""

from .baselines import BaselineConfig, Variant, preset_fista_cp, solve_baseline, solve_fista_bt
from .oracle import (
    CompositeProblem,
    ConvergenceError,
    GradientSample,
    composite_gradient,
    descent_condition,
    eval_Q,
    prox_grad_step,
    sample_gradient,
    spectral_norm,
)
from .problems import Kind, ProblemInstance, gen, oracle_bundle, reference_optimum
from .solvers import (
    DEFAULT_RD,
    Form,
    LineSearchError,
    SolverConfig,
    solve,
    solve_border,
    solve_es,
    solve_ex,
)
from .trace import IterationRecord, Trace
from .wtu import CostModel, iteration_wtu, search_overhead

__version__ = "0.1.0"
