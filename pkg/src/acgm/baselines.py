"""Reference competitors: FISTA with backtracking, and FISTA-CP presets of ACGM."""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .oracle import descent_condition, prox_grad_step, sample_gradient
from .solvers import Form, LineSearchError, SolverConfig, solve_ex
from .trace import IterationRecord, Trace

__all__ = ["Variant", "BaselineConfig", "solve_fista_bt", "preset_fista_cp", "solve_baseline"]


class Variant(str, Enum):
    FISTA_BT = "FISTA-BT"
    FISTA_CP = "FISTA-CP"
    MFISTA_CP = "MFISTA-CP"


@dataclass
class BaselineConfig:
    x0: np.ndarray
    L0: float
    r_u: float = 2.0
    K: int = 100
    variant: Variant = Variant.FISTA_BT
    max_backtracks_per_iter: int = 60

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        self.variant = Variant(self.variant)
        if not self.L0 > 0:
            raise ValueError("L0 must be positive")
        if not self.r_u > 1:
            raise ValueError("r_u must exceed 1")


def solve_fista_bt(problem, config: BaselineConfig, *, name="FISTA-BT", record_points=False):
    """FISTA with increase-only backtracking.

    Strong convexity is ignored. The gradient at ``y`` is computed once per
    iteration and reused by every backtrack, so a backtrack costs one
    proximal step and one ``f`` evaluation.

    The ``A`` column of the trace is ``t_k^2 / L_k``, the guarantee for which
    ``A_k (F(x_k) - F*) <= ||x_0 - x*||^2 / 2``.
    """
    x = config.x0
    y = x
    t = 1.0
    L = config.L0
    F0 = problem.F(x)
    trace = Trace(solver=name, x0=x.copy(), F0=F0, A0=0.0, gamma0=1.0,
                  xs=[] if record_points else None,
                  ys=[] if record_points else None,
                  zs=[] if record_points else None)
    for k in range(config.K):
        sample = sample_gradient(problem, y)
        backtracks = 0
        while True:
            z = prox_grad_step(problem, L, y, sample)
            f_z = problem.f_eval(z)
            if descent_condition(sample, L, z, f_z):
                break
            backtracks += 1
            if backtracks > config.max_backtracks_per_iter:
                trace.status = f"failed at iteration {k + 1}: line-search cap"
                raise LineSearchError(f"FISTA-BT line-search failed at iteration {k + 1}",
                                      trace)
            L *= config.r_u
        psi_z = problem.psi_eval(z)
        F_z = f_z + psi_z if math.isfinite(psi_z) else math.inf
        t_next = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        trace.records.append(IterationRecord(k=k + 1, L=L, backtracks=backtracks,
                                             overshoot=False, F=F_z, A=t * t / L))
        if record_points:
            trace.xs.append(z)
            trace.ys.append(y)
            trace.zs.append(z)
        y_next = z + ((t - 1.0) / t_next) * (z - x)
        x, y, t = z, y_next, t_next
    return x, trace


def preset_fista_cp(problem, x0, L, K, monotone=False):
    """ACGM configuration equivalent to (M)FISTA-CP with step ``1/L``.

    With ``r_d = 1`` and ``L >= L_f`` the descent test always passes, so the
    step size never changes.
    """
    if not L > problem.mu_f:
        raise ValueError("fixed LCE must exceed mu_f")
    return SolverConfig(x0=x0, L0=L, A0=0.0, gamma0=1.0, r_u=2.0, r_d=1.0, K=K,
                        monotone=monotone, form=Form.EXTRAPOLATED)


def solve_baseline(problem, config: BaselineConfig, **kwargs):
    if config.variant is Variant.FISTA_BT:
        return solve_fista_bt(problem, config, **kwargs)
    monotone = config.variant is Variant.MFISTA_CP
    cfg = preset_fista_cp(problem, config.x0, config.L0, config.K, monotone)
    cfg.max_backtracks_per_iter = config.max_backtracks_per_iter
    kwargs.setdefault("name", config.variant.value)
    return solve_ex(problem, cfg, **kwargs)
