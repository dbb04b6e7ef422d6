"""Wall-clock time unit (WTU) cost accounting.

Oracle calls are charged ``t_f``, ``t_g``, ``t_psi`` and ``t_p``; vector
operations are free. The charges assume speculative parallel execution:
an iteration costs one proximal gradient step, and only failed
line-search or monotonicity tests stall the pipeline.
"""

import math
from dataclasses import dataclass

__all__ = [
    "CostModel",
    "MATVEC_COSTS",
    "iteration_wtu",
    "stall_wtu",
    "fista_bt_iteration_wtu",
    "search_overhead",
    "equal_overhead_rd",
    "cumulative_wtu",
]


@dataclass(frozen=True)
class CostModel:
    t_f: float = 1.0
    t_g: float = 2.0
    t_psi: float = 0.0
    t_p: float = 0.0

    def __post_init__(self):
        if min(self.t_f, self.t_g, self.t_psi, self.t_p) < 0:
            raise ValueError("oracle costs must be non-negative")

    @property
    def t_F(self):
        """Objective value ``f + psi``; the two terms are computed in parallel."""
        return max(self.t_f, self.t_psi)

    @property
    def t_T(self):
        """Proximal gradient step; the prox waits for the gradient."""
        return self.t_g + self.t_p


# one matrix-vector product = 1 WTU; the regularizer is free
MATVEC_COSTS = CostModel(t_f=1.0, t_g=2.0, t_psi=0.0, t_p=0.0)


def stall_wtu(model: CostModel, lssc_passed: bool, mc_passed: bool = True) -> float:
    """Stall added to an ACGM iteration by the outcome of its tests.

    The monotonicity condition is never evaluated after a failed descent
    test, so ``(False, False)`` is rejected.
    """
    if lssc_passed:
        return 0.0 if mc_passed else model.t_F
    if not mc_passed:
        raise ValueError("monotonicity is not evaluated when the line-search test fails")
    return model.t_f + model.t_g + model.t_p


def iteration_wtu(model: CostModel, backtracks: int, overshoot: bool, monotone: bool) -> float:
    """WTU charged for one generalized ACGM iteration."""
    if backtracks < 0:
        raise ValueError("backtracks must be non-negative")
    cost = model.t_T + backtracks * stall_wtu(model, lssc_passed=False)
    if monotone and overshoot:
        cost += stall_wtu(model, lssc_passed=True, mc_passed=False)
    return cost


def fista_bt_iteration_wtu(model: CostModel, backtracks: int) -> float:
    """FISTA backtracks reuse ``grad f(y)`` and only redo ``f`` and the prox."""
    if backtracks < 0:
        raise ValueError("backtracks must be non-negative")
    return model.t_T + backtracks * (model.t_f + model.t_p)


def search_overhead(model: CostModel, r_u: float, r_d: float, method: str = "ACGM") -> float:
    """Average backtracking cost per WTU of advancement, for LCEs hovering
    around a fixed value.

    ``method`` is ``"ACGM"`` or ``"AMGS"``.
    """
    if not r_u > 1:
        raise ValueError("r_u must exceed 1")
    if not 0 < r_d <= 1:
        raise ValueError("r_d must lie in (0, 1]")
    if r_d == 1:
        return 0.0
    ratio = -math.log(r_d) / math.log(r_u)
    method = method.upper()
    if method == "ACGM":
        return (model.t_f + model.t_g + model.t_p) * ratio / model.t_T
    if method == "AMGS":
        return (2 * model.t_g + model.t_p) * ratio / (2 * model.t_T)
    raise ValueError(f"unknown method {method!r}")


def equal_overhead_rd(model: CostModel, r_d_amgs: float = 0.9) -> float:
    """ACGM decrease rate whose overhead matches AMGS at the same ``r_u``."""
    exponent = (2 * model.t_g + model.t_p) / (2 * (model.t_f + model.t_g + model.t_p))
    return r_d_amgs ** exponent


def cumulative_wtu(records, model: CostModel, monotone: bool, fista_bt: bool = False):
    """Running WTU total after each record."""
    total = 0.0
    out = []
    for rec in records:
        if fista_bt:
            total += fista_bt_iteration_wtu(model, rec.backtracks)
        else:
            total += iteration_wtu(model, rec.backtracks, rec.overshoot, monotone)
        out.append(total)
    return out
