"""Generalized accelerated composite gradient method (ACGM).

Three mathematically equivalent forms are provided:

* :func:`solve_es` keeps the estimate-sequence vertex ``v_k`` and curvature
  ``gamma_k`` explicitly;
* :func:`solve_ex` replaces them by the vertex extrapolation factor ``t_k``
  and a single difference vector ``d_k``;
* :func:`solve_border` is the simplified extrapolated form for the
  strongly convex parameter choice ``gamma_0 = A_0 mu``.

Each form has an adaptive backtracking line-search (decrease by ``r_d``
at the start of every iteration, increase by ``r_u`` on failure) and an
optional monotone mode that keeps ``x_k`` whenever the new point ``z``
would increase the objective.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .oracle import (
    CompositeProblem,
    ConvergenceError,
    descent_condition,
    prox_grad_step,
    sample_gradient,
)
from .trace import IterationRecord, Trace

__all__ = [
    "Form",
    "SolverConfig",
    "EsState",
    "ExState",
    "StepOutcome",
    "LineSearchError",
    "DEFAULT_RD",
    "weight_step",
    "auxiliary_point_es",
    "vertex_update",
    "line_search",
    "monotone_select",
    "t_init",
    "t_step",
    "momentum",
    "recover_A",
    "solve_es",
    "solve_ex",
    "solve_border",
    "solve",
]

# 0.9 ** (2/3): equal line-search overhead with AMGS at r_d = 0.9 (t_f=1, t_g=2, t_p=0)
DEFAULT_RD = 0.9 ** (2.0 / 3.0)


class Form(str, Enum):
    ESTIMATE_SEQUENCE = "estimate_sequence"
    EXTRAPOLATED = "extrapolated"
    BORDER_CASE = "border_case"


class LineSearchError(ConvergenceError):
    """Backtracking exceeded its per-iteration cap.

    ``trace`` holds the partial run history when raised from a solver.
    """

    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


@dataclass
class SolverConfig:
    """Run parameters of generalized ACGM.

    ``A0 >= 0`` and ``gamma0 > 0`` weight the initial objective gap and
    domain distance in the convergence guarantee. The border-case form
    ignores them and uses ``(A0, gamma0) = (1, mu)``.
    """

    x0: np.ndarray
    L0: float
    A0: float = 0.0
    gamma0: float = 1.0
    r_u: float = 2.0
    r_d: float = DEFAULT_RD
    K: int = 100
    monotone: bool = False
    form: Form = Form.EXTRAPOLATED
    max_backtracks_per_iter: int = 60

    def __post_init__(self):
        self.x0 = np.asarray(self.x0, dtype=float)
        self.form = Form(self.form)
        if not self.L0 > 0:
            raise ValueError("L0 must be positive")
        if self.A0 < 0:
            raise ValueError("A0 must be non-negative")
        if not self.gamma0 > 0:
            raise ValueError("gamma0 must be positive")
        if not self.r_u > 1:
            raise ValueError("r_u must exceed 1")
        if not 0 < self.r_d <= 1:
            raise ValueError("r_d must lie in (0, 1]")
        if self.K < 0:
            raise ValueError("K must be non-negative")
        if self.max_backtracks_per_iter < 1:
            raise ValueError("max_backtracks_per_iter must be positive")


@dataclass
class EsState:
    x: np.ndarray
    v: np.ndarray
    L: float
    A: float
    gamma: float
    F_x: float


@dataclass
class ExState:
    """Extrapolated-form state. In the border case ``d`` carries the
    ``sqrt(L + mu_psi)`` scaling and ``t`` is informational only."""

    x: np.ndarray
    d: np.ndarray
    L: float
    t: float
    q: float
    A: float
    F_x: float


@dataclass
class StepOutcome:
    z: np.ndarray
    f_z: float
    y: np.ndarray
    accepted_L: float
    backtracks: int
    a: float
    t: float = math.nan
    overshoot: bool = False


def weight_step(gamma_k, A_k, L_cand, mu_f, mu_psi):
    """Largest weight ``a`` with ``(L + mu_psi) a^2 = (A_k + a)(gamma_k + a mu)``."""
    lm = L_cand - mu_f
    if not lm > 0:
        raise ValueError(f"Lipschitz estimate {L_cand} must exceed mu_f = {mu_f}")
    s = gamma_k + A_k * (mu_f + mu_psi)
    return (s + math.sqrt(s * s + 4.0 * lm * A_k * gamma_k)) / (2.0 * lm)


def auxiliary_point_es(state: EsState, a, gamma_next):
    wx = state.A * gamma_next
    wv = a * state.gamma
    return (wx * state.x + wv * state.v) / (wx + wv)


def vertex_update(state: EsState, a, gamma_next, L_acc, y, z, mu_f, mu_psi):
    return (state.gamma * state.v + a * (L_acc + mu_psi) * z - a * (L_acc - mu_f) * y) / gamma_next


def t_init(L0, mu_psi, A0, gamma0):
    if not gamma0 > 0:
        raise ValueError("gamma0 must be positive")
    return math.sqrt((L0 + mu_psi) * A0 / gamma0)


def t_step(t_k, q_k, L_k, L_cand, mu, mu_psi):
    """Vertex extrapolation factor for a candidate LCE; returns ``(t_next, q_next)``."""
    c = 1.0 - q_k * t_k * t_k
    r = 4.0 * (L_cand + mu_psi) / (L_k + mu_psi) * t_k * t_k
    root = math.sqrt(c * c + r)
    # positive root of t^2 - c t - r/4 = 0, written to avoid cancellation when c < 0
    t_next = 0.5 * (c + root) if c >= 0 else 0.5 * r / (root - c)
    return t_next, mu / (L_cand + mu_psi)


def momentum(t_k, t_next, q_next, overshoot_prev=False):
    """Return ``(omega, beta)`` for the two-point form ``y = x_k + beta (z_k - x_{k-1})``."""
    if not t_next > 0:
        raise ValueError("t_next must be positive")
    omega = (1.0 - q_next * t_next) / ((1.0 - q_next) * t_next)
    beta = t_k * omega if overshoot_prev else (t_k - 1.0) * omega
    return omega, beta


def recover_A(t, L, q, A0, gamma0, mu, mu_psi):
    """Convergence guarantee ``A_k`` from extrapolated-form state (needs ``gamma0 > A0 mu``)."""
    return (gamma0 - A0 * mu) * t * t / ((L + mu_psi) * (1.0 - q * t * t))


def _first_candidate(L_k, r_d, mu_f):
    L = r_d * L_k
    if mu_f > 0:
        L = max(L, mu_f * (1.0 + 1e-12) * (1.0 + 1e-6))
    return L


def _search(problem, L_k, config, candidate):
    L = _first_candidate(L_k, config.r_d, problem.mu_f)
    backtracks = 0
    while True:
        y, a, t = candidate(L)
        sample = sample_gradient(problem, y)
        z = prox_grad_step(problem, L, y, sample)
        f_z = problem.f_eval(z)
        if descent_condition(sample, L, z, f_z):
            return StepOutcome(z, f_z, y, L, backtracks, a, t)
        backtracks += 1
        if backtracks > config.max_backtracks_per_iter:
            raise LineSearchError(
                f"line-search failed after {backtracks - 1} backtracks (L = {L:.6g}); "
                "f may lack a locally Lipschitz gradient")
        L *= config.r_u


def line_search(problem: CompositeProblem, state, config: SolverConfig) -> StepOutcome:
    """Find the first candidate ``r_u^j r_d L_k`` passing the descent test.

    ``y`` (and hence ``grad f(y)``) is recomputed for every candidate; within
    one candidate the gradient sample is reused.
    """
    mu_f, mu_psi, mu = problem.mu_f, problem.mu_psi, problem.mu

    if isinstance(state, EsState):
        def candidate(L):
            a = weight_step(state.gamma, state.A, L, mu_f, mu_psi)
            return auxiliary_point_es(state, a, state.gamma + a * mu), a, math.nan

    elif config.form is Form.BORDER_CASE:
        sqrt_mu = math.sqrt(mu)

        def candidate(L):
            s = math.sqrt(L + mu_psi)
            y = state.x + state.d / (s + sqrt_mu)
            return y, state.A * sqrt_mu / (s - sqrt_mu), s / sqrt_mu

    else:
        gamma_k = config.gamma0 - config.A0 * mu + state.A * mu

        def candidate(L):
            t_next, q_next = t_step(state.t, state.q, state.L, L, mu, mu_psi)
            omega, _ = momentum(state.t, t_next, q_next)
            a = weight_step(gamma_k, state.A, L, mu_f, mu_psi)
            return state.x + omega * state.d, a, t_next

    return _search(problem, state.L, config, candidate)


def monotone_select(problem, z, F_z, x_k, F_xk, monotone=True):
    """Choose the next main iterate; returns ``(x_next, F_next, overshoot)``.

    Ties go to ``z``. In non-monotone mode ``z`` is always taken.
    """
    if math.isinf(F_z) and math.isinf(F_xk):
        raise ValueError("objective is infinite at both candidates; infeasible problem or start")
    if not monotone or F_z <= F_xk:
        return z, F_z, False
    return x_k, F_xk, True


def _initial_F(problem, config, A0):
    F0 = problem.F(config.x0)
    if A0 > 0 and not math.isfinite(F0):
        raise ValueError("A0 > 0 requires a feasible starting point (finite F(x0))")
    return F0


def _new_trace(name, config, F0, A0, gamma0, record_points):
    return Trace(solver=name, x0=config.x0.copy(), F0=F0, A0=A0, gamma0=gamma0,
                 xs=[] if record_points else None,
                 ys=[] if record_points else None,
                 zs=[] if record_points else None)


def _default_name(config):
    base = {Form.ESTIMATE_SEQUENCE: "ACGM-ES", Form.EXTRAPOLATED: "ACGM",
            Form.BORDER_CASE: "BACGM"}[config.form]
    if config.monotone:
        base = base.replace("ACGM", "MACGM")
    return base


def _record(trace, k, out, x, F, A):
    trace.records.append(IterationRecord(k=k, L=out.accepted_L, backtracks=out.backtracks,
                                         overshoot=out.overshoot, F=F, A=A))
    if trace.xs is not None:
        trace.xs.append(x)
        trace.ys.append(out.y)
        trace.zs.append(out.z)


def _advance(problem, out, state, config):
    """Monotonicity step shared by all forms; returns (x_next, F_next, overshoot)."""
    psi_z = problem.psi_eval(out.z)
    F_z = out.f_z + psi_z if math.isfinite(psi_z) else math.inf
    x_next, F_next, overshoot = monotone_select(problem, out.z, F_z, state.x, state.F_x,
                                                config.monotone)
    out.overshoot = overshoot
    return x_next, F_next, overshoot


def _run(step, state, trace, K):
    for k in range(K):
        try:
            state = step(k, state)
        except LineSearchError as exc:
            trace.status = f"failed at iteration {k + 1}: {exc}"
            exc.trace = trace
            raise
    return state


def solve_es(problem: CompositeProblem, config: SolverConfig, *, name=None, record_points=False):
    """Generalized ACGM in estimate-sequence form.

    Returns
    -------
    x : ndarray
        Final main iterate ``x_K``.
    trace : Trace
        One record per iteration.
    """
    mu_f, mu_psi, mu = problem.mu_f, problem.mu_psi, problem.mu
    F0 = _initial_F(problem, config, config.A0)
    trace = _new_trace(name or _default_name(config), config, F0, config.A0, config.gamma0,
                       record_points)
    state = EsState(config.x0, config.x0.copy(), config.L0, config.A0, config.gamma0, F0)

    def step(k, st):
        out = line_search(problem, st, config)
        gamma_next = st.gamma + out.a * mu
        x_next, F_next, _ = _advance(problem, out, st, config)
        v_next = vertex_update(st, out.a, gamma_next, out.accepted_L, out.y, out.z, mu_f, mu_psi)
        new = EsState(x_next, v_next, out.accepted_L, st.A + out.a, gamma_next, F_next)
        _record(trace, k + 1, out, x_next, F_next, new.A)
        return new

    state = _run(step, state, trace, config.K)
    return state.x, trace


def solve_ex(problem: CompositeProblem, config: SolverConfig, *, name=None, record_points=False):
    """Generalized ACGM in extrapolated form.

    Produces the same main iterates as :func:`solve_es`. ``A_k`` is carried
    alongside for reporting; when ``gamma0 > A0 mu`` it can also be recovered
    from ``t_k`` with :func:`recover_A`.
    """
    if config.form is Form.BORDER_CASE:
        config = replace(config, form=Form.EXTRAPOLATED)
    mu_psi, mu = problem.mu_psi, problem.mu
    F0 = _initial_F(problem, config, config.A0)
    trace = _new_trace(name or _default_name(config), config, F0, config.A0, config.gamma0,
                       record_points)
    t0 = t_init(config.L0, mu_psi, config.A0, config.gamma0)
    # phantom iteration: x_{-1} = x_0, d_0 = 0
    state = ExState(config.x0, np.zeros_like(config.x0), config.L0, t0,
                    mu / (config.L0 + mu_psi), config.A0, F0)

    def step(k, st):
        out = line_search(problem, st, config)
        x_next, F_next, overshoot = _advance(problem, out, st, config)
        d_next = (out.t - (0.0 if overshoot else 1.0)) * (out.z - st.x)
        new = ExState(x_next, d_next, out.accepted_L, out.t, mu / (out.accepted_L + mu_psi),
                      st.A + out.a, F_next)
        _record(trace, k + 1, out, x_next, F_next, new.A)
        return new

    state = _run(step, state, trace, config.K)
    return state.x, trace


def solve_border(problem: CompositeProblem, config: SolverConfig, *, name=None,
                 record_points=False):
    """Border-case ACGM (``A0 = 1``, ``gamma0 = mu``) in extrapolated form.

    Requires a strongly convex objective. The configured ``A0`` and
    ``gamma0`` are overridden.
    """
    mu_psi, mu = problem.mu_psi, problem.mu
    if not mu > 0:
        raise ValueError("border-case ACGM needs mu > 0; use solve_ex for non-strongly "
                         "convex problems")
    config = replace(config, A0=1.0, gamma0=mu, form=Form.BORDER_CASE)
    sqrt_mu = math.sqrt(mu)
    F0 = _initial_F(problem, config, 1.0)
    trace = _new_trace(name or _default_name(config), config, F0, 1.0, mu, record_points)
    state = ExState(config.x0, np.zeros_like(config.x0), config.L0,
                    math.sqrt((config.L0 + mu_psi) / mu), mu / (config.L0 + mu_psi), 1.0, F0)

    def step(k, st):
        out = line_search(problem, st, config)
        x_next, F_next, overshoot = _advance(problem, out, st, config)
        s = math.sqrt(out.accepted_L + mu_psi)
        d_next = (s - (0.0 if overshoot else sqrt_mu)) * (out.z - st.x)
        A_next = s / (s - sqrt_mu) * st.A
        new = ExState(x_next, d_next, out.accepted_L, s / sqrt_mu, mu / (s * s), A_next, F_next)
        _record(trace, k + 1, out, x_next, F_next, A_next)
        return new

    state = _run(step, state, trace, config.K)
    return state.x, trace


def solve(problem, config, **kwargs):
    """Dispatch on ``config.form``."""
    fn = {Form.ESTIMATE_SEQUENCE: solve_es, Form.EXTRAPOLATED: solve_ex,
          Form.BORDER_CASE: solve_border}[config.form]
    return fn(problem, config, **kwargs)
