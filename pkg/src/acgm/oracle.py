"""Composite problems and the proximal/parabolic primitives used by every solver.

A composite objective ``F = f + psi`` is accessed only through four oracle
callables: ``f(x)``, ``grad f(x)``, ``psi(x)`` and ``prox_{tau psi}(x)``.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "CompositeProblem",
    "GradientSample",
    "ConvergenceError",
    "sample_gradient",
    "eval_Q",
    "prox_grad_step",
    "composite_gradient",
    "descent_condition",
    "lssc_slack",
    "spectral_norm",
    "gradient_check",
    "prox_optimality_gap",
]

_EPS = np.finfo(float).eps


class ConvergenceError(RuntimeError):
    """An iterative procedure did not converge within its iteration cap."""


@dataclass(frozen=True)
class CompositeProblem:
    """Oracle bundle for ``min_x f(x) + psi(x)``.

    Parameters
    ----------
    f_eval : callable
        ``f(x)``, convex and differentiable with Lipschitz gradient.
    grad_f : callable
        ``grad f(x)``.
    psi_eval : callable
        ``psi(x)``, convex and lower semicontinuous; may return ``inf``
        outside the feasible set.
    prox_psi : callable
        ``prox_psi(tau, x)`` returning ``argmin_z psi(z) + ||z - x||^2 / (2 tau)``.
    mu_f, mu_psi : float
        Strong convexity parameters of ``f`` and ``psi``.
    dim : int
        Number of optimization variables.
    """

    f_eval: Callable[[np.ndarray], float]
    grad_f: Callable[[np.ndarray], np.ndarray]
    psi_eval: Callable[[np.ndarray], float]
    prox_psi: Callable[[float, np.ndarray], np.ndarray]
    mu_f: float = 0.0
    mu_psi: float = 0.0
    dim: int = 1

    def __post_init__(self):
        if self.mu_f < 0 or self.mu_psi < 0:
            raise ValueError("strong convexity parameters must be non-negative")
        if self.dim < 1:
            raise ValueError("dim must be a positive integer")

    @property
    def mu(self) -> float:
        return self.mu_f + self.mu_psi

    def F(self, x: np.ndarray) -> float:
        """Composite objective value ``f(x) + psi(x)``."""
        psi = self.psi_eval(x)
        if not np.isfinite(psi):
            return np.inf
        return self.f_eval(x) + psi


@dataclass(frozen=True)
class GradientSample:
    """Function value and gradient of ``f`` at ``point``, computed once."""

    point: np.ndarray
    f_y: float
    grad_y: np.ndarray


def sample_gradient(problem: CompositeProblem, y: np.ndarray) -> GradientSample:
    return GradientSample(y, problem.f_eval(y), problem.grad_f(y))


def _check_dims(a, b):
    if np.shape(a) != np.shape(b):
        raise ValueError(f"dimension mismatch: {np.shape(a)} vs {np.shape(b)}")


def eval_Q(sample: GradientSample, gamma: float, x: np.ndarray) -> float:
    """Generalized parabola ``f(y) + <grad f(y), x - y> + gamma/2 ||x - y||^2``."""
    _check_dims(x, sample.point)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    dx = x - sample.point
    return sample.f_y + float(np.dot(sample.grad_y, dx)) + 0.5 * gamma * float(np.dot(dx, dx))


def _check_L(L):
    if not L > 0:
        raise ValueError(f"inverse step size must be positive, got {L}")


def prox_grad_step(problem: CompositeProblem, L: float, y: np.ndarray,
                   sample: GradientSample | None = None) -> np.ndarray:
    """Proximal gradient operator ``T_L(y) = prox_{psi/L}(y - grad f(y) / L)``.

    A precomputed `sample` at `y` avoids a second gradient evaluation.
    """
    _check_L(L)
    grad = problem.grad_f(y) if sample is None else sample.grad_y
    return problem.prox_psi(1.0 / L, y - grad / L)


def composite_gradient(problem: CompositeProblem, L: float, y: np.ndarray,
                       sample: GradientSample | None = None) -> np.ndarray:
    """Composite gradient ``L (y - T_L(y))``."""
    return L * (y - prox_grad_step(problem, L, y, sample))


def lssc_slack(f_z: float) -> float:
    """Rounding allowance added to the right-hand side of the descent test."""
    return 10.0 * _EPS * max(1.0, abs(f_z))


def descent_condition(sample: GradientSample, L: float, z: np.ndarray, f_z: float) -> bool:
    """Line-search stopping criterion ``f(z) <= Q_{f,L,y}(z)`` (with rounding slack)."""
    return bool(f_z <= eval_Q(sample, L, z) + lssc_slack(f_z))


def spectral_norm(A, rtol: float = 1e-13, maxiter: int = 100000) -> float:
    """Largest singular value of `A` by power iteration on ``A^T A``.

    Works with dense arrays and scipy sparse matrices. Iteration starts
    from the normalized all-ones vector, so the result is deterministic.

    Raises
    ------
    ConvergenceError
        If the relative change of the estimate does not drop below `rtol`
        within `maxiter` iterations.
    """
    n = A.shape[1]
    v = np.full(n, 1.0 / np.sqrt(n))
    w = A.T @ (A @ v)
    if not np.any(w):
        # all-ones can be in the null space; fall back to a fixed pseudo-random start
        v = np.random.default_rng(0).standard_normal(n)
        v /= np.linalg.norm(v)
        w = A.T @ (A @ v)
    lam = float(np.dot(v, w))
    if lam <= 0:
        raise ValueError("matrix must be nonzero")
    for _ in range(maxiter):
        v = w / np.linalg.norm(w)
        w = A.T @ (A @ v)
        lam_new = float(np.dot(v, w))
        if abs(lam_new - lam) <= rtol * lam_new:
            return float(np.sqrt(lam_new))
        lam = lam_new
    raise ConvergenceError(f"power iteration did not converge in {maxiter} iterations")


def gradient_check(problem: CompositeProblem, x: np.ndarray, h: float = 1e-5) -> float:
    """Relative error ``||g_fd - grad f(x)|| / ||grad f(x)||`` of a coordinatewise
    central difference with step ``h (1 + |x_i|)``."""
    x = np.asarray(x, dtype=float)
    g = problem.grad_f(x)
    fd = np.empty_like(g)
    e = x.copy()
    for i in range(x.size):
        step = h * (1.0 + abs(x[i]))
        e[i] = x[i] + step
        f_plus = problem.f_eval(e)
        e[i] = x[i] - step
        f_minus = problem.f_eval(e)
        e[i] = x[i]
        fd[i] = (f_plus - f_minus) / (2.0 * step)
    return float(np.linalg.norm(fd - g) / max(np.linalg.norm(g), np.finfo(float).tiny))


def prox_optimality_gap(problem: CompositeProblem, tau: float, x: np.ndarray, zs) -> float:
    """Smallest ``phi(z) - phi(p)`` over trial points `zs`, where
    ``phi(z) = psi(z) + ||z - x||^2 / (2 tau)`` and ``p = prox_{tau psi}(x)``.

    Negative values mean some trial point beats the prox output.
    """
    def phi(z):
        d = z - x
        return problem.psi_eval(z) + float(np.dot(d, d)) / (2.0 * tau)

    p = problem.prox_psi(tau, x)
    phi_p = phi(p)
    return min(phi(z) - phi_p for z in zs)
