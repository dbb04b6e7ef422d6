"""Synthetic benchmark instances: LASSO, NNLS, L1LR, RR and EN.

Every instance is generated from a seed. Random tensors come from separate
``numpy.random.Generator`` streams, spawned in a fixed order from
``SeedSequence([seed, kind_code])``:

=====  ===================  ==================  =====================
kind   stream 0             stream 1            stream 2
=====  ===================  ==================  =====================
LASSO  A                    b                   x0
NNLS   A (pattern, values)  noise               x0 support
L1LR   A                    x0 (support, vals)  labels
RR     A                    b                   x0
EN     A                    b                   x0 (support, vals)
=====  ===================  ==================  =====================

Reduced instances (the default) divide both matrix dimensions by 10; the
numbers of nonzeros in sparse starting points are kept.
"""

import math
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from .oracle import CompositeProblem, spectral_norm

__all__ = [
    "Kind",
    "ProblemInstance",
    "FULL_SHAPES",
    "shrink",
    "softplus_sum",
    "en_lambda1",
    "gen",
    "oracle_bundle",
    "reference_optimum",
    "with_reference",
    "save_instance",
    "load_instance",
]


class Kind(str, Enum):
    LASSO = "LASSO"
    NNLS = "NNLS"
    L1LR = "L1LR"
    RR = "RR"
    EN = "EN"


_KIND_CODE = {Kind.LASSO: 0, Kind.NNLS: 1, Kind.L1LR: 2, Kind.RR: 3, Kind.EN: 4}

FULL_SHAPES = {
    Kind.LASSO: (500, 500),
    Kind.NNLS: (1000, 10000),
    Kind.L1LR: (200, 1000),
    Kind.RR: (500, 500),
    Kind.EN: (1000, 500),
}


@dataclass
class ProblemInstance:
    """Data of one benchmark problem.

    ``b`` holds the observation vector, or the 0/1 labels for L1LR.
    ``x_hat`` and ``F_hat`` are the reference optimum, once computed.
    """

    kind: Kind
    A: object
    b: np.ndarray
    lambda1: float
    lambda2: float
    x0: np.ndarray
    L_f: float
    sigma_max: float
    mu_f: float
    mu_psi: float
    seed: int
    full: bool = False
    x_hat: np.ndarray | None = None
    F_hat: float | None = None

    @property
    def shape(self):
        return self.A.shape

    @property
    def mu(self):
        return self.mu_f + self.mu_psi

    @property
    def q(self):
        """Inverse condition number ``mu / (L_f + mu_psi)``."""
        return self.mu / (self.L_f + self.mu_psi)


def shrink(x, tau):
    """Soft thresholding ``(|x| - tau)_+ sgn(x)``."""
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def softplus_sum(u):
    """``sum_i log(1 + exp(u_i))``, stable for large ``|u_i|``."""
    return float(np.sum(np.logaddexp(0.0, u)))


def en_lambda1(n):
    return 1.5 * math.sqrt(2.0 * math.log(n))


def _streams(kind, seed, count=3):
    ss = np.random.SeedSequence([int(seed), _KIND_CODE[kind]])
    return [np.random.default_rng(s) for s in ss.spawn(count)]


def _sparse_vector(rng, n, nnz, values):
    x = np.zeros(n)
    idx = rng.choice(n, size=min(nnz, n), replace=False)
    x[idx] = values(idx.size)
    return x


def _nnls_matrix(rng, m, n, density=0.10):
    cols_rows, cols_vals, indptr = [], [], [0]
    for _ in range(n):
        cnt = rng.binomial(m, density)
        if cnt == 0:
            # an empty column cannot be normalized
            cnt = 1
        rows = np.sort(rng.choice(m, size=cnt, replace=False))
        vals = rng.standard_normal(cnt)
        vals /= np.linalg.norm(vals)
        cols_rows.append(rows)
        cols_vals.append(vals)
        indptr.append(indptr[-1] + cnt)
    return sp.csc_matrix((np.concatenate(cols_vals), np.concatenate(cols_rows),
                          np.array(indptr)), shape=(m, n))


def gen(kind, seed, full=False):
    """Generate a benchmark instance deterministically from `seed`."""
    kind = Kind(kind)
    m, n = FULL_SHAPES[kind]
    if not full:
        m, n = m // 10, n // 10
    r0, r1, r2 = _streams(kind, seed)
    lambda1 = lambda2 = 0.0

    if kind is Kind.LASSO:
        A = r0.standard_normal((m, n))
        b = 3.0 * r1.standard_normal(m)
        x0 = r2.standard_normal(n)
        lambda1 = 4.0
    elif kind is Kind.NNLS:
        A = _nnls_matrix(r0, m, n)
        x0 = _sparse_vector(r2, n, 10, lambda k: np.full(k, 4.0))
        b = A @ x0 + r1.standard_normal(m)
    elif kind is Kind.L1LR:
        A = r0.standard_normal((m, n))
        x0 = _sparse_vector(r1, n, 10, lambda k: 15.0 * r1.standard_normal(k))
        b = (r2.random(m) < expit(A @ x0)).astype(float)
        lambda1 = 5.0
    elif kind is Kind.RR:
        A = r0.standard_normal((m, n))
        b = 5.0 * r1.standard_normal(m)
        x0 = r2.standard_normal(n)
    else:
        A = r0.standard_normal((m, n))
        b = 5.0 * r1.standard_normal(m)
        x0 = _sparse_vector(r2, n, 20, lambda k: r2.standard_normal(k))
        lambda1 = en_lambda1(n)

    sigma = spectral_norm(A)
    L_f = 0.25 * sigma ** 2 if kind is Kind.L1LR else sigma ** 2
    if kind in (Kind.RR, Kind.EN):
        lambda2 = 1e-3 * sigma ** 2
    return ProblemInstance(kind=kind, A=A, b=b, lambda1=lambda1, lambda2=lambda2, x0=x0,
                           L_f=L_f, sigma_max=sigma, mu_f=0.0, mu_psi=lambda2, seed=int(seed),
                           full=bool(full))


def oracle_bundle(inst: ProblemInstance) -> CompositeProblem:
    """Wire the oracle functions of `inst` into a :class:`CompositeProblem`."""
    A, b = inst.A, inst.b
    l1, l2 = inst.lambda1, inst.lambda2
    kind = Kind(inst.kind)

    def f_ls(x):
        r = A @ x - b
        return 0.5 * float(np.dot(r, r))

    def g_ls(x):
        return A.T @ (A @ x - b)

    if kind is Kind.L1LR:
        def f_eval(x):
            u = A @ x
            return softplus_sum(u) - float(np.dot(b, u))

        def grad_f(x):
            return A.T @ (expit(A @ x) - b)
    else:
        f_eval, grad_f = f_ls, g_ls

    if kind in (Kind.LASSO, Kind.L1LR):
        def psi_eval(x):
            return l1 * float(np.sum(np.abs(x)))

        def prox_psi(tau, x):
            return shrink(x, tau * l1)
    elif kind is Kind.NNLS:
        def psi_eval(x):
            return 0.0 if np.all(x >= 0) else math.inf

        def prox_psi(tau, x):
            return np.maximum(x, 0.0)
    elif kind is Kind.RR:
        def psi_eval(x):
            return 0.5 * l2 * float(np.dot(x, x))

        def prox_psi(tau, x):
            return x / (1.0 + tau * l2)
    else:
        def psi_eval(x):
            return l1 * float(np.sum(np.abs(x))) + 0.5 * l2 * float(np.dot(x, x))

        def prox_psi(tau, x):
            return shrink(x, tau * l1) / (1.0 + tau * l2)

    return CompositeProblem(f_eval=f_eval, grad_f=grad_f, psi_eval=psi_eval, prox_psi=prox_psi,
                            mu_f=inst.mu_f, mu_psi=inst.mu_psi, dim=inst.A.shape[1])


def reference_optimum(inst: ProblemInstance, iters=5000):
    """Optimum estimate: monotone ACGM with ``A0 = 0``, ``gamma0 = 1``,
    ``L0 = L_f``, ``r_d = 0.9`` and ``r_u = 2``.

    Returns ``(x_hat, F_hat)``.
    """
    from .solvers import SolverConfig, solve_ex

    problem = oracle_bundle(inst)
    cfg = SolverConfig(x0=inst.x0, L0=inst.L_f, A0=0.0, gamma0=1.0, r_u=2.0, r_d=0.9, K=iters,
                       monotone=True)
    x_hat, trace = solve_ex(problem, cfg, name="reference")
    F_hat = trace.records[-1].F if trace.records else problem.F(x_hat)
    return x_hat, F_hat


def with_reference(inst: ProblemInstance, iters=5000):
    x_hat, F_hat = reference_optimum(inst, iters)
    return replace(inst, x_hat=x_hat, F_hat=F_hat)


# -- text container ----------------------------------------------------------
#
# A header of ``key = value`` lines, then blocks introduced by ``[name ...]``
# lines with one number per line. Dense matrices are stored column-major;
# sparse ones as CSC (data, row indices, column pointers).

_MAGIC = "# acgm-instance v1"
_SCALARS = ("kind", "seed", "full", "lambda1", "lambda2", "L_f", "sigma_max", "mu_f", "mu_psi",
            "F_hat")


def _write_block(fh, header, values, fmt=repr):
    fh.write(f"[{header}]\n")
    for v in values:
        fh.write(fmt(v) + "\n")


def save_instance(inst: ProblemInstance, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(_MAGIC + "\n")
        for key in _SCALARS:
            val = getattr(inst, key)
            if val is None:
                continue
            if isinstance(val, Enum):
                val = val.value
            elif isinstance(val, float):
                val = repr(val)
            fh.write(f"{key} = {val}\n")
        m, n = inst.A.shape
        if sp.issparse(inst.A):
            A = sp.csc_matrix(inst.A)
            _write_block(fh, f"A csc {m} {n} {A.nnz}", A.data.tolist())
            _write_block(fh, "A.indices", A.indices.tolist(), str)
            _write_block(fh, "A.indptr", A.indptr.tolist(), str)
        else:
            _write_block(fh, f"A dense {m} {n}", np.asarray(inst.A).ravel(order="F").tolist())
        for name in ("b", "x0", "x_hat"):
            vec = getattr(inst, name)
            if vec is not None:
                _write_block(fh, f"{name} {vec.size}", np.asarray(vec, dtype=float).tolist())
    return path


def load_instance(path) -> ProblemInstance:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != _MAGIC:
        raise ValueError(f"{path} is not an instance file")
    header, blocks, current = {}, {}, None
    for line in lines[1:]:
        if line.startswith("["):
            parts = line.strip("[]").split()
            current = parts[0]
            blocks[current] = (parts[1:], [])
        elif current is None:
            key, _, val = line.partition("=")
            header[key.strip()] = val.strip()
        elif line:
            blocks[current][1].append(line)

    meta, raw = blocks["A"]
    if meta[0] == "csc":
        m, n = int(meta[1]), int(meta[2])
        A = sp.csc_matrix((np.array(raw, dtype=float),
                           np.array(blocks["A.indices"][1], dtype=np.int64),
                           np.array(blocks["A.indptr"][1], dtype=np.int64)), shape=(m, n))
    else:
        m, n = int(meta[1]), int(meta[2])
        A = np.ascontiguousarray(np.array(raw, dtype=float).reshape((m, n), order="F"))

    def vec(name):
        if name not in blocks:
            return None
        return np.array(blocks[name][1], dtype=float)

    return ProblemInstance(
        kind=Kind(header["kind"]), A=A, b=vec("b"),
        lambda1=float(header["lambda1"]), lambda2=float(header["lambda2"]), x0=vec("x0"),
        L_f=float(header["L_f"]), sigma_max=float(header["sigma_max"]),
        mu_f=float(header["mu_f"]), mu_psi=float(header["mu_psi"]), seed=int(header["seed"]),
        full=header["full"] == "True", x_hat=vec("x_hat"),
        F_hat=float(header["F_hat"]) if "F_hat" in header else None)
