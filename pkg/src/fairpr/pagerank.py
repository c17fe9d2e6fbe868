r"""PageRank fixed points on structured transition models.

A transition model is a row-stochastic matrix stored as a sparse base plus a
sum of rank-one terms ``outer(delta, target)``.  Sink rows, fair-jump
redistribution, and residual policies are all rank-one corrections, so the
full matrix is never materialized: left and right products cost one sparse
matvec plus a dot product per term.

The central fixed point is

    p' = (1 - gamma) p' M + gamma v'

with jump probability ``gamma`` and jump vector ``v``.  Writing
``Q = gamma [I - (1 - gamma) M]^{-1}``, the solution is ``p' = v' Q``; row
``i`` of ``Q`` is the personalized PageRank of node ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import ConvergenceError
from .graph import ColoredGraph

DEFAULT_GAMMA = 0.15
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 10_000
DENSE_CAP = 2000


@dataclass(frozen=True)
class TransitionModel:
    """Row-stochastic matrix: sparse base plus rank-one residual terms.

    The effective matrix is ``base + sum_k outer(delta_k, target_k)``.
    All entries are nonnegative and every row sums to one; ``validate``
    checks this within floating-point tolerance.
    """

    base: sparse.csr_matrix
    residuals: tuple[tuple[np.ndarray, np.ndarray], ...] = ()

    @property
    def n(self) -> int:
        return self.base.shape[0]

    def apply_left(self, p: np.ndarray) -> np.ndarray:
        """Row-vector product ``p' M``."""
        out = self.base.T @ p
        for delta, target in self.residuals:
            out = out + (p @ delta) * target
        return out

    def apply_right(self, q: np.ndarray) -> np.ndarray:
        """Column-vector product ``M q``."""
        out = self.base @ q
        for delta, target in self.residuals:
            out = out + (target @ q) * delta
        return out

    def row_sums(self) -> np.ndarray:
        sums = np.asarray(self.base.sum(axis=1)).ravel()
        for delta, target in self.residuals:
            sums = sums + delta * target.sum()
        return sums

    def row_masses(self, mask: np.ndarray) -> np.ndarray:
        """Per-row mass sent into the node set ``mask`` (boolean or weights)."""
        return self.apply_right(np.asarray(mask, dtype=float))

    def effective_row(self, i: int) -> np.ndarray:
        row = np.asarray(self.base.getrow(i).todense()).ravel()
        for delta, target in self.residuals:
            row = row + delta[i] * target
        return row

    def to_dense(self) -> np.ndarray:
        dense = self.base.toarray()
        for delta, target in self.residuals:
            dense += np.outer(delta, target)
        return dense

    def validate(self, tol: float = 1e-9) -> None:
        if self.base.nnz and self.base.data.min() < 0:
            raise ValueError("negative entry in transition base")
        for delta, target in self.residuals:
            if delta.min() < -tol or target.min() < -tol:
                raise ValueError("negative rank-one residual term")
        err = np.abs(self.row_sums() - 1.0).max()
        if err > tol:
            raise ValueError(f"row sums deviate from 1 by {err:.3e}")


def from_dense(mat: np.ndarray) -> TransitionModel:
    return TransitionModel(base=sparse.csr_matrix(np.asarray(mat, dtype=float)))


def standard_transition(g: ColoredGraph) -> TransitionModel:
    """Uniform-over-out-neighbors transitions; sink rows jump uniformly."""
    out = g.out_degree.astype(float)
    safe = np.where(out > 0, out, 1.0)
    data = np.repeat(1.0 / safe, g.out_degree)
    base = sparse.csr_matrix(
        (data, g.indices.copy(), g.indptr.copy()), shape=(g.n, g.n)
    )
    residuals = ()
    if g.sinks.any():
        uniform = np.full(g.n, 1.0 / g.n)
        residuals = ((g.sinks.astype(float), uniform),)
    return TransitionModel(base=base, residuals=residuals)


def check_distribution(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise ValueError("expected a 1-D probability vector")
    if v.min() < -tol:
        raise ValueError("probability vector has negative entries")
    if abs(v.sum() - 1.0) > tol:
        raise ValueError(f"probability vector sums to {v.sum():.12f}, not 1")
    return v


def power_iterate(
    m: TransitionModel,
    v: np.ndarray,
    gamma: float = DEFAULT_GAMMA,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> np.ndarray:
    """Solve ``p' = (1 - gamma) p' M + gamma v'`` by power iteration.

    Stops when the L1 step (equal to the fixed-point residual of the
    previous iterate) drops below ``tol``.  Deterministic for fixed inputs.
    """
    v = check_distribution(v)
    return solve_left(m, v, gamma, tol=tol, max_iters=max_iters)


def solve_left(m, v, gamma, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS, start=None):
    """Fixed point of ``p' = (1 - gamma) p' M + gamma v'`` for arbitrary v.

    The map is an L1 contraction with factor ``1 - gamma`` because M is
    row-stochastic, so this converges for any right-hand side, including
    the non-distribution vectors used inside gradient computations.
    """
    v = np.asarray(v, dtype=float)
    p = v.copy() if start is None else np.asarray(start, dtype=float).copy()
    for _ in range(max_iters):
        p_next = (1.0 - gamma) * m.apply_left(p) + gamma * v
        step = np.abs(p_next - p).sum()
        p = p_next
        if step <= tol:
            return p
    raise ConvergenceError(f"left fixed point not within {tol} after {max_iters} iterations")


def solve_right(m, r, gamma, tol=DEFAULT_TOL, max_iters=DEFAULT_MAX_ITERS, start=None):
    """Fixed point of ``q = gamma r + (1 - gamma) M q`` (max-norm contraction)."""
    r = np.asarray(r, dtype=float)
    q = r.copy() if start is None else np.asarray(start, dtype=float).copy()
    for _ in range(max_iters):
        q_next = gamma * r + (1.0 - gamma) * m.apply_right(q)
        step = np.abs(q_next - q).max()
        q = q_next
        if step <= tol:
            return q
    raise ConvergenceError(f"right fixed point not within {tol} after {max_iters} iterations")


def pagerank(m: TransitionModel, gamma: float = DEFAULT_GAMMA, tol: float = DEFAULT_TOL) -> np.ndarray:
    """PageRank with the uniform jump vector."""
    v = np.full(m.n, 1.0 / m.n)
    return power_iterate(m, v, gamma, tol=tol)


def personalized_pagerank(
    m: TransitionModel, i: int, gamma: float = DEFAULT_GAMMA, tol: float = DEFAULT_TOL
) -> np.ndarray:
    """PageRank personalized to node ``i`` (jump vector = indicator of i)."""
    v = np.zeros(m.n)
    v[i] = 1.0
    return power_iterate(m, v, gamma, tol=tol)


def absorption_vector(
    m: TransitionModel,
    mask: np.ndarray,
    gamma: float = DEFAULT_GAMMA,
    tol: float = 1e-13,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> np.ndarray:
    """Per-start-node mass absorbed by ``mask``: the vector ``Q mask``.

    Entry ``j`` equals the personalized PageRank of ``j`` summed over the
    set, computed backward in one solve instead of n forward solves.  The
    final max-norm error is at most ``tol * (1 - gamma) / gamma``.
    """
    mask = np.asarray(mask, dtype=float)
    return solve_right(m, mask, gamma, tol=tol, max_iters=max_iters)


def red_absorption_vector(
    m: TransitionModel, g: ColoredGraph, gamma: float = DEFAULT_GAMMA, tol: float = 1e-13
) -> np.ndarray:
    """Vector of personalized red masses ``Q e_R`` (one backward solve)."""
    return absorption_vector(m, g.red.astype(float), gamma, tol=tol)


def dense_q(m: TransitionModel, gamma: float = DEFAULT_GAMMA, cap: int = DENSE_CAP) -> np.ndarray:
    """Dense resolvent ``Q = gamma [I - (1 - gamma) M]^{-1}``.

    Row i is the personalized PageRank of node i; Q is row-stochastic.
    Quadratic memory, so refuse beyond ``cap`` nodes.
    """
    if m.n > cap:
        raise ValueError(f"dense resolvent limited to {cap} nodes, got {m.n}")
    a = np.eye(m.n) - (1.0 - gamma) * m.to_dense()
    return gamma * np.linalg.inv(a)


def write_scores_csv(path, scores: np.ndarray) -> None:
    """Write ``node,score`` rows at full float precision."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("node,score\n")
        for i, s in enumerate(scores):
            fh.write(f"{i},{s:.17g}\n")
