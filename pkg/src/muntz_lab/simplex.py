"""Dense two-phase tableau simplex for small standard-form LPs.

    minimize  cost @ y   subject to  A @ y = b,  y >= 0

Pricing is Dantzig's most-negative reduced cost; after a run of degenerate
pivots the entering and leaving choices switch to Bland's smallest-index
rule, which cannot cycle.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"

_DEGENERATE_STREAK = 25


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray | None
    value: float | None
    basis: list[int]
    rows: np.ndarray  # indices of constraint rows kept after phase 1
    iterations: int


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int], tol: float):
        self.T = T
        self.basis = basis
        self.tol = tol
        self.iterations = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        T -= np.outer(col, T[r])
        self.basis[r] = j

    def run(self, ncols: int, max_iter: int) -> str:
        """Iterate on columns ``[0, ncols)`` until optimal or unbounded."""
        T, tol = self.T, self.tol
        m = T.shape[0] - 1
        streak = 0
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            d = T[m, :ncols]
            if streak < _DEGENERATE_STREAK:
                j = int(np.argmin(d))
                if d[j] >= -tol:
                    return OPTIMAL
            else:
                neg = np.flatnonzero(d < -tol)
                if not len(neg):
                    return OPTIMAL
                j = int(neg[0])
            col = T[:m, j]
            ok = col > tol
            if not np.any(ok):
                return UNBOUNDED
            rhs = T[:m, -1]
            ratios = np.full(m, np.inf)
            ratios[ok] = rhs[ok] / col[ok]
            best = ratios.min()
            ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
            # Bland tie-break: leave with the smallest basic variable index
            r = int(min(ties, key=lambda i: self.basis[i]))
            streak = streak + 1 if best <= tol else 0
            self.pivot(r, j)
            self.iterations += 1


def simplex(
    A: np.ndarray,
    b: np.ndarray,
    cost: np.ndarray,
    tol: float = 1e-9,
    max_iter: int = 50_000,
) -> SimplexResult:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    cost = np.asarray(cost, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    # phase 1: minimize the sum of artificials
    T[m, :n] = -A.sum(axis=0)
    T[m, -1] = -b.sum()
    tab = _Tableau(T, list(range(n, n + m)), tol)
    status = tab.run(n + m, max_iter)
    if status == ITERATION_LIMIT:
        return SimplexResult(status, None, None, tab.basis, np.arange(m), tab.iterations)
    scale = max(1.0, float(np.abs(b).max(initial=0.0)))
    if -T[m, -1] > 1e3 * tol * scale:
        return SimplexResult(INFEASIBLE, None, None, tab.basis, np.arange(m), tab.iterations)

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for r in range(m):
        if tab.basis[r] >= n:
            row = np.abs(T[r, :n])
            j = int(np.argmax(row))
            if row[j] > tol:
                tab.pivot(r, j)
                keep.append(r)
        else:
            keep.append(r)
    rows = np.array(keep, dtype=int)
    T = np.vstack([T[rows], T[m : m + 1]])
    T = np.delete(T, np.s_[n : n + m], axis=1)
    basis = [tab.basis[r] for r in rows]
    k = len(rows)

    # phase 2 reduced costs
    cb = cost[basis]
    T[k, :n] = cost - cb @ T[:k, :n]
    T[k, -1] = -cb @ T[:k, -1]
    tab2 = _Tableau(T, basis, tol)
    tab2.iterations = tab.iterations
    status = tab2.run(n, max_iter)
    if status != OPTIMAL:
        return SimplexResult(status, None, None, tab2.basis, rows, tab2.iterations)
    y = np.zeros(n)
    y[tab2.basis] = T[:k, -1]
    return SimplexResult(OPTIMAL, y, float(cost @ y), tab2.basis, rows, tab2.iterations)
