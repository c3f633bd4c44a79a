"""Dense two-phase simplex for the support-function subproblems.

Problems here are tiny (a handful of rows, up to about a thousand columns),
so a plain dense tableau with Dantzig pricing and a largest-pivot ratio
tie-break is plenty; Bland's rule kicks in if the iteration count suggests
cycling.  Minimizes c.x subject to A_eq x = b_eq, A_ub x <= b_ub, x >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NumericError

EPS = 1e-9

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LPResult:
    status: str
    x: Optional[np.ndarray]
    value: float


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    piv = T[row]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * piv
    basis[row] = col


def _run_simplex(T: np.ndarray, basis: np.ndarray, ncols: int,
                 max_iter: int) -> str:
    """Iterate on a tableau whose last row is the (negated-cost) objective."""
    m = T.shape[0] - 1
    bland_after = max_iter // 2
    for it in range(max_iter):
        obj = T[-1, :ncols]
        bland = it >= bland_after
        if bland:
            negs = np.nonzero(obj < -EPS)[0]
            if negs.size == 0:
                return OPTIMAL
            col = int(negs[0])
        else:
            col = int(np.argmin(obj))
            if obj[col] >= -EPS:
                return OPTIMAL
        ratios = np.full(m, np.inf)
        pos = T[:m, col] > EPS
        ratios[pos] = T[:m, -1][pos] / T[:m, col][pos]
        best = np.min(ratios)
        if not np.isfinite(best):
            return UNBOUNDED
        candidates = np.nonzero(ratios <= best + EPS)[0]
        if bland:
            row = int(candidates[np.argmin(basis[candidates])])
        else:
            row = int(candidates[np.argmax(T[candidates, col])])
        _pivot(T, basis, row, col)
    raise NumericError("simplex iteration limit reached")


def solve_lp(c: Sequence[float],
             A_eq: Optional[np.ndarray] = None, b_eq: Optional[Sequence[float]] = None,
             A_ub: Optional[np.ndarray] = None, b_ub: Optional[Sequence[float]] = None,
             ) -> LPResult:
    c = np.asarray(c, dtype=float)
    n = c.size
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    n_slack = 0 if A_ub is None else len(b_ub)

    if A_ub is not None:
        A_ub = np.asarray(A_ub, dtype=float)
        for i in range(A_ub.shape[0]):
            row = np.zeros(n + n_slack)
            row[:n] = A_ub[i]
            row[n + i] = 1.0
            rows.append(row)
            rhs.append(float(b_ub[i]))
    if A_eq is not None:
        A_eq = np.asarray(A_eq, dtype=float)
        for i in range(A_eq.shape[0]):
            row = np.zeros(n + n_slack)
            row[:n] = A_eq[i]
            rows.append(row)
            rhs.append(float(b_eq[i]))

    if not rows:
        if np.all(c >= -EPS):
            return LPResult(OPTIMAL, np.zeros(n), 0.0)
        return LPResult(UNBOUNDED, None, -np.inf)

    A = np.vstack(rows)
    b = np.asarray(rhs, dtype=float)
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    m, total = A.shape

    # phase 1: one artificial per row, drive their sum to zero
    art = total + np.arange(m)
    T = np.zeros((m + 1, total + m + 1))
    T[:m, :total] = A
    T[:m, total:total + m] = np.eye(m)
    T[:m, -1] = b
    basis = art.copy()
    T[-1, :] = -T[:m, :].sum(axis=0)
    T[-1, total:total + m] = 0.0
    max_iter = 200 * (m + total)
    status = _run_simplex(T, basis, total + m, max_iter)
    if status != OPTIMAL or T[-1, -1] < -1e-7:
        return LPResult(INFEASIBLE, None, np.inf)

    # pivot remaining artificials out of the basis (or drop redundant rows)
    keep_rows = list(range(m))
    for r in range(m):
        if basis[r] >= total:
            piv_cols = np.nonzero(np.abs(T[r, :total]) > EPS)[0]
            if piv_cols.size:
                _pivot(T, basis, r, int(piv_cols[0]))
            else:
                keep_rows.remove(r)
    if len(keep_rows) < m:
        T = np.vstack([T[keep_rows], T[-1:]])
        basis = basis[keep_rows]
        m = len(keep_rows)

    # phase 2 objective
    T2 = np.zeros((m + 1, total + 1))
    T2[:m, :total] = T[:m, :total]
    T2[:m, -1] = T[:m, -1]
    T2[-1, :n] = c
    for r in range(m):
        col = basis[r]
        if T2[-1, col] != 0.0:
            T2[-1] -= T2[-1, col] * T2[r]
    status = _run_simplex(T2, basis, total, max_iter)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, -np.inf)
    x = np.zeros(total)
    for r in range(m):
        x[basis[r]] = T2[r, -1]
    return LPResult(OPTIMAL, x[:n], float(c @ x[:n]))
