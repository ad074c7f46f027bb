"""Dense two-phase simplex with Bland's pivoting rule.

Solves  min c.x  subject to  A x >= b,  x >= 0  with b >= 0, which covers
the set-cover relaxations this package needs.  Bland's rule (always the
lowest-index eligible column, ties in the ratio test broken by the lowest
basis index) guarantees termination without cycling; a pivot cap is kept as
a final guard.  Feasibility tolerance is 1e-9.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TOL = 1e-9


@dataclass
class SimplexResult:
    x: np.ndarray
    objective: float
    pivots: int
    status: str  # "optimal" | "infeasible" | "pivot-limit"


def _pivot(tab: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tab[row] /= tab[row, col]
    piv = tab[row]
    factors = tab[:, col].copy()
    factors[row] = 0.0
    tab -= np.outer(factors, piv)
    tab[:, col] = 0.0
    tab[row, col] = 1.0
    basis[row] = col


def _bland_entering(reduced: np.ndarray, allowed: int) -> int:
    for j in range(allowed):
        if reduced[j] < -TOL:
            return j
    return -1


def _bland_leaving(tab: np.ndarray, basis: np.ndarray, col: int) -> int:
    rows = np.flatnonzero(tab[:-1, col] > TOL)
    if len(rows) == 0:
        return -1
    ratios = tab[rows, -1] / tab[rows, col]
    best = ratios.min()
    tied = rows[ratios <= best + TOL]
    return int(tied[np.argmin(basis[tied])])


def _run_phase(
    tab: np.ndarray, basis: np.ndarray, allowed: int, pivots: int, max_pivots: int
) -> tuple[int, str]:
    while True:
        col = _bland_entering(tab[-1, :], allowed)
        if col < 0:
            return pivots, "optimal"
        if pivots >= max_pivots:
            return pivots, "pivot-limit"
        row = _bland_leaving(tab, basis, col)
        if row < 0:
            return pivots, "unbounded"
        _pivot(tab, basis, row, col)
        pivots += 1


def solve_min(c: np.ndarray, A: np.ndarray, b: np.ndarray, max_pivots: int = 50000) -> SimplexResult:
    """Two-phase simplex for min c.x s.t. A x >= b, x >= 0 (b >= 0)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    rows, m = A.shape
    if (b < 0).any():
        raise ValueError("rows must have b >= 0")
    if rows == 0:
        return SimplexResult(np.zeros(m), 0.0, 0, "optimal")

    # columns: m structural | rows surplus | rows artificial | rhs
    n_cols = m + 2 * rows + 1
    tab = np.zeros((rows + 1, n_cols))
    tab[:rows, :m] = A
    tab[:rows, m : m + rows] = -np.eye(rows)
    tab[:rows, m + rows : m + 2 * rows] = np.eye(rows)
    tab[:rows, -1] = b
    basis = np.arange(m + rows, m + 2 * rows)

    # phase 1: minimize artificial sum; reduced costs start as -sum of rows
    tab[-1, :] = -tab[:rows].sum(axis=0)
    tab[-1, m + rows : m + 2 * rows] = 0.0

    pivots, status = _run_phase(tab, basis, m + rows, 0, max_pivots)
    if status == "pivot-limit":
        return SimplexResult(np.zeros(m), float("nan"), pivots, "pivot-limit")
    if -tab[-1, -1] > 1e-7:
        return SimplexResult(np.zeros(m), float("nan"), pivots, "infeasible")

    # drive any lingering artificials out of the basis
    for r in range(rows):
        if basis[r] >= m + rows:
            cols = np.flatnonzero(np.abs(tab[r, : m + rows]) > TOL)
            if len(cols):
                _pivot(tab, basis, r, int(cols[0]))
                pivots += 1
            # else: redundant row; harmless to leave the artificial at zero

    # phase 2 objective: reduced costs of c against the current basis
    tab[-1, :] = 0.0
    tab[-1, :m] = c
    for r in range(rows):
        if basis[r] < m and c[basis[r]] != 0.0:
            tab[-1, :] -= c[basis[r]] * tab[r, :]
    tab[:, m + rows : m + 2 * rows] = 0.0  # artificials may never re-enter

    pivots, status = _run_phase(tab, basis, m + rows, pivots, max_pivots)
    x = np.zeros(m + 2 * rows)
    for r in range(rows):
        x[basis[r]] = tab[r, -1]
    x = x[:m]
    if status == "unbounded":
        return SimplexResult(x, float("nan"), pivots, "unbounded")
    return SimplexResult(x, float(c @ x), pivots, status)


def solve_covering_lp(A: np.ndarray, max_pivots: int = 50000) -> SimplexResult:
    """min sum(x) s.t. A x >= 1, x >= 0 for a 0/1 coverage matrix A.

    The box constraints x <= 1 are omitted on purpose: at any optimum every
    coordinate is at most 1, because a point with x_j > 1 has slack in every
    row through j (a tight row would need a negative coordinate), so x_j can
    be reduced, strictly improving the objective.
    """
    rows, m = A.shape
    return solve_min(np.ones(m), A, np.ones(rows), max_pivots=max_pivots)
