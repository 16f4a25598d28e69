"""
Rectangular minimum-cost assignment.

The optimal assignment of ``n_rows <= n_cols`` comes from
:func:`scipy.optimize.linear_sum_assignment`. Dual potentials ``u`` (rows)
and ``v`` (columns) are then recovered as shortest-path distances over the
assignment's alternating edges, so that

- ``u[i] + v[j] <= cost[i, j]`` everywhere (within tolerance),
- equality on assigned edges,
- ``v[j] <= 0`` and ``v[j] == 0`` on unassigned columns,

which certifies optimality. The duals are then used to move to the
lexicographically smallest optimal assignment.
"""

import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..core.errors import ContractError

logger = logging.getLogger(__name__)

TIGHT_TOLERANCE = 1e-10

_DUMMY = -2


@dataclass(frozen=True)
class AssignmentResult:
    """Optimal assignment with its dual certificate."""

    col_of_row: np.ndarray
    row_potentials: np.ndarray
    col_potentials: np.ndarray
    total_cost: float


def _recover_duals(cost: np.ndarray, col_of_row: np.ndarray,
                   tol: float) -> tuple[np.ndarray, np.ndarray]:
    """Potentials certifying an optimal ``col_of_row``.

    ``v[j]`` is the shortest distance to column ``j`` from a source joined to
    every column at zero cost, along edges ``col_of_row[i] -> j`` of length
    ``cost[i, j] - cost[i, col_of_row[i]]`` (Bellman-Ford, one vectorised
    relaxation per round). Optimality rules out negative cycles and keeps
    unassigned columns at zero.
    """
    n_rows, n_cols = cost.shape
    assigned_cost = cost[np.arange(n_rows), col_of_row]
    v = np.zeros(n_cols)
    for rounds in range(1, n_rows + 2):
        offset = v[col_of_row] - assigned_cost
        candidate = (cost + offset[:, None]).min(axis=0)
        improved = candidate < v - tol
        if not improved.any():
            break
        v[improved] = candidate[improved]
    else:
        logger.warning(f"Dual recovery did not settle after {rounds} rounds")
    logger.debug(f"Dual recovery settled in {rounds} round(s)")
    u = assigned_cost - v[col_of_row]
    return u, v


def _alternating_cycle(i: int, j: int, j_star: int, tight: np.ndarray,
                       releasable: np.ndarray, row_of_col: np.ndarray,
                       fixed: np.ndarray) -> Optional[list[tuple[int, int]]]:
    """Moves re-seating row ``i`` on column ``j`` without changing the cost.

    Unassigned columns behave as if held by interchangeable zero-cost dummy
    rows, which are tight exactly on the columns with zero potential. A move
    sequence is a cycle ``i -> j -> ... -> j_star`` through tight edges of
    rows that are not yet fixed.
    """
    parent: dict[int, tuple[int, int]] = {j: (i, -1)}
    queue = deque([j])
    while queue:
        col = queue.popleft()
        occupant = int(row_of_col[col])
        if occupant == -1:
            occupant = _DUMMY
            reachable = releasable
        elif fixed[occupant]:
            continue
        else:
            reachable = tight[occupant]

        for nxt in np.flatnonzero(reachable):
            nxt = int(nxt)
            if nxt == col or nxt in parent:
                continue
            parent[nxt] = (occupant, col)
            if nxt == j_star:
                moves = []
                cur = nxt
                while cur != -1:
                    mover, origin = parent[cur]
                    moves.append((mover, cur))
                    cur = origin
                return moves
            queue.append(nxt)
    return None


def _lexicographic_refine(cost: np.ndarray, u: np.ndarray, v: np.ndarray,
                          col_of_row: np.ndarray, row_of_col: np.ndarray,
                          tol: float) -> None:
    tight = (cost - u[:, None] - v[None, :]) <= tol
    releasable = v >= -tol
    fixed = np.zeros(cost.shape[0], dtype=bool)

    for i in range(cost.shape[0]):
        j_star = int(col_of_row[i])
        for j in np.flatnonzero(tight[i, :j_star]):
            moves = _alternating_cycle(i, int(j), j_star, tight, releasable,
                                       row_of_col, fixed)
            if moves is None:
                continue
            for mover, col in moves:
                if mover == _DUMMY:
                    row_of_col[col] = -1
                else:
                    row_of_col[col] = mover
                    col_of_row[mover] = col
            logger.debug(f"Tie-break moved row {i} from column {j_star} to {int(j)}")
            break
        fixed[i] = True


def solve_assignment(cost: np.ndarray, lexicographic: bool = True) -> AssignmentResult:
    """Minimum-cost assignment of every row to a distinct column.

    Args:
        cost: ``(n_rows, n_cols)`` finite cost matrix with ``n_rows <= n_cols``
        lexicographic: among optimal assignments return the one whose
            column sequence (row 0 first) is lexicographically smallest

    Returns:
        AssignmentResult with ``col_of_row`` and the dual potentials
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ContractError(f"cost matrix must be 2-D, got ndim={cost.ndim}")
    n_rows, n_cols = cost.shape
    if n_rows > n_cols:
        raise ContractError(f"more rows than columns ({n_rows} > {n_cols})")
    if not np.all(np.isfinite(cost)):
        raise ContractError("cost matrix must be finite")

    if n_rows == 0:
        return AssignmentResult(np.full(0, -1, dtype=np.intp), np.zeros(0), np.zeros(n_cols), 0.0)

    rows, cols = linear_sum_assignment(cost)
    col_of_row = np.empty(n_rows, dtype=np.intp)
    col_of_row[rows] = cols
    row_of_col = np.full(n_cols, -1, dtype=np.intp)
    row_of_col[col_of_row] = np.arange(n_rows)

    tol = TIGHT_TOLERANCE * max(1.0, float(np.max(np.abs(cost))))
    u, v = _recover_duals(cost, col_of_row, tol)
    logger.debug(f"Assignment {n_rows}x{n_cols} solved")

    if lexicographic:
        _lexicographic_refine(cost, u, v, col_of_row, row_of_col, tol)

    total = float(np.sum(cost[np.arange(n_rows), col_of_row]))
    return AssignmentResult(col_of_row, u, v, total)
