"""Small dense simplex solver for zero-sum matrix games.

The row player picks a mixture over rows to maximize the worst column payoff.
After shifting the matrix to be strictly positive the column player's problem
``max 1'y  s.t.  G y <= 1, y >= 0`` has the origin as a feasible basis, so a
plain tableau simplex with Bland's rule solves it without a phase one. The
row strategy is read off the slack columns of the optimal objective row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LPError(RuntimeError):
    """The simplex solver failed; never expected on valid input."""


@dataclass(frozen=True)
class MatrixGameSolution:
    value: float
    row_strategy: np.ndarray
    col_strategy: np.ndarray
    pivots: int


def _simplex(tableau: np.ndarray, basis: list[int], tol: float, max_pivots: int) -> int:
    m = tableau.shape[0] - 1
    pivots = 0
    while True:
        obj = tableau[-1, :-1]
        entering = np.flatnonzero(obj < -tol)
        if entering.size == 0:
            return pivots
        j = int(entering[0])
        col = tableau[:m, j]
        pos = col > tol
        if not pos.any():
            raise LPError("unbounded program")
        ratios = np.full(m, np.inf)
        ratios[pos] = tableau[:m, -1][pos] / col[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + tol * max(1.0, abs(best)))
        i = int(min(ties, key=lambda r: basis[r]))
        tableau[i] /= tableau[i, j]
        others = np.arange(m + 1) != i
        tableau[others] -= np.outer(tableau[others, j], tableau[i])
        basis[i] = j
        pivots += 1
        if pivots > max_pivots:
            raise LPError("pivot limit exceeded")


def solve_matrix_game(payoff: np.ndarray, tol: float = 1e-12) -> MatrixGameSolution:
    """Solve ``max_x min_j sum_i x_i payoff[i, j]`` over the row simplex."""
    G = np.asarray(payoff, dtype=float)
    if G.ndim != 2 or G.size == 0:
        raise LPError("payoff must be a nonempty matrix")
    m, k = G.shape
    if k == 1:
        i = int(np.argmax(G[:, 0]))
        x = np.zeros(m)
        x[i] = 1.0
        return MatrixGameSolution(float(G[i, 0]), x, np.ones(1), 0)
    shift = 1.0 - G.min()
    Gp = G + shift
    tableau = np.zeros((m + 1, k + m + 1))
    tableau[:m, :k] = Gp
    tableau[:m, k:k + m] = np.eye(m)
    tableau[:m, -1] = 1.0
    tableau[-1, :k] = -1.0
    basis = list(range(k, k + m))
    pivots = _simplex(tableau, basis, tol, max_pivots=50 * (m + k) + 100)

    total = tableau[-1, -1]
    if total <= 0:
        raise LPError("degenerate optimum")
    y = np.zeros(k + m)
    for r, b in enumerate(basis):
        y[b] = tableau[r, -1]
    col = np.clip(y[:k], 0.0, None) / total
    row = np.clip(tableau[-1, k:k + m], 0.0, None)
    row = row / row.sum()
    col = col / col.sum()

    # duality certificate: guaranteed row payoff equals the column cap
    lower = float((row @ G).min())
    upper = float((G @ col).max())
    scale = max(1.0, float(np.abs(G).max()))
    if upper - lower > 1e-9 * scale:
        raise LPError(f"duality gap {upper - lower:.3g} after {pivots} pivots")
    return MatrixGameSolution(lower, row, col, pivots)
