import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from ambigame.lp import solve_matrix_game


def scipy_value(G):
    """Maxmin value of the row player by HiGHS, used only as an oracle."""
    m, k = G.shape
    c = np.zeros(m + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-G.T, np.ones((k, 1))])
    A_eq = np.hstack([np.ones((1, m)), np.zeros((1, 1))])
    res = linprog(c, A_ub=A_ub, b_ub=np.zeros(k), A_eq=A_eq, b_eq=[1.0],
                  bounds=[(0, None)] * m + [(None, None)], method="highs")
    return -res.fun


def test_coin_matrix():
    sol = solve_matrix_game(np.array([[0.4, 0.6], [0.6, 0.4]]))
    assert sol.value == pytest.approx(0.5, abs=1e-12)
    assert np.allclose(sol.row_strategy, [0.5, 0.5], atol=1e-12)


def test_single_column_is_pure_argmax():
    sol = solve_matrix_game(np.array([[0.1], [0.9], [0.5]]))
    assert sol.value == 0.9 and sol.row_strategy.tolist() == [0.0, 1.0, 0.0]


def test_dominated_row_gets_no_weight():
    sol = solve_matrix_game(np.array([[1.0, 0.0], [0.0, 1.0], [0.2, 0.2]]))
    assert sol.value == pytest.approx(0.5)
    assert sol.row_strategy[2] == pytest.approx(0.0, abs=1e-12)


@given(st.integers(0, 10**6))
def test_value_matches_highs(seed):
    rng = np.random.default_rng(seed)
    G = rng.uniform(-1, 1, size=(int(rng.integers(1, 6)), int(rng.integers(1, 6))))
    sol = solve_matrix_game(G)
    assert sol.value == pytest.approx(scipy_value(G), abs=1e-9)
    assert sol.row_strategy.min() >= 0 and sol.row_strategy.sum() == pytest.approx(1.0, abs=1e-12)
    assert (sol.row_strategy @ G).min() == pytest.approx(sol.value, abs=1e-12)
    # the column strategy certifies optimality from above
    assert (G @ sol.col_strategy).max() == pytest.approx(sol.value, abs=1e-9)
