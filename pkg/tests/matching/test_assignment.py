"""
Unit tests for the rectangular assignment solver.
"""

import itertools

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from matchregula.core import ContractError
from matchregula.matching import solve_assignment


def _lexicographic_optimum(cost):
    """First optimal column tuple in lexicographic order, by enumeration."""
    n_rows, n_cols = cost.shape
    best, best_cols = np.inf, None
    for cols in itertools.permutations(range(n_cols), n_rows):
        total = cost[np.arange(n_rows), cols].sum()
        if total < best - 1e-9:
            best, best_cols = total, cols
    return best, best_cols


class TestSolveAssignment:
    """Test solve_assignment"""

    def test_matches_scipy_on_random_rectangles(self, rng):
        """Test optimal cost agrees with scipy on random instances"""
        for _ in range(50):
            n_rows = int(rng.integers(1, 12))
            n_cols = int(rng.integers(n_rows, 16))
            cost = rng.random((n_rows, n_cols)) * 10
            rows, cols = linear_sum_assignment(cost)
            result = solve_assignment(cost)
            assert result.total_cost == pytest.approx(cost[rows, cols].sum(), abs=1e-9)
            assert len(set(result.col_of_row.tolist())) == n_rows

    def test_dual_certificate(self, rng):
        """Test potentials are feasible and tight on assigned edges"""
        cost = rng.random((6, 9))
        result = solve_assignment(cost, lexicographic=False)
        u, v = result.row_potentials, result.col_potentials
        slack = cost - u[:, None] - v[None, :]
        assert slack.min() >= -1e-9
        assert np.allclose(slack[np.arange(6), result.col_of_row], 0.0, atol=1e-9)
        assert v.max() <= 1e-12
        unassigned = np.setdiff1d(np.arange(9), result.col_of_row)
        assert np.allclose(v[unassigned], 0.0)

    def test_certificate_on_large_rectangle(self, rng):
        """Test a few hundred rows keep the optimal cost and a valid certificate"""
        cost = rng.random((300, 420))
        rows, cols = linear_sum_assignment(cost)
        result = solve_assignment(cost)
        assert result.total_cost == pytest.approx(cost[rows, cols].sum(), abs=1e-8)
        slack = cost - result.row_potentials[:, None] - result.col_potentials[None, :]
        assert slack.min() >= -1e-8
        assert np.abs(slack[np.arange(300), result.col_of_row]).max() <= 1e-8
        unassigned = np.setdiff1d(np.arange(420), result.col_of_row)
        assert np.abs(result.col_potentials[unassigned]).max() <= 1e-8

    def test_lexicographic_ties(self):
        """Test all-zero costs give the identity assignment"""
        result = solve_assignment(np.zeros((3, 5)))
        assert result.col_of_row.tolist() == [0, 1, 2]

    def test_lexicographic_on_integer_costs(self, rng):
        """Test the smallest optimal column sequence on heavily tied instances"""
        for _ in range(100):
            n_rows = int(rng.integers(1, 5))
            n_cols = int(rng.integers(n_rows, 7))
            cost = rng.integers(0, 3, size=(n_rows, n_cols)).astype(float)
            best, cols = _lexicographic_optimum(cost)
            result = solve_assignment(cost)
            assert result.total_cost == pytest.approx(best)
            assert tuple(result.col_of_row.tolist()) == cols

    def test_more_rows_than_columns(self):
        """Test infeasible shapes are rejected"""
        with pytest.raises(ContractError, match="more rows than columns"):
            solve_assignment(np.zeros((3, 2)))

    def test_non_finite_cost(self):
        """Test infinite entries are rejected"""
        cost = np.array([[0.0, np.inf], [1.0, 2.0]])
        with pytest.raises(ContractError, match="finite"):
            solve_assignment(cost)

    def test_empty(self):
        """Test zero rows is a trivial assignment"""
        result = solve_assignment(np.zeros((0, 4)))
        assert result.col_of_row.size == 0
        assert result.total_cost == 0.0


if __name__ == "__main__":
    pytest.main([__file__])
