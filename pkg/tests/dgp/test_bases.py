"""
Unit tests for the bounded basis library.
"""

import numpy as np
import pytest

from matchregula.core import ContractError
from matchregula.dgp import DgpSpec, Example4, available_bases, bounded_g_library, sample


class TestBoundedLibrary:
    """Test bounded_g_library"""

    @pytest.mark.parametrize("basis_id", ["cos", "tanh", "bump"])
    def test_bounded_by_one(self, basis_id):
        """Test sup |g| <= 1 on a million random points"""
        g = bounded_g_library(basis_id, 4)
        X = np.random.default_rng(0).uniform(-5, 5, size=(250_000, 4))
        assert np.max(np.abs(g(X))) <= 1.0

    @pytest.mark.parametrize("basis_id", ["cos", "tanh", "bump"])
    def test_components_vary(self, basis_id):
        """Test every component has variance above 0.01 under Example 4"""
        X = sample(DgpSpec(Example4()), 20_000, np.random.default_rng(1)).dataset.X
        values = bounded_g_library(basis_id, 4)(X)
        assert np.all(values.var(axis=0) > 0.01)

    def test_empty_basis(self):
        """Test the none basis has k = 0"""
        g = bounded_g_library("none")
        assert g.k == 0
        assert g(np.zeros((3, 2))).shape == (3, 0)

    def test_first_coordinate_variants(self):
        """Test ids ending in 1 act on x1 only"""
        g = bounded_g_library("cos1")
        assert g.k == 1
        assert g(np.array([[1.0, 5.0]])).tolist() == [[-1.0]]

    def test_dimension_required(self):
        """Test every-coordinate ids need d"""
        with pytest.raises(ContractError, match="covariate dimension"):
            bounded_g_library("tanh")

    def test_unknown_id(self):
        """Test unknown ids list the library"""
        with pytest.raises(ContractError, match="known ids"):
            bounded_g_library("sin")
        assert "bump1" in available_bases()

    def test_too_few_covariates(self):
        """Test a basis applied to narrower data"""
        with pytest.raises(ContractError, match="needs 4 covariates"):
            bounded_g_library("bump", 4)(np.zeros((2, 2)))


if __name__ == "__main__":
    pytest.main([__file__])
