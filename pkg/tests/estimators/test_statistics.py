"""
Unit tests for randomization statistics and the balance diagnostic.
"""

import numpy as np
import pytest
from scipy import stats

from matchregula.core import ContractError, Dataset, SingularDesign
from matchregula.estimators import (
    DifferenceOfMeans,
    FeatureSpec,
    RandomizationStatistic,
    RegressionAdjusted,
    available_statistics,
    dm_statistic,
    fit_linear,
    get_statistic,
    hotelling_t2,
    register_statistic,
)
from matchregula.linalg import build_metric, sample_covariance
from matchregula.matching import MatchedSample, PairMatching, optimal_pair_match


class TestDifferenceOfMeans:
    """Test the difference-of-means statistic"""

    def setup_method(self):
        """Set up two pairs with differences 1 and 3"""
        self.dataset = Dataset(X=[0.0, 2.0, 0.1, 2.1], y=[2.0, 5.0, 1.0, 2.0], z=[1, 1, 0, 0])
        self.pairs = PairMatching(pairs=((0, 2), (1, 3)))

    def test_mean_of_pair_differences(self):
        """Test pair differences {1, 3} average to 2"""
        assert dm_statistic(self.dataset, self.pairs) == pytest.approx(2.0)

    def test_constant_outcome(self):
        """Test a constant outcome gives 0"""
        ds = Dataset(X=self.dataset.X, y=[4.0] * 4, z=self.dataset.z)
        assert dm_statistic(ds, self.pairs) == 0.0

    def test_sample_statistic_agrees(self):
        """Test the matched-sample form equals dm_statistic"""
        sample = MatchedSample.from_matching(self.dataset, self.pairs)
        stat = DifferenceOfMeans()
        assert stat.evaluate(sample, sample.z) == pytest.approx(2.0)
        flipped = np.array([0.0, 1.0, 1.0, 0.0])
        assert stat.evaluate(sample, flipped) == pytest.approx((-1.0 + 3.0) / 2)

    def test_protocol(self):
        """Test built-in statistics satisfy the plug-in protocol"""
        assert isinstance(DifferenceOfMeans(), RandomizationStatistic)
        assert isinstance(RegressionAdjusted(), RandomizationStatistic)


class TestRegressionAdjusted:
    """Test the regression-adjusted statistic"""

    def test_matches_full_fit(self, random_dataset):
        """Test the partialled-out coefficient equals the fitted tau"""
        ds = random_dataset
        matching = optimal_pair_match(ds, build_metric(sample_covariance(ds)))
        sample = MatchedSample.from_matching(ds, matching)
        stat = RegressionAdjusted()
        fit = fit_linear(ds, matching.matched_set, None, FeatureSpec.baseline())
        assert stat.evaluate(sample, sample.z) == pytest.approx(fit.tau_hat, rel=1e-9)

    def test_block_evaluation(self, random_dataset, rng):
        """Test evaluate_many agrees with row-by-row evaluation"""
        ds = random_dataset
        matching = optimal_pair_match(ds, build_metric(sample_covariance(ds)))
        sample = MatchedSample.from_matching(ds, matching)
        flips = rng.integers(0, 2, size=(5, sample.n_pairs))
        Z = np.empty((5, sample.size))
        Z[:, 0::2] = 1 - flips
        Z[:, 1::2] = flips
        stat = RegressionAdjusted()
        block = stat.evaluate_many(sample, Z)
        assert block == pytest.approx([stat.evaluate(sample, row) for row in Z])

    def test_too_small_sample(self):
        """Test a single pair cannot be adjusted"""
        ds = Dataset(X=[0.0, 0.1], y=[1.0, 0.0], z=[1, 0])
        sample = MatchedSample.from_matching(ds, PairMatching(pairs=((0, 1),)))
        with pytest.raises(SingularDesign):
            RegressionAdjusted().evaluate(sample, sample.z)


class TestStatisticRegistry:
    """Test the statistic registry"""

    def test_builtins_registered(self):
        """Test dm and reg are available"""
        assert {"dm", "reg"} <= set(available_statistics())
        assert isinstance(get_statistic("dm"), DifferenceOfMeans)

    def test_unknown_statistic(self):
        """Test an unknown name lists the available ones"""
        with pytest.raises(ContractError, match="available"):
            get_statistic("median")

    def test_register_custom(self):
        """Test a custom statistic can be registered"""

        class TreatedSum(DifferenceOfMeans):
            name = "treated-sum"

            def evaluate_many(self, sample, Z):
                return np.asarray(Z) @ sample.y

        register_statistic(TreatedSum.name, TreatedSum)
        assert "treated-sum" in available_statistics()
        assert isinstance(get_statistic("treated-sum"), TreatedSum)


class TestHotelling:
    """Test the Hotelling T² balance test"""

    def test_equal_means(self):
        """Test identical group means give T² = 0 and p = 1"""
        ds = Dataset(X=[0.0, 2.0, 0.5, 1.5], y=[0.0] * 4, z=[1, 1, 0, 0])
        t2, p = hotelling_t2(ds, np.arange(4))
        assert t2 == 0.0
        assert p == 1.0

    def test_one_dimension_is_squared_t(self, rng):
        """Test d = 1 reduces to the squared pooled two-sample t"""
        a = rng.normal(size=12)
        b = rng.normal(loc=0.4, size=15)
        ds = Dataset(X=np.concatenate([a, b]), y=np.zeros(27), z=[1] * 12 + [0] * 15)
        result = hotelling_t2(ds, np.arange(27))
        reference = stats.ttest_ind(a, b, equal_var=True)
        assert result.statistic == pytest.approx(reference.statistic**2, rel=1e-10)
        assert result.p_value == pytest.approx(reference.pvalue, rel=1e-8)
        assert result.df == (1, 25)

    def test_missing_group(self):
        """Test one group alone is a contract violation"""
        ds = Dataset(X=[0.0, 1.0, 2.0], y=[0.0] * 3, z=[1, 1, 1])
        with pytest.raises(ContractError, match="both treated and control"):
            hotelling_t2(ds, np.arange(3))

    def test_singular_pooled_covariance(self, rng):
        """Test duplicated covariate columns"""
        x = rng.normal(size=10)
        ds = Dataset(X=np.column_stack([x, x]), y=np.zeros(10), z=[1] * 5 + [0] * 5)
        with pytest.raises(SingularDesign):
            hotelling_t2(ds, np.arange(10))

    def test_null_rejection_rate(self, rng):
        """Test the rejection rate at level 0.10 under equal covariate laws"""
        reps = 2000
        rejections = 0
        for _ in range(reps):
            ds = Dataset(X=rng.normal(size=(120, 3)), y=np.zeros(120), z=[1] * 40 + [0] * 80)
            rejections += hotelling_t2(ds, np.arange(120)).rejects(0.10)
        assert rejections / reps == pytest.approx(0.10, abs=0.02)

    def test_rejects(self):
        """Test rejects compares the p-value with the level"""
        ds = Dataset(X=[0.0, 0.1, 5.0, 5.1, 0.05, 5.05], y=[0.0] * 6, z=[1, 1, 1, 0, 0, 0])
        result = hotelling_t2(ds, np.arange(6))
        assert result.rejects(1.0)
        assert result.rejects(0.0) is False


if __name__ == "__main__":
    pytest.main([__file__])
