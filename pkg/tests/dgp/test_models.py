"""
Unit tests for the null data-generating processes.
"""

import math

import numpy as np
import pytest
from scipy import integrate, stats
from scipy.special import expit

from matchregula.core import ConfigError, ContractError
from matchregula.dgp import (
    DgpSpec,
    Example1,
    Example2,
    Example4,
    ExactMatchNull,
    LocalMisspec,
    example2_mu_cdf,
    example2_mu_density,
    propensity,
    sample,
    theoretical_delta,
)


def _rng(seed=0):
    return np.random.default_rng(seed)


class TestPropensity:
    """Test model propensities at fixed covariates"""

    def test_example1_upper_end(self):
        """Test e(1) = 0.2 + 0.5 = 0.7"""
        assert propensity(DgpSpec(Example1()), [1.0]) == pytest.approx(0.7)

    def test_example4_at_zero(self):
        """Test e(0) = 1 / (1 + e^1.1)"""
        value = propensity(DgpSpec(Example4()), [0.0, 0.3, -0.2, 0.9])
        assert value == pytest.approx(0.2497399, abs=1e-6)

    def test_example4_cap(self):
        """Test the propensity cap bounds e(x)"""
        spec = DgpSpec(Example4(intercept=-3.0, propensity_cap=0.6))
        assert propensity(spec, [1.0, 0.0, 0.0, 0.0]) == pytest.approx(0.6)

    def test_example2_flat(self):
        """Test theta = 0 gives a constant 0.35"""
        assert propensity(DgpSpec(Example2(theta=(0.0, 0.0))), [0.3, -0.4]) == pytest.approx(0.35)

    def test_outside_support(self):
        """Test covariates outside the model support"""
        with pytest.raises(ContractError, match="outside the support"):
            propensity(DgpSpec(Example1()), [1.5])

    def test_wrong_length(self):
        """Test covariate vectors of the wrong length"""
        with pytest.raises(ContractError, match="expected 4 covariates"):
            propensity(DgpSpec(Example4()), [0.0, 0.0])


class TestTheoreticalDelta:
    """Test the limiting covariate imbalance"""

    def test_value(self):
        """Test theta = (0.2, 0.5) gives 0.064 / 0.675"""
        assert theoretical_delta(0.2, 0.5) == pytest.approx(0.0948148, abs=1e-6)

    def test_zero_on_balance_line(self):
        """Test theta0 + theta1 = 0.5 gives zero"""
        assert theoretical_delta(0.1, 0.4) == pytest.approx(0.0, abs=1e-15)

    def test_sign_follows_treated_share(self):
        """Test the sign of 2(theta0 + theta1) - 1"""
        assert theoretical_delta(0.05, 0.3) < 0
        assert theoretical_delta(0.3, 0.5) > 0

    def test_undefined(self):
        """Test theta1 = 0 is rejected"""
        with pytest.raises(ContractError):
            theoretical_delta(0.3, 0.0)


class TestSample:
    """Test sample()"""

    def test_sharp_null(self):
        """Test Y(0) equals Y(1) for every unit"""
        spec = DgpSpec(Example4(), LocalMisspec("cos", (1.0, 0.0, 0.0, 0.0)))
        drawn = sample(spec, 500, _rng())
        assert np.array_equal(drawn.truth.y0, drawn.truth.y1)
        assert np.array_equal(drawn.dataset.y, drawn.truth.y0)

    def test_deterministic(self):
        """Test equal seeds give equal datasets"""
        spec = DgpSpec(Example2())
        assert sample(spec, 200, _rng(4)).dataset == sample(spec, 200, _rng(4)).dataset
        assert sample(spec, 200, _rng(4)).dataset != sample(spec, 200, _rng(5)).dataset

    def test_invalid_size(self):
        """Test n must be positive"""
        with pytest.raises(ContractError, match="sample size"):
            sample(DgpSpec(Example1()), 0, _rng())

    def test_example1_treated_share(self):
        """Test P(Z = 1) = theta0 + theta1 / 2 = 0.45"""
        ds = sample(DgpSpec(Example1()), 100_000, _rng(1)).dataset
        assert ds.n_treated / ds.n == pytest.approx(0.45, abs=0.01)

    def test_example4_outcome_mean(self):
        """Test E[Y] = 0 under Example 4"""
        ds = sample(DgpSpec(Example4()), 100_000, _rng(2)).dataset
        assert float(np.mean(ds.y)) == pytest.approx(0.0, abs=0.03)

    def test_example4_propensity_range(self):
        """Test e(x) stays within [expit(-2.1), expit(-0.1)]"""
        truth = sample(DgpSpec(Example4()), 100_000, _rng(3)).truth
        assert truth.propensity.min() >= expit(-2.1)
        assert truth.propensity.max() <= expit(-0.1)

    def test_example2_treated_mu_distribution(self):
        """Test theta'X among treated units follows the closed-form law"""
        drawn = sample(DgpSpec(Example2(theta=(1.0, 0.0))), 100_000, _rng(6))
        mu_treated = drawn.truth.mu[drawn.dataset.z == 1]
        statistic = stats.kstest(mu_treated, example2_mu_cdf).statistic
        assert statistic < 0.02

    def test_local_misspec_shift(self):
        """Test mu gains c' g(X) / sqrt(n)"""
        misspec = LocalMisspec("cos1", (2.0,))
        n = 400
        drawn = sample(DgpSpec(Example4(), misspec), n, _rng(7))
        X = drawn.dataset.X
        expected = 3.0 * X[:, 0] + 2.0 * np.cos(np.pi * X[:, 0]) / math.sqrt(n)
        assert np.allclose(drawn.truth.mu, expected)

    def test_exact_match_null(self):
        """Test every treated unit has a control twin"""
        drawn = sample(DgpSpec(ExactMatchNull(d_=2, levels=3, treated_share=0.3)), 50, _rng(8))
        ds = drawn.dataset
        assert ds.n_treated == 15
        controls = {tuple(x) for x in ds.X[ds.control_indices]}
        assert all(tuple(x) in controls for x in ds.X[ds.treated_indices])


class TestExample2Law:
    """Test the closed-form density and CDF"""

    def test_density_integrates_to_one(self):
        """Test the density has unit mass"""
        mass, _ = integrate.quad(lambda h: float(example2_mu_density(h)), -1.0, 1.0)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_cdf_endpoints_and_derivative(self):
        """Test CDF limits and its derivative"""
        assert example2_mu_cdf(-1.0) == pytest.approx(0.0, abs=1e-12)
        assert example2_mu_cdf(1.0) == pytest.approx(1.0)
        h, eps = 0.3, 1e-6
        slope = (example2_mu_cdf(h + eps) - example2_mu_cdf(h - eps)) / (2 * eps)
        assert slope == pytest.approx(float(example2_mu_density(h)), rel=1e-5)


class TestDgpSpec:
    """Test DgpSpec parsing and validation"""

    def test_round_trip(self):
        """Test to_dict output parses back to an equal spec"""
        for spec in (
            DgpSpec(Example1(theta0=0.1, theta1=0.6)),
            DgpSpec(Example2(theta=(0.6, 0.8))),
            DgpSpec(Example4(intercept=1.5), LocalMisspec("cos", (2.0, 0.0, 0.0, 0.0))),
            DgpSpec(ExactMatchNull(d_=3, levels=2)),
        ):
            assert DgpSpec.from_dict(spec.to_dict()) == spec

    def test_default_misspec_norm(self):
        """Test missing coefficients spread norm 2 over the components"""
        spec = DgpSpec.from_dict({"variant": "example4", "local_misspec": {"g": "tanh"}})
        assert np.allclose(spec.local_misspec.coefficients(4), [1.0, 1.0, 1.0, 1.0])

    def test_explicit_norm(self):
        """Test the norm shorthand"""
        spec = DgpSpec.from_dict({"variant": "example4", "local_misspec": {"g": "cos1", "norm": 10}})
        assert spec.local_misspec.c == (10.0,)

    def test_unknown_variant(self):
        """Test an unknown variant lists the known ones"""
        with pytest.raises(ConfigError, match="example1"):
            DgpSpec.from_dict({"variant": "example3"})

    def test_unknown_parameter(self):
        """Test an unknown parameter name"""
        with pytest.raises(ConfigError, match="gamma"):
            DgpSpec.from_dict({"variant": "example1", "params": {"gamma": 1}})

    def test_example2_theta_norm(self):
        """Test |theta| <= 1 is enforced"""
        with pytest.raises(ConfigError, match="theta"):
            DgpSpec.from_dict({"variant": "example2", "params": {"theta": [1.0, 1.0]}})

    def test_misspec_length(self):
        """Test coefficient count must match the basis"""
        with pytest.raises(ConfigError, match="k=4"):
            DgpSpec.from_dict({"variant": "example4", "local_misspec": {"g": "cos", "c": [1.0]}})


if __name__ == "__main__":
    pytest.main([__file__])
