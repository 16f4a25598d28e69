"""
Test statistics, regression fits with HC variances, and balance diagnostics.
"""

from .balance import HotellingResult, hotelling_t2
from .features import FeatureSpec
from .regression import (
    RegressionFit,
    fit_arrays,
    fit_linear,
    fit_report,
    hc_covariance,
    hc_pvalue,
    hc_variance,
    select_model,
    unmatched_design,
)
from .statistics import (
    DifferenceOfMeans,
    RandomizationStatistic,
    RegressionAdjusted,
    available_statistics,
    dm_statistic,
    get_statistic,
    register_statistic,
)

__all__ = [
    "DifferenceOfMeans",
    "FeatureSpec",
    "HotellingResult",
    "RandomizationStatistic",
    "RegressionAdjusted",
    "RegressionFit",
    "available_statistics",
    "dm_statistic",
    "fit_arrays",
    "fit_linear",
    "fit_report",
    "get_statistic",
    "hc_covariance",
    "hc_pvalue",
    "hc_variance",
    "hotelling_t2",
    "register_statistic",
    "select_model",
    "unmatched_design",
]
