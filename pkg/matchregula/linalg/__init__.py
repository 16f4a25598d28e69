"""
Covariance estimation and Mahalanobis geometry shared by the matchers.
"""

from .metric import (
    Metric,
    build_metric,
    mahalanobis_distance,
    pairwise_distances,
    sample_covariance,
)

__all__ = [
    "Metric",
    "build_metric",
    "mahalanobis_distance",
    "pairwise_distances",
    "sample_covariance",
]
