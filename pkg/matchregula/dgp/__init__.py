"""
Null data-generating processes, bounded bases and closed-form oracles.
"""

from .bases import NONE_BASIS, GBasis, available_bases, bounded_g_library
from .models import (
    MODELS,
    DgpSpec,
    Example1,
    Example2,
    Example4,
    ExactMatchNull,
    LocalMisspec,
    Sample,
    Truth,
    example2_mu_cdf,
    example2_mu_density,
    propensity,
    sample,
    theoretical_delta,
)

__all__ = [
    "MODELS",
    "NONE_BASIS",
    "DgpSpec",
    "Example1",
    "Example2",
    "Example4",
    "ExactMatchNull",
    "GBasis",
    "LocalMisspec",
    "Sample",
    "Truth",
    "available_bases",
    "bounded_g_library",
    "example2_mu_cdf",
    "example2_mu_density",
    "propensity",
    "sample",
    "theoretical_delta",
]
