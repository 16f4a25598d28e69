"""
Paired Fisher randomization tests.
"""

from .fisher import (
    MAX_EXHAUSTIVE_PAIRS,
    Exhaustive,
    RandomizationMode,
    RandomizationResult,
    Sampled,
    critical_value,
    degenerate_result,
    paired_randomization_test,
    permute_within_pairs,
    randomization_pvalue,
)

__all__ = [
    "MAX_EXHAUSTIVE_PAIRS",
    "Exhaustive",
    "RandomizationMode",
    "RandomizationResult",
    "Sampled",
    "critical_value",
    "degenerate_result",
    "paired_randomization_test",
    "permute_within_pairs",
    "randomization_pvalue",
]
