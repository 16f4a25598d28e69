"""
Covariate matching: optimal pairs and nearest neighbours with replacement.
"""

from .assignment import AssignmentResult, solve_assignment
from .matchers import (
    Matching,
    PairMatching,
    ReplacementMatching,
    covariate_imbalance,
    match_with_replacement,
    matching_summary,
    optimal_pair_match,
    write_matching_csv,
)
from .sample import MatchedSample

__all__ = [
    "AssignmentResult",
    "MatchedSample",
    "Matching",
    "PairMatching",
    "ReplacementMatching",
    "covariate_imbalance",
    "match_with_replacement",
    "matching_summary",
    "optimal_pair_match",
    "solve_assignment",
    "write_matching_csv",
]
