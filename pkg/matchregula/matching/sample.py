"""
Matched-sample views handed to statistics and regressions.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..core.dataset import Dataset
from .matchers import Matching, PairMatching


@dataclass(frozen=True, eq=False)
class MatchedSample:
    """Rows of a matched set with their weights.

    For pair matchings rows are laid out pair by pair (treated first), so
    ``pair_slots`` is ``(n_pairs, 2)`` with treated in column 0. For other
    samples ``pair_slots`` is ``None``.
    """

    indices: np.ndarray
    X: np.ndarray
    y: np.ndarray
    z: np.ndarray
    weights: np.ndarray
    pair_slots: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return int(self.indices.size)

    @property
    def n_pairs(self) -> int:
        return 0 if self.pair_slots is None else int(self.pair_slots.shape[0])

    @classmethod
    def from_matching(cls, dataset: Dataset, matching: Matching) -> "MatchedSample":
        if isinstance(matching, PairMatching):
            idx = matching.matched_set
            slots = np.arange(idx.size, dtype=np.intp).reshape(-1, 2)
            weights = np.ones(idx.size)
        else:
            idx = matching.matched_set
            w = matching.weights
            weights = np.array([w[int(i)] for i in idx], dtype=np.float64)
            slots = None
        return cls(
            indices=idx,
            X=dataset.X[idx],
            y=dataset.y[idx],
            z=dataset.z[idx].astype(np.float64),
            weights=weights,
            pair_slots=slots,
        )

    @classmethod
    def full(cls, dataset: Dataset) -> "MatchedSample":
        """The whole dataset with unit weights (no matching)."""
        idx = np.arange(dataset.n, dtype=np.intp)
        return cls(
            indices=idx,
            X=dataset.X,
            y=dataset.y,
            z=dataset.z.astype(np.float64),
            weights=np.ones(dataset.n),
        )
