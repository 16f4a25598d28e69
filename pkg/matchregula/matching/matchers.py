"""
Optimal pair matching and nearest-neighbour matching with replacement.

Both matchers use the Mahalanobis metric built from the full-sample
covariance and refer to units by their original row index.
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping, Union

import numpy as np
import pandas as pd

from ..core.dataset import Dataset
from ..core.errors import ContractError, DegenerateDesign
from ..core.rng import stream
from ..linalg.metric import Metric, pairwise_distances
from .assignment import solve_assignment

logger = logging.getLogger(__name__)

DISTANCE_TIE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class PairMatching:
    """One-to-one matching of every treated unit to a distinct control."""

    pairs: tuple[tuple[int, int], ...]
    distances: tuple[float, ...] = ()
    total_cost: float = 0.0

    def __post_init__(self):
        treated = [t for t, _ in self.pairs]
        controls = [c for _, c in self.pairs]
        if len(set(treated)) != len(treated):
            raise ContractError("a treated unit appears in more than one pair")
        if len(set(controls)) != len(controls):
            raise ContractError("a control unit appears in more than one pair")
        if self.distances and len(self.distances) != len(self.pairs):
            raise ContractError("distances must align with pairs")

    @property
    def n_pairs(self) -> int:
        return len(self.pairs)

    @property
    def treated(self) -> np.ndarray:
        return np.array([t for t, _ in self.pairs], dtype=np.intp)

    @property
    def controls(self) -> np.ndarray:
        return np.array([c for _, c in self.pairs], dtype=np.intp)

    @property
    def matched_set(self) -> np.ndarray:
        """Matched units in pair order: treated, control, treated, control, ..."""
        return np.array([i for pair in self.pairs for i in pair], dtype=np.intp)

    @property
    def match_of(self) -> dict[int, int]:
        return dict(self.pairs)

    @property
    def weights(self) -> dict[int, int]:
        return {i: 1 for pair in self.pairs for i in pair}

    def validate(self, dataset: Dataset) -> None:
        """Check the pairing against the dataset's treatment labels."""
        if self.n_pairs != dataset.n_treated:
            raise ContractError(
                f"{self.n_pairs} pairs for {dataset.n_treated} treated units"
            )
        if self.n_pairs and (
            np.any(dataset.z[self.treated] != 1) or np.any(dataset.z[self.controls] != 0)
        ):
            raise ContractError("pairs must join a treated unit to a control unit")


@dataclass(frozen=True)
class ReplacementMatching:
    """Each treated unit matched to a nearest control; controls may repeat."""

    match_of: Mapping[int, int]
    distances: Mapping[int, float] = field(default_factory=dict)

    @property
    def treated(self) -> np.ndarray:
        return np.array(sorted(self.match_of), dtype=np.intp)

    @property
    def controls(self) -> np.ndarray:
        return np.array([self.match_of[t] for t in sorted(self.match_of)], dtype=np.intp)

    @property
    def weights(self) -> dict[int, int]:
        """Multiplicity weights: 1 for treated, number of uses for controls."""
        weights = {t: 1 for t in self.match_of}
        for c in self.match_of.values():
            weights[c] = weights.get(c, 0) + 1
        return weights

    @property
    def matched_set(self) -> np.ndarray:
        return np.array(sorted(self.weights), dtype=np.intp)

    @property
    def total_cost(self) -> float:
        return float(sum(self.distances[t] for t in sorted(self.distances)))


Matching = Union[PairMatching, ReplacementMatching]


def _split(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    return dataset.treated_indices, dataset.control_indices


def ensure_pairable(dataset: Dataset) -> None:
    """Raise :class:`DegenerateDesign` unless 0 < N1 <= N0."""
    if dataset.n_treated == 0:
        raise DegenerateDesign("no treated units to match; p-value is set to 1")
    if dataset.n_treated > dataset.n_control:
        raise DegenerateDesign(
            f"more treated than control units (N1={dataset.n_treated} > "
            f"N0={dataset.n_control}); pair matching is impossible and the p-value is set to 1"
        )


def optimal_pair_match(dataset: Dataset, metric: Metric) -> PairMatching:
    """Pair matching minimizing the total Mahalanobis distance.

    Among equal-cost optima the lexicographically smallest pair list (by
    treated index, then control index) is returned.

    Raises:
        DegenerateDesign: no treated units, or more treated than controls
    """
    ensure_pairable(dataset)
    treated, controls = _split(dataset)

    cost = pairwise_distances(dataset.X[treated], dataset.X[controls], metric)
    result = solve_assignment(cost)
    rows = np.arange(treated.size)
    per_pair = cost[rows, result.col_of_row]

    pairs = tuple(
        (int(t), int(controls[c])) for t, c in zip(treated, result.col_of_row)
    )
    logger.debug(
        f"Optimal pair matching: N1={treated.size}, N0={controls.size}, "
        f"cost={result.total_cost:.6g}"
    )
    return PairMatching(
        pairs=pairs,
        distances=tuple(float(x) for x in per_pair),
        total_cost=result.total_cost,
    )


def match_with_replacement(
    dataset: Dataset, metric: Metric, tiebreak_seed: int
) -> ReplacementMatching:
    """Nearest-control matching with replacement.

    Distances within ``1e-12`` (relative) of the row minimum are ties; a tie
    goes to the control ``j`` minimizing ``|U_i - U_j|`` for auxiliary
    uniforms ``U`` drawn per unit from ``tiebreak_seed``.

    Raises:
        DegenerateDesign: no treated units or no controls
    """
    treated, controls = _split(dataset)
    if treated.size == 0:
        raise DegenerateDesign("no treated units to match")
    if controls.size == 0:
        raise DegenerateDesign("no control units to match with")

    cost = pairwise_distances(dataset.X[treated], dataset.X[controls], metric)
    nearest = cost.min(axis=1)
    ties = cost <= nearest[:, None] * (1.0 + DISTANCE_TIE_TOLERANCE)

    chosen = cost.argmin(axis=1)
    tied_rows = np.flatnonzero(ties.sum(axis=1) > 1)
    if tied_rows.size:
        uniforms = stream(tiebreak_seed).random(dataset.n)
        for r in tied_rows:
            candidates = np.flatnonzero(ties[r])
            gap = np.abs(uniforms[treated[r]] - uniforms[controls[candidates]])
            chosen[r] = candidates[int(np.argmin(gap))]
        logger.debug(f"Broke distance ties for {tied_rows.size} treated units")

    rows = np.arange(treated.size)
    return ReplacementMatching(
        match_of={int(t): int(controls[c]) for t, c in zip(treated, chosen)},
        distances={int(t): float(d) for t, d in zip(treated, cost[rows, chosen])},
    )


def covariate_imbalance(dataset: Dataset, matching: Matching) -> np.ndarray:
    """Mean treated-minus-matched-control covariate difference."""
    treated, controls = matching.treated, matching.controls
    if treated.size == 0:
        return np.zeros(dataset.d)
    return np.mean(dataset.X[treated] - dataset.X[controls], axis=0)


def matching_summary(dataset: Dataset, matching: Matching) -> dict[str, Any]:
    imbalance = covariate_imbalance(dataset, matching)
    return {
        "scheme": "pairs" if isinstance(matching, PairMatching) else "replacement",
        "n_treated": dataset.n_treated,
        "n_control": dataset.n_control,
        "matched_units": int(matching.matched_set.size),
        "total_cost": float(matching.total_cost),
        "imbalance": [float(v) for v in imbalance],
        "imbalance_norm": float(np.linalg.norm(imbalance)),
    }


def write_matching_csv(matching: Matching, path: Union[str, Path]) -> None:
    """Export rows ``treated_index,control_index,distance,weight``.

    ``weight`` is the control's multiplicity weight (always 1 for pairs).
    """
    treated, controls = matching.treated, matching.controls
    if isinstance(matching, PairMatching):
        distances = list(matching.distances) or [float("nan")] * len(treated)
    else:
        distances = [matching.distances.get(int(t), float("nan")) for t in treated]
    weights = matching.weights
    frame = pd.DataFrame(
        {
            "treated_index": treated,
            "control_index": controls,
            "distance": [repr(float(x)) for x in distances],
            "weight": [weights[int(c)] for c in controls],
        }
    )
    frame.to_csv(Path(path), index=False, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} matches to {path}")
