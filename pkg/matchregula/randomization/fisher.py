"""
Paired Fisher randomization test.

Within every matched pair the treatment label is re-drawn as a fair coin
flip; the randomization distribution of a statistic over these pseudo
assignments yields the p-value

    p = P(|tau*| >= |tau_obs| | data)

computed exactly over all ``2^N1`` assignments (exhaustive mode) or with the
add-one estimator ``(1 + #{b: |tau*_b| >= |tau_obs|}) / (B + 1)`` over ``B``
counter-indexed draws (sampled mode).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, Union

import numpy as np

from ..core.config import (
    DEFAULT_ALPHA,
    DEFAULT_PERMUTATIONS,
    MAX_EXHAUSTIVE_PAIRS,
    resolve_chunk_size,
)
from ..core.dataset import Dataset
from ..core.errors import ContractError, DegenerateDesign
from ..core.rng import Stream, draw_stream, stream_key
from ..estimators.statistics import RandomizationStatistic, get_statistic
from ..linalg.metric import Metric, build_metric, sample_covariance
from ..matching.matchers import PairMatching, ensure_pairable, optimal_pair_match
from ..matching.sample import MatchedSample

logger = logging.getLogger(__name__)

TIE_TOLERANCE = 1e-12

Sidedness = Literal["two", "greater"]


@dataclass(frozen=True)
class Exhaustive:
    """Enumerate all ``2^N1`` within-pair assignments."""

    def to_dict(self) -> dict[str, Any]:
        return {"mode": "exhaustive"}


@dataclass(frozen=True)
class Sampled:
    """``permutations`` random assignments derived from ``seed``."""

    permutations: int = DEFAULT_PERMUTATIONS
    seed: int = 0

    def __post_init__(self):
        if self.permutations < 1:
            raise ContractError(f"permutations must be >= 1, got {self.permutations}")

    def to_dict(self) -> dict[str, Any]:
        return {"mode": "sampled", "permutations": self.permutations, "seed": self.seed}


RandomizationMode = Union[Exhaustive, Sampled]


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


@dataclass(frozen=True, eq=False)
class RandomizationResult:
    """Outcome of one randomization test."""

    statistic: str
    tau_obs: float
    draws: np.ndarray
    p_value: float
    critical_value: float
    alpha: float
    mode: RandomizationMode
    n_pairs: int
    sidedness: Sidedness = "two"
    degenerate: bool = False
    message: Optional[str] = field(default=None)

    def rejects(self, level: Optional[float] = None) -> bool:
        return self.p_value < (self.alpha if level is None else level)

    def to_dict(self, include_draws: bool = False) -> dict[str, Any]:
        mode = self.mode.to_dict()
        data: dict[str, Any] = {
            "statistic": self.statistic,
            "mode": mode["mode"],
            "B": mode.get("permutations", int(self.draws.size)),
            "seed": mode.get("seed"),
            "p_value": self.p_value,
            "tau_obs": _finite_or_none(self.tau_obs),
            "critical_value": _finite_or_none(self.critical_value),
            "alpha": self.alpha,
            "sidedness": self.sidedness,
            "n_pairs": self.n_pairs,
            "degenerate": self.degenerate,
        }
        if self.message:
            data["message"] = self.message
        if include_draws:
            data["draws"] = [float(v) for v in self.draws]
        return data


def _pair_layout(flips: np.ndarray) -> np.ndarray:
    """Matched-sample assignments (pair order, treated slot first) from flips."""
    flips = np.atleast_2d(flips).astype(np.float64)
    Z = np.empty((flips.shape[0], 2 * flips.shape[1]))
    Z[:, 0::2] = 1.0 - flips
    Z[:, 1::2] = flips
    return Z


def permute_within_pairs(pairs: PairMatching, rng: np.random.Generator,
                         base: Optional[np.ndarray] = None) -> np.ndarray:
    """Pseudo assignment flipping each pair's labels with probability 1/2.

    Without ``base`` the result is laid out over the matched units in pair
    order (treated slot first). With ``base`` (the full-sample assignment) a
    copy is returned in which only matched units change.
    """
    flips = rng.integers(0, 2, size=pairs.n_pairs, dtype=np.int8)
    if base is None:
        return _pair_layout(flips)[0].astype(np.int8)
    z = np.array(base, dtype=np.int8, copy=True)
    if pairs.n_pairs:
        z[pairs.treated] = 1 - flips
        z[pairs.controls] = flips
    return z


def _exhaustive_blocks(n_pairs: int, chunk: int):
    total = 1 << n_pairs
    bits = np.arange(n_pairs, dtype=np.int64)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.int64)
        yield (codes[:, None] >> bits) & 1


def _sampled_blocks(n_pairs: int, mode: Sampled, chunk: int):
    key = stream_key(mode.seed, Stream.PERMUTATION)
    for start in range(0, mode.permutations, chunk):
        stop = min(start + chunk, mode.permutations)
        block = np.empty((stop - start, n_pairs), dtype=np.int8)
        for row, b in enumerate(range(start, stop)):
            block[row] = draw_stream(key, b).integers(0, 2, size=n_pairs, dtype=np.int8)
        yield block


def critical_value(draws: np.ndarray, alpha: float) -> float:
    """``inf{t : P(|tau*| <= t) >= 1 - alpha}`` over the draws."""
    if draws.size == 0:
        return math.nan
    ordered = np.sort(np.abs(draws))
    k = math.ceil((1.0 - alpha) * ordered.size - 1e-9)
    return float(ordered[min(max(k, 1), ordered.size) - 1])


def randomization_pvalue(
    dataset: Dataset,
    pairs: PairMatching,
    statistic: Union[str, RandomizationStatistic] = "dm",
    mode: Optional[RandomizationMode] = None,
    alpha: float = DEFAULT_ALPHA,
    sidedness: Sidedness = "two",
) -> RandomizationResult:
    """Randomization p-value of ``statistic`` over within-pair re-assignments.

    Args:
        dataset: source data
        pairs: a pair matching of ``dataset``
        statistic: registered statistic name or an object honouring the
            statistic contract
        mode: ``Exhaustive()`` or ``Sampled(B, seed)`` (default ``Sampled()``)
        alpha: level for the critical value
        sidedness: ``two`` compares ``|tau|``; ``greater`` compares ``tau``

    Raises:
        ContractError: exhaustive mode with more than 20 pairs
    """
    mode = mode or Sampled()
    if not 0 < alpha < 1:
        raise ContractError(f"alpha must lie in (0, 1), got {alpha}")
    if sidedness not in ("two", "greater"):
        raise ContractError(f"sidedness must be 'two' or 'greater', got {sidedness!r}")
    stat = get_statistic(statistic) if isinstance(statistic, str) else statistic
    pairs.validate(dataset)
    n_pairs = pairs.n_pairs
    if n_pairs == 0:
        return degenerate_result(stat.name, mode, alpha, "no pairs to permute", sidedness)

    if isinstance(mode, Exhaustive) and n_pairs > MAX_EXHAUSTIVE_PAIRS:
        raise ContractError(
            f"exhaustive enumeration supports at most {MAX_EXHAUSTIVE_PAIRS} pairs "
            f"(got {n_pairs}); use sampled mode"
        )

    sample = MatchedSample.from_matching(dataset, pairs)
    tau_obs = float(stat.evaluate(sample, sample.z))

    chunk = resolve_chunk_size()
    blocks = (
        _exhaustive_blocks(n_pairs, chunk)
        if isinstance(mode, Exhaustive)
        else _sampled_blocks(n_pairs, mode, chunk)
    )
    draws = np.concatenate(
        [stat.evaluate_many(sample, _pair_layout(flips)) for flips in blocks]
    )

    if sidedness == "two":
        hits = np.abs(draws) >= abs(tau_obs) * (1.0 - TIE_TOLERANCE)
    else:
        hits = draws >= tau_obs - TIE_TOLERANCE * abs(tau_obs)
    count = int(np.count_nonzero(hits))

    if isinstance(mode, Exhaustive):
        p_value = count / draws.size
    else:
        p_value = (1 + count) / (draws.size + 1)

    logger.debug(
        f"Randomization test {stat.name}: N1={n_pairs}, tau={tau_obs:.6g}, "
        f"p={p_value:.4g} over {draws.size} draws"
    )
    return RandomizationResult(
        statistic=stat.name,
        tau_obs=tau_obs,
        draws=draws,
        p_value=float(min(p_value, 1.0)),
        critical_value=critical_value(draws, alpha),
        alpha=alpha,
        mode=mode,
        n_pairs=n_pairs,
        sidedness=sidedness,
    )


def degenerate_result(statistic: str, mode: RandomizationMode, alpha: float,
                      reason: str, sidedness: Sidedness = "two") -> RandomizationResult:
    """Result recorded when no pair matching exists (p = 1)."""
    return RandomizationResult(
        statistic=statistic,
        tau_obs=math.nan,
        draws=np.empty(0),
        p_value=1.0,
        critical_value=math.nan,
        alpha=alpha,
        mode=mode,
        n_pairs=0,
        sidedness=sidedness,
        degenerate=True,
        message=reason,
    )


def paired_randomization_test(
    dataset: Dataset,
    statistic: Union[str, RandomizationStatistic] = "dm",
    mode: Optional[RandomizationMode] = None,
    alpha: float = DEFAULT_ALPHA,
    metric: Optional[Metric] = None,
    sidedness: Sidedness = "two",
) -> RandomizationResult:
    """Optimal pair matching followed by :func:`randomization_pvalue`.

    A design without a pair matching (no treated units, or more treated than
    controls) is answered with ``p = 1``.
    """
    mode = mode or Sampled()
    stat = get_statistic(statistic) if isinstance(statistic, str) else statistic
    try:
        ensure_pairable(dataset)
        metric = metric or build_metric(sample_covariance(dataset))
        pairs = optimal_pair_match(dataset, metric)
    except DegenerateDesign as e:
        logger.info(f"Degenerate design, p-value set to 1: {e}")
        return degenerate_result(stat.name, mode, alpha, str(e), sidedness)
    return randomization_pvalue(dataset, pairs, stat, mode, alpha, sidedness)
