"""
Test statistics evaluated on a matched sample under a (pseudo-)assignment.

A statistic maps ``(matched sample, assignment vector)`` to one real.
Statistics may also evaluate a whole block of assignments at once; the
randomization test uses that path for its draws.
"""

import logging
from typing import Optional, Protocol, runtime_checkable

import numpy as np
import scipy.linalg

from ..core.dataset import Dataset
from ..core.errors import ContractError, SingularDesign
from ..matching.matchers import Matching
from ..matching.sample import MatchedSample
from .features import FeatureSpec
from .regression import RANK_TOLERANCE

logger = logging.getLogger(__name__)


@runtime_checkable
class RandomizationStatistic(Protocol):
    """Statistic plug-in contract."""

    name: str

    def evaluate(self, sample: MatchedSample, z: np.ndarray) -> float: ...

    def evaluate_many(self, sample: MatchedSample, Z: np.ndarray) -> np.ndarray: ...


class DifferenceOfMeans:
    """Weighted treated mean minus weighted control mean.

    On a pair matching this is the mean of within-pair differences.
    """

    name = "dm"

    def evaluate(self, sample: MatchedSample, z: np.ndarray) -> float:
        return float(self.evaluate_many(sample, np.asarray(z)[None, :])[0])

    def evaluate_many(self, sample: MatchedSample, Z: np.ndarray) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.float64)
        treated_w = Z * sample.weights
        control_w = (1.0 - Z) * sample.weights
        # a draw depends on its own row only, never on the block height
        with np.errstate(invalid="ignore", divide="ignore"):
            return (treated_w * sample.y).sum(axis=1) / treated_w.sum(axis=1) - (
                control_w * sample.y
            ).sum(axis=1) / control_w.sum(axis=1)


class RegressionAdjusted:
    """Treatment coefficient of the weighted regression on ``psi_S(x, z)``.

    Refitting for each assignment is done by partialling out the covariate
    block once (Frisch-Waugh-Lovell): with ``Q`` an orthonormal basis of the
    weighted covariate design, ``tau = <r, y~> / <r, r>`` where ``r`` is the
    residual of the weighted assignment on ``Q``.
    """

    name = "reg"

    def __init__(self, spec: Optional[FeatureSpec] = None):
        self.spec = spec or FeatureSpec.baseline()
        self._cached_for: Optional[MatchedSample] = None
        self._cache: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None

    def _projection(self, sample: MatchedSample):
        if self._cache is not None and self._cached_for is sample:
            return self._cache
        sqrt_w = np.sqrt(sample.weights)
        phi = self.spec.covariate_design(sample.X) * sqrt_w[:, None]
        Q, R, _ = scipy.linalg.qr(phi, mode="economic", pivoting=True)
        diag = np.abs(np.diag(R))
        if phi.shape[0] <= phi.shape[1] or diag[-1] < RANK_TOLERANCE * diag[0]:
            raise SingularDesign("covariate design is rank deficient")
        y_tilde = sqrt_w * sample.y
        self._cached_for = sample
        self._cache = (sqrt_w, Q, y_tilde)
        return self._cache

    def evaluate(self, sample: MatchedSample, z: np.ndarray) -> float:
        return float(self.evaluate_many(sample, np.asarray(z)[None, :])[0])

    def evaluate_many(self, sample: MatchedSample, Z: np.ndarray) -> np.ndarray:
        sqrt_w, Q, y_tilde = self._projection(sample)
        Zw = np.asarray(Z, dtype=np.float64) * sqrt_w
        resid = Zw.copy()
        for column in Q.T:
            resid -= (Zw * column).sum(axis=1)[:, None] * column
        denom = (resid * resid).sum(axis=1)
        scale = (Zw * Zw).sum(axis=1)
        if np.any(denom <= (RANK_TOLERANCE**2) * scale):
            raise SingularDesign("assignment is collinear with the covariate design")
        return (resid * y_tilde).sum(axis=1) / denom


_REGISTRY: dict[str, type] = {}


def register_statistic(name: str, factory: type) -> None:
    """Register a statistic class under ``name`` (overwrites existing)."""
    _REGISTRY[name] = factory
    logger.debug(f"Registered statistic: {name}")


def get_statistic(name: str, **kwargs) -> RandomizationStatistic:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise ContractError(
            f"unknown statistic '{name}'; available: {', '.join(available_statistics())}"
        ) from None
    return factory(**kwargs)


def available_statistics() -> list[str]:
    return sorted(_REGISTRY)


register_statistic(DifferenceOfMeans.name, DifferenceOfMeans)
register_statistic(RegressionAdjusted.name, RegressionAdjusted)


def dm_statistic(dataset: Dataset, pairs: Matching) -> float:
    """Mean over treated units of ``Y_i - Y_m(i)``."""
    treated, controls = pairs.treated, pairs.controls
    if treated.size == 0:
        return 0.0
    return float(np.mean(dataset.y[treated] - dataset.y[controls]))
