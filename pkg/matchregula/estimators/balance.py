"""
Covariate balance diagnostics.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.stats import f as f_dist

from ..core.dataset import Dataset
from ..core.errors import ContractError, SingularDesign

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HotellingResult:
    statistic: float
    p_value: float
    f_statistic: float
    df: tuple[int, int]

    def __iter__(self):
        return iter((self.statistic, self.p_value))

    def rejects(self, level: float) -> bool:
        return self.p_value < level


def hotelling_t2(dataset: Dataset, index_set: Sequence[int]) -> HotellingResult:
    """Two-sample Hotelling T² for equal covariate means (treated vs control).

    ``T² = n1 n2 / (n1 + n2) · (m1 - m2)' S⁻¹ (m1 - m2)`` with pooled
    covariance ``S``; ``(n1 + n2 - d - 1) / (d (n1 + n2 - 2)) · T²`` is
    referred to ``F(d, n1 + n2 - d - 1)``.

    Raises:
        ContractError: a group is missing or too small for the F reference
        SingularDesign: pooled covariance is singular
    """
    idx = np.asarray(index_set, dtype=np.intp)
    X, z = dataset.X[idx], dataset.z[idx]
    A, B = X[z == 1], X[z == 0]
    n1, n2, d = A.shape[0], B.shape[0], X.shape[1]
    if n1 == 0 or n2 == 0:
        raise ContractError("Hotelling T² needs both treated and control units")
    df2 = n1 + n2 - d - 1
    if df2 < 1:
        raise ContractError(f"too few units ({n1 + n2}) for {d} covariates")

    diff = A.mean(axis=0) - B.mean(axis=0)
    scatter = (A - A.mean(axis=0)).T @ (A - A.mean(axis=0))
    scatter += (B - B.mean(axis=0)).T @ (B - B.mean(axis=0))
    pooled = scatter / (n1 + n2 - 2)

    try:
        factor = scipy.linalg.cho_factor(pooled, lower=True)
    except scipy.linalg.LinAlgError as e:
        raise SingularDesign("pooled covariance is singular") from e
    diag = np.diag(factor[0]) ** 2
    if diag.min() < 1e-10 * max(float(np.max(np.diag(pooled))), np.finfo(float).tiny):
        raise SingularDesign("pooled covariance is singular")

    t2 = float(n1 * n2 / (n1 + n2) * diff @ scipy.linalg.cho_solve(factor, diff))
    f_stat = df2 / (d * (n1 + n2 - 2)) * t2
    p = float(f_dist.sf(f_stat, d, df2)) if t2 > 0 else 1.0
    return HotellingResult(statistic=t2, p_value=p, f_statistic=f_stat, df=(d, df2))
