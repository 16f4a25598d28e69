"""
Weighted least squares with heteroskedasticity-consistent (HC0) variances.

For design rows ``psi_i``, weights ``w_i`` and residuals ``e_i = y_i -
psi_i' theta`` the sandwich is

    V = (Psi' W Psi)^-1 (sum_i w_i^2 e_i^2 psi_i psi_i') (Psi' W Psi)^-1

which is plain HC0 when all weights are 1. Least squares runs through a
column-pivoted QR of ``W^{1/2} Psi``; a pivot below ``1e-10`` of the largest
marks the design as singular.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Literal, Optional, Sequence

import numpy as np
import scipy.linalg
from scipy.stats import norm

from ..core.dataset import Dataset
from ..core.errors import ContractError, DegenerateInputError, SingularDesign
from ..dgp.bases import GBasis
from .features import FeatureSpec

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10

Sidedness = Literal["one", "two"]


@dataclass(frozen=True, eq=False)
class RegressionFit:
    """Result of :func:`fit_linear`.

    ``coefficients`` follow the column layout of ``spec.design``; the
    treatment coefficient is ``tau_hat`` and the rest are
    ``other_coefficients``.
    """

    tau_hat: float
    other_coefficients: np.ndarray
    residuals: np.ndarray
    hc_variance_tau: float
    weights_used: np.ndarray
    t_stat: float
    coefficients: np.ndarray
    index_set: np.ndarray
    spec: FeatureSpec
    column_names: tuple[str, ...]
    design: np.ndarray = field(repr=False)
    bread: np.ndarray = field(repr=False)

    @property
    def n_used(self) -> int:
        return int(np.count_nonzero(self.weights_used))


def _weighted_qr(design: np.ndarray, sqrt_w: np.ndarray):
    A = design * sqrt_w[:, None]
    if np.count_nonzero(sqrt_w) < design.shape[1]:
        raise SingularDesign(
            f"{np.count_nonzero(sqrt_w)} weighted observations for {design.shape[1]} columns"
        )
    Q, R, piv = scipy.linalg.qr(A, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0 or diag[-1] < RANK_TOLERANCE * diag[0]:
        raise SingularDesign(
            f"design matrix is rank deficient ({design.shape[1]} columns, "
            f"smallest pivot ratio {diag[-1] / diag[0] if diag.size and diag[0] else 0.0:.3g})"
        )
    return Q, R, piv


def _solve(design: np.ndarray, y: np.ndarray, weights: np.ndarray):
    sqrt_w = np.sqrt(weights)
    Q, R, piv = _weighted_qr(design, sqrt_w)
    theta_perm = scipy.linalg.solve_triangular(R, Q.T @ (sqrt_w * y))
    r_inv = scipy.linalg.solve_triangular(R, np.eye(R.shape[0]))
    bread = np.empty_like(r_inv)
    bread[np.ix_(piv, piv)] = r_inv @ r_inv.T
    theta = np.empty_like(theta_perm)
    theta[piv] = theta_perm
    return theta, bread


def _sandwich(design: np.ndarray, residuals: np.ndarray, weights: np.ndarray,
              bread: np.ndarray) -> np.ndarray:
    scores = design * (weights * residuals)[:, None]
    meat = scores.T @ scores
    cov = bread @ meat @ bread
    return 0.5 * (cov + cov.T)


def _check_weights(weights: Optional[Sequence[float]], size: int) -> np.ndarray:
    if weights is None:
        return np.ones(size)
    w = np.asarray(weights, dtype=np.float64).reshape(-1)
    if w.size != size:
        raise ContractError(f"{w.size} weights for {size} observations")
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ContractError("weights must be finite and nonnegative")
    if not np.any(w > 0):
        raise ContractError("weights must not all be zero")
    return w


def fit_arrays(X: np.ndarray, y: np.ndarray, z: np.ndarray,
               weights: Optional[Sequence[float]], spec: FeatureSpec,
               index_set: Optional[np.ndarray] = None) -> RegressionFit:
    """:func:`fit_linear` on raw arrays."""
    y = np.asarray(y, dtype=np.float64)
    w = _check_weights(weights, y.size)
    design = spec.design(X, z)
    theta, bread = _solve(design, y, w)
    residuals = y - design @ theta

    cov = _sandwich(design, residuals, w, bread)
    var_tau = max(float(cov[0, 0]), 0.0)
    tau = float(theta[0])
    if var_tau > 0:
        t_stat = tau / math.sqrt(var_tau)
    else:
        t_stat = 0.0 if tau == 0.0 else math.copysign(math.inf, tau)

    idx = np.arange(y.size) if index_set is None else np.asarray(index_set)
    return RegressionFit(
        tau_hat=tau,
        other_coefficients=theta[1:],
        residuals=residuals,
        hc_variance_tau=var_tau,
        weights_used=w,
        t_stat=t_stat,
        coefficients=theta,
        index_set=idx,
        spec=spec,
        column_names=tuple(spec.column_names(np.atleast_2d(X).shape[1])),
        design=design,
        bread=bread,
    )


def fit_linear(dataset: Dataset, index_set: Sequence[int],
               weights: Optional[Sequence[float]], spec: FeatureSpec) -> RegressionFit:
    """Weighted least squares of ``y`` on ``psi_S(x, z)`` over ``index_set``.

    Args:
        dataset: source data
        index_set: row indices entering the regression
        weights: one nonnegative weight per entry of ``index_set`` (``None``
            for unit weights)
        spec: feature layout

    Raises:
        SingularDesign: the weighted design is rank deficient
    """
    idx = np.asarray(index_set, dtype=np.intp)
    if idx.size == 0:
        raise ContractError("index set is empty")
    return fit_arrays(dataset.X[idx], dataset.y[idx], dataset.z[idx], weights, spec, idx)


def hc_covariance(fit: RegressionFit) -> np.ndarray:
    """Full HC0 sandwich covariance of the coefficients."""
    return _sandwich(fit.design, fit.residuals, fit.weights_used, fit.bread)


def hc_variance(fit: RegressionFit) -> float:
    """HC0 sandwich variance of the treatment coefficient."""
    return max(float(hc_covariance(fit)[0, 0]), 0.0)


def _normal_pvalue(t: float, sidedness: Sidedness) -> float:
    if sidedness == "two":
        return float(min(1.0, 2.0 * norm.sf(abs(t))))
    if sidedness == "one":
        return float(norm.sf(t))
    raise ContractError(f"sidedness must be 'one' or 'two', got {sidedness!r}")


def hc_pvalue(fit: RegressionFit, sidedness: Sidedness = "two") -> float:
    """Normal-reference p-value of ``t = tau_hat / sqrt(hc_variance)``.

    The one-sided version rejects for large positive ``t``.

    Raises:
        DegenerateInputError: the HC variance is zero
    """
    if fit.hc_variance_tau <= 0.0:
        raise DegenerateInputError("HC variance of the treatment coefficient is zero")
    return _normal_pvalue(fit.t_stat, sidedness)


def select_model(dataset: Dataset, index_set: Sequence[int],
                 weights: Optional[Sequence[float]], g: GBasis,
                 level: float = 0.05) -> FeatureSpec:
    """Fit the saturated model once and drop insignificant ``g`` components.

    A component is kept when its two-sided HC z-test has ``p <= level``.
    """
    if g.k == 0:
        return FeatureSpec.baseline(g)

    saturated = FeatureSpec.saturated(g)
    fit = fit_linear(dataset, index_set, weights, saturated)
    cov = hc_covariance(fit)
    first_g = fit.coefficients.size - g.k

    kept = []
    for m in range(g.k):
        pos = first_g + m
        coef, var = float(fit.coefficients[pos]), float(cov[pos, pos])
        if var > 0:
            p = _normal_pvalue(coef / math.sqrt(var), "two")
        else:
            p = 0.0 if coef != 0.0 else 1.0
        if p <= level:
            kept.append(m)
    logger.debug(f"Model selection kept components {kept} of {g.name} (k={g.k})")
    return FeatureSpec(tuple(kept), g)


def fit_report(fit: RegressionFit) -> dict[str, Any]:
    """Fit report: coefficients, HC standard errors, t and p per column."""
    cov = hc_covariance(fit)
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    rows = []
    for name, coef, s in zip(fit.column_names, fit.coefficients, se):
        if s > 0:
            t = float(coef / s)
            p = _normal_pvalue(t, "two")
        else:
            t, p = None, None
        rows.append({"name": name, "estimate": float(coef), "hc_se": float(s), "t": t, "p": p})
    return {
        "spec_id": fit.spec.identifier,
        "n_used": fit.n_used,
        "tau_hat": fit.tau_hat,
        "hc_se": math.sqrt(fit.hc_variance_tau),
        "t": fit.t_stat if math.isfinite(fit.t_stat) else None,
        "p": hc_pvalue(fit) if fit.hc_variance_tau > 0 else None,
        "coefficients": rows,
    }


def unmatched_design(dataset: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Index set and unit weights covering the whole sample (no matching)."""
    return np.arange(dataset.n, dtype=np.intp), np.ones(dataset.n)
