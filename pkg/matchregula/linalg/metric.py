"""
Sample covariance, robust inversion and Mahalanobis distances.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from ..core.dataset import Dataset
from ..core.errors import ContractError, DegenerateInputError

logger = logging.getLogger(__name__)

SYMMETRY_TOLERANCE = 1e-12
SINGULAR_PIVOT_RATIO = 1e-10


@dataclass(frozen=True, eq=False)
class Metric:
    """Inverse covariance used for Mahalanobis distances.

    ``whitening`` is the lower Cholesky factor ``L`` of ``inverse_matrix``;
    distances are Euclidean distances between ``x @ L`` images.
    """

    inverse_matrix: np.ndarray
    used_identity_fallback: bool = False
    whitening: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        inv = np.array(self.inverse_matrix, dtype=np.float64, copy=True)
        if inv.ndim != 2 or inv.shape[0] != inv.shape[1]:
            raise ContractError(f"metric must be a square matrix, got shape {inv.shape}")
        _check_symmetric(inv)
        inv = 0.5 * (inv + inv.T)
        try:
            whitening = scipy.linalg.cholesky(inv, lower=True)
        except scipy.linalg.LinAlgError:
            # semidefinite: fall back to a symmetric square root
            eigvals, eigvecs = scipy.linalg.eigh(inv)
            whitening = eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
        inv.setflags(write=False)
        whitening.setflags(write=False)
        object.__setattr__(self, "inverse_matrix", inv)
        object.__setattr__(self, "whitening", whitening)

    @property
    def d(self) -> int:
        return int(self.inverse_matrix.shape[0])

    @classmethod
    def identity(cls, d: int, fallback: bool = False) -> "Metric":
        return cls(np.eye(d), used_identity_fallback=fallback)

    def transform(self, X: np.ndarray) -> np.ndarray:
        """Whitened coordinates of the rows of ``X``."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.d:
            raise ContractError(
                f"dimension mismatch: vectors have length {X.shape[1]}, metric is {self.d}"
            )
        return X @ self.whitening


def _check_symmetric(matrix: np.ndarray) -> None:
    scale = max(1.0, float(np.max(np.abs(matrix)))) if matrix.size else 1.0
    if np.max(np.abs(matrix - matrix.T), initial=0.0) > SYMMETRY_TOLERANCE * scale:
        raise ContractError("matrix is not symmetric")


def sample_covariance(dataset: Dataset) -> np.ndarray:
    """Unbiased covariance of the covariates pooled over all units."""
    if dataset.n < 2:
        raise DegenerateInputError(
            f"sample covariance needs at least 2 units, got {dataset.n}"
        )
    cov = np.atleast_2d(np.cov(dataset.X, rowvar=False, ddof=1))
    return 0.5 * (cov + cov.T)


def build_metric(cov: np.ndarray) -> Metric:
    """Invert ``cov``, falling back to the identity when it is singular.

    Singularity is judged from the pivots of a Cholesky (LDLᵀ) factorization:
    a failed factorization, or a smallest pivot below ``1e-10`` times the
    largest diagonal entry, counts as singular.
    """
    cov = np.atleast_2d(np.asarray(cov, dtype=np.float64))
    if cov.shape[0] != cov.shape[1]:
        raise ContractError(f"covariance must be square, got shape {cov.shape}")
    _check_symmetric(cov)
    d = cov.shape[0]

    largest = float(np.max(np.diag(cov))) if d else 0.0
    if largest <= 0.0:
        logger.warning("Covariance is zero; using identity metric")
        return Metric.identity(d, fallback=True)

    try:
        lower = scipy.linalg.cholesky(cov, lower=True)
    except scipy.linalg.LinAlgError:
        logger.warning("Covariance is not positive definite; using identity metric")
        return Metric.identity(d, fallback=True)

    # LDLᵀ pivots are the squared Cholesky diagonal
    smallest = float(np.min(np.diag(lower) ** 2))
    if smallest < SINGULAR_PIVOT_RATIO * largest:
        logger.warning(
            f"Covariance is singular (min pivot {smallest:.3g}); using identity metric"
        )
        return Metric.identity(d, fallback=True)

    inverse = scipy.linalg.cho_solve((lower, True), np.eye(d))
    return Metric(0.5 * (inverse + inverse.T), used_identity_fallback=False)


def pairwise_distances(A: np.ndarray, B: np.ndarray, metric: Metric) -> np.ndarray:
    """Mahalanobis distance matrix between the rows of ``A`` and ``B``."""
    return cdist(metric.transform(A), metric.transform(B), metric="euclidean")


def mahalanobis_distance(a: np.ndarray, b: np.ndarray, metric: Metric) -> float:
    """Mahalanobis distance between two covariate vectors."""
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ContractError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(pairwise_distances(a, b, metric)[0, 0])
