"""
Data-generating processes under Fisher's sharp null.

Every model draws covariates, a treatment from the model propensity and a
single outcome shared by both potential outcomes, so ``Y(0) == Y(1)``
exactly. An optional local misspecification adds ``h_n' g(X)`` with
``h_n = c / sqrt(n)`` to that shared outcome.
"""

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, ClassVar, Optional, Union

import numpy as np
from scipy.special import expit

from ..core.dataset import Dataset
from ..core.errors import ConfigError, ContractError
from .bases import GBasis, bounded_g_library

logger = logging.getLogger(__name__)

SUPPORT_TOLERANCE = 1e-12
DEFAULT_MISSPEC_NORM = 2.0


class _Model:
    """Shared behaviour of the model variants."""

    name: ClassVar[str]

    @property
    def d(self) -> int:
        raise NotImplementedError

    def validate(self) -> None:
        pass

    def covariates(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def propensity(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def mean_outcome(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def in_support(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def draw_design(self, n: int, rng: np.random.Generator):
        """Covariates, treatment and propensity for ``n`` units."""
        X = self.covariates(n, rng)
        e = self.propensity(X)
        z = (rng.random(n) < e).astype(np.int8)
        return X, z, e

    def params(self) -> dict[str, Any]:
        data = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in data.items()}


@dataclass(frozen=True)
class Example1(_Model):
    """``X ~ U(0,1)``, ``Z | X ~ Bern(theta0 + theta1 X)``, ``Y ~ N(beta0 + beta1 X, sigma²)``."""

    theta0: float = 0.2
    theta1: float = 0.5
    beta0: float = 0.0
    beta1: float = 1.0
    sigma: float = 1.0
    name: ClassVar[str] = "example1"

    @property
    def d(self) -> int:
        return 1

    def validate(self) -> None:
        if not (0.0 <= self.theta0 <= 1.0 and 0.0 <= self.theta0 + self.theta1 <= 1.0):
            raise ConfigError(
                f"example1 needs 0 <= theta0 and theta0 + theta1 <= 1 "
                f"(got theta0={self.theta0}, theta1={self.theta1})"
            )
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")

    def covariates(self, n, rng):
        return rng.random((n, 1))

    def propensity(self, X):
        return self.theta0 + self.theta1 * X[:, 0]

    def mean_outcome(self, X):
        return self.beta0 + self.beta1 * X[:, 0]

    def in_support(self, X):
        return np.all((X >= -SUPPORT_TOLERANCE) & (X <= 1 + SUPPORT_TOLERANCE), axis=1)


@dataclass(frozen=True)
class Example2(_Model):
    """``X`` uniform on the unit disc, ``Z | X ~ Bern(0.35 (1 + theta'X))``, ``Y ~ N(theta'X, sigma²)``."""

    theta: tuple[float, float] = (1.0, 0.0)
    sigma: float = 1.0
    name: ClassVar[str] = "example2"

    def __post_init__(self):
        object.__setattr__(self, "theta", tuple(float(t) for t in self.theta))

    @property
    def d(self) -> int:
        return 2

    def validate(self) -> None:
        if len(self.theta) != 2:
            raise ConfigError("example2 theta must have two components")
        if math.hypot(*self.theta) > 1.0 + SUPPORT_TOLERANCE:
            raise ConfigError(f"example2 needs |theta| <= 1, got {math.hypot(*self.theta)}")
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")

    def covariates(self, n, rng):
        radius = np.sqrt(rng.random(n))
        angle = 2.0 * np.pi * rng.random(n)
        return np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])

    def propensity(self, X):
        return 0.35 * (1.0 + X @ np.asarray(self.theta))

    def mean_outcome(self, X):
        return X @ np.asarray(self.theta)

    def in_support(self, X):
        return np.einsum("ij,ij->i", X, X) <= 1.0 + SUPPORT_TOLERANCE


@dataclass(frozen=True)
class Example4(_Model):
    """``X ~ U([-1,1]^dimension)``, logistic propensity in ``x1``, ``Y ~ N(outcome_coef x1, sigma²)``.

    ``e(x) = 1 / (1 + exp(intercept - slope x1))``, optionally capped at
    ``propensity_cap``.
    """

    dimension: int = 4
    intercept: float = 1.1
    slope: float = 1.0
    outcome_coef: float = 3.0
    sigma: float = 1.0
    propensity_cap: Optional[float] = None
    name: ClassVar[str] = "example4"

    @property
    def d(self) -> int:
        return self.dimension

    def validate(self) -> None:
        if self.dimension < 1:
            raise ConfigError("example4 dimension must be >= 1")
        if self.propensity_cap is not None and not 0.0 < self.propensity_cap <= 1.0:
            raise ConfigError("propensity_cap must lie in (0, 1]")
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")

    def covariates(self, n, rng):
        return rng.uniform(-1.0, 1.0, size=(n, self.dimension))

    def propensity(self, X):
        e = expit(self.slope * X[:, 0] - self.intercept)
        if self.propensity_cap is not None:
            e = np.minimum(e, self.propensity_cap)
        return e

    def mean_outcome(self, X):
        return self.outcome_coef * X[:, 0]

    def in_support(self, X):
        return np.all(np.abs(X) <= 1.0 + SUPPORT_TOLERANCE, axis=1)


@dataclass(frozen=True)
class ExactMatchNull(_Model):
    """Grid covariates in ``{0, ..., levels-1}^d`` with guaranteed exact matches.

    ``floor(treated_share * n)`` covariate cells are drawn twice, once for a
    treated and once for a control unit; the remaining units are controls
    with freshly drawn cells. Rows are shuffled.
    """

    d_: int = 2
    levels: int = 3
    treated_share: float = 0.3
    sigma: float = 1.0
    name: ClassVar[str] = "exact_match_null"

    @property
    def d(self) -> int:
        return self.d_

    def validate(self) -> None:
        if self.d_ < 1 or self.levels < 1:
            raise ConfigError("exact_match_null needs d >= 1 and levels >= 1")
        if not 0.0 <= self.treated_share <= 0.5:
            raise ConfigError("treated_share must lie in [0, 0.5]")
        if self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")

    def covariates(self, n, rng):
        return rng.integers(0, self.levels, size=(n, self.d_)).astype(np.float64)

    def draw_design(self, n, rng):
        n_pairs = int(math.floor(self.treated_share * n))
        cells = self.covariates(n_pairs, rng)
        rest = self.covariates(n - 2 * n_pairs, rng)
        X = np.vstack([cells, cells, rest])
        z = np.concatenate(
            [np.ones(n_pairs, np.int8), np.zeros(n - n_pairs, np.int8)]
        )
        order = rng.permutation(n)
        X, z = X[order], z[order]
        return X, z, self.propensity(X)

    def propensity(self, X):
        return np.full(X.shape[0], self.treated_share)

    def mean_outcome(self, X):
        return X.sum(axis=1)

    def in_support(self, X):
        on_grid = (X == np.round(X)) & (X >= 0) & (X <= self.levels - 1)
        return np.all(on_grid, axis=1)

    def params(self) -> dict[str, Any]:
        return {"d": self.d_, "levels": self.levels,
                "treated_share": self.treated_share, "sigma": self.sigma}


Model = Union[Example1, Example2, Example4, ExactMatchNull]

MODELS: dict[str, type] = {
    cls.name: cls for cls in (Example1, Example2, Example4, ExactMatchNull)
}


@dataclass(frozen=True)
class LocalMisspec:
    """``h_n' g(x)`` with ``h_n = c / sqrt(n)``."""

    g: str
    c: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))

    def basis(self, d: int) -> GBasis:
        return bounded_g_library(self.g, d)

    def coefficients(self, d: int) -> np.ndarray:
        k = self.basis(d).k
        if not self.c:
            return np.full(k, DEFAULT_MISSPEC_NORM / math.sqrt(k)) if k else np.empty(0)
        if len(self.c) != k:
            raise ConfigError(f"misspecification '{self.g}' has k={k}, got {len(self.c)} coefficients")
        return np.asarray(self.c)

    def shift(self, X: np.ndarray, n: int) -> np.ndarray:
        basis = self.basis(X.shape[1])
        if basis.k == 0:
            return np.zeros(X.shape[0])
        return basis(X) @ (self.coefficients(X.shape[1]) / math.sqrt(n))

    def to_dict(self) -> dict[str, Any]:
        return {"g": self.g, "c": list(self.c)}


@dataclass(frozen=True)
class DgpSpec:
    """A model variant plus optional local misspecification."""

    variant: Model
    local_misspec: Optional[LocalMisspec] = None

    @property
    def d(self) -> int:
        return self.variant.d

    def validate(self) -> None:
        self.variant.validate()
        if self.local_misspec is not None:
            try:
                self.local_misspec.coefficients(self.d)
            except ContractError as e:
                raise ConfigError(str(e)) from e

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DgpSpec":
        name = data.get("variant")
        if name not in MODELS:
            raise ConfigError(f"unknown dgp variant '{name}'; known: {', '.join(sorted(MODELS))}")
        model_cls = MODELS[name]
        params = dict(data.get("params") or {})
        if model_cls is ExactMatchNull and "d" in params:
            params["d_"] = params.pop("d")
        known = {f.name for f in fields(model_cls)}
        unknown = sorted(set(params) - known)
        if unknown:
            raise ConfigError(f"unknown parameters for '{name}': {', '.join(unknown)}")
        if "theta" in params:
            params["theta"] = tuple(params["theta"])
        variant = model_cls(**params)

        misspec = None
        raw = data.get("local_misspec")
        if raw:
            c = raw.get("c")
            if c is None and "norm" in raw:
                k = bounded_g_library(raw["g"], variant.d).k
                c = [raw["norm"] / math.sqrt(k)] * k if k else []
            misspec = LocalMisspec(raw["g"], tuple(c or ()))
        spec = cls(variant, misspec)
        spec.validate()
        return spec

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {"variant": self.variant.name, "params": self.variant.params()}
        if self.local_misspec is not None:
            data["local_misspec"] = self.local_misspec.to_dict()
        return data


@dataclass(frozen=True, eq=False)
class Truth:
    """Hidden per-unit quantities; only the simulation harness reads these."""

    propensity: np.ndarray
    mu: np.ndarray
    y0: np.ndarray
    y1: np.ndarray


@dataclass(frozen=True, eq=False)
class Sample:
    dataset: Dataset
    truth: Truth


def sample(spec: DgpSpec, n: int, rng: np.random.Generator) -> Sample:
    """Draw ``n`` i.i.d. units under the sharp null."""
    if n < 1:
        raise ContractError(f"sample size must be >= 1, got {n}")
    spec.validate()
    model = spec.variant

    X, z, e = model.draw_design(n, rng)
    mu = model.mean_outcome(X)
    if spec.local_misspec is not None:
        mu = mu + spec.local_misspec.shift(X, n)
    y = mu + model.sigma * rng.standard_normal(n)

    truth = Truth(propensity=e, mu=mu, y0=y, y1=y.copy())
    return Sample(dataset=Dataset(X=X, y=y, z=z), truth=truth)


def propensity(spec: DgpSpec, x: np.ndarray) -> float:
    """Model propensity ``P(Z = 1 | X = x)`` at one covariate vector.

    Raises:
        ContractError: ``x`` has the wrong length or lies outside the support
    """
    X = np.asarray(x, dtype=np.float64).reshape(1, -1)
    if X.shape[1] != spec.d:
        raise ContractError(f"expected {spec.d} covariates, got {X.shape[1]}")
    if not spec.variant.in_support(X)[0]:
        raise ContractError(f"x={X[0].tolist()} is outside the support of {spec.variant.name}")
    return float(np.clip(spec.variant.propensity(X)[0], 0.0, 1.0))


def theoretical_delta(theta0: float, theta1: float) -> float:
    """Limit of the Example 1 covariate imbalance after optimal pair matching.

    ``{2(theta0 + theta1) - 1}^3 / (3 theta1^2 (2 theta0 + theta1))``
    """
    denom = 3.0 * theta1**2 * (2.0 * theta0 + theta1)
    if theta1 == 0.0 or 2.0 * theta0 + theta1 == 0.0:
        raise ContractError("theoretical_delta needs theta1 != 0 and 2 theta0 + theta1 != 0")
    return (2.0 * (theta0 + theta1) - 1.0) ** 3 / denom


def example2_mu_density(h: np.ndarray) -> np.ndarray:
    """Density of ``theta'X`` given ``Z = 1`` in Example 2 with ``|theta| = 1``."""
    h = np.asarray(h, dtype=np.float64)
    inside = np.abs(h) <= 1.0
    root = np.sqrt(np.clip(1.0 - h * h, 0.0, None))
    return np.where(inside, (2.0 / np.pi) * root * (1.0 + h), 0.0)


def example2_mu_cdf(h: np.ndarray) -> np.ndarray:
    """CDF matching :func:`example2_mu_density`."""
    h = np.clip(np.asarray(h, dtype=np.float64), -1.0, 1.0)
    root = np.sqrt(1.0 - h * h)
    value = (2.0 / np.pi) * (0.5 * (h * root + np.arcsin(h)) + np.pi / 4.0 - root**3 / 3.0)
    return np.clip(value, 0.0, 1.0)
