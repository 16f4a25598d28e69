"""
Bounded nonlinear bases g(x) for local misspecification and model selection.

Every component is bounded by 1 in absolute value. Ids ending in ``1`` use
the first covariate only (k = 1); the bare ids use every covariate (k = d),
so they need the covariate dimension.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..core.errors import ContractError


def _cos(x: np.ndarray) -> np.ndarray:
    return np.cos(np.pi * x)


def _tanh(x: np.ndarray) -> np.ndarray:
    return np.tanh(2.0 * x)


def _bump(x: np.ndarray) -> np.ndarray:
    return np.exp(-4.0 * x * x)


_COMPONENTS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "cos": _cos,
    "tanh": _tanh,
    "bump": _bump,
}


@dataclass(frozen=True)
class GBasis:
    """A named basis ``x -> (g_1(x), ..., g_k(x))`` acting on coordinates."""

    name: str
    coordinates: tuple[int, ...] = ()
    family: Optional[str] = None

    @property
    def k(self) -> int:
        return len(self.coordinates)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.k == 0:
            return np.empty((X.shape[0], 0))
        if X.shape[1] <= max(self.coordinates):
            raise ContractError(
                f"basis '{self.name}' needs {max(self.coordinates) + 1} covariates, "
                f"got {X.shape[1]}"
            )
        return _COMPONENTS[self.family](X[:, list(self.coordinates)])


NONE_BASIS = GBasis("none")


def available_bases() -> list[str]:
    return ["none"] + sorted(_COMPONENTS) + sorted(f"{f}1" for f in _COMPONENTS)


def bounded_g_library(basis_id: str, d: Optional[int] = None) -> GBasis:
    """Look up a bounded basis by id.

    Args:
        basis_id: ``none``, ``cos``/``tanh``/``bump`` (every coordinate) or
            ``cos1``/``tanh1``/``bump1`` (first coordinate only)
        d: covariate dimension, required for the every-coordinate ids

    Raises:
        ContractError: unknown id, or ``d`` missing where it is needed
    """
    if basis_id == "none":
        return NONE_BASIS
    if basis_id.endswith("1") and basis_id[:-1] in _COMPONENTS:
        return GBasis(basis_id, (0,), basis_id[:-1])
    if basis_id in _COMPONENTS:
        if d is None or d < 1:
            raise ContractError(f"basis '{basis_id}' needs the covariate dimension")
        return GBasis(basis_id, tuple(range(d)), basis_id)
    raise ContractError(
        f"unknown basis id '{basis_id}'; known ids: {', '.join(available_bases())}"
    )
