"""
Regression feature maps.

A :class:`FeatureSpec` selects a subset ``S`` of the components of a bounded
basis ``g`` and lays out design columns as

    psi_S(x, z) = (z - 0.5, 1, x, g_S(x))
    phi_S(x)    = (1, x, g_S(x))
"""

from dataclasses import dataclass, field

import numpy as np

from ..core.errors import ContractError
from ..dgp.bases import NONE_BASIS, GBasis


@dataclass(frozen=True)
class FeatureSpec:
    """Which components of ``g`` enter the regression."""

    include_g_components: tuple[int, ...] = ()
    g: GBasis = field(default=NONE_BASIS)

    def __post_init__(self):
        comps = tuple(sorted(set(int(c) for c in self.include_g_components)))
        if comps and (comps[0] < 0 or comps[-1] >= self.g.k):
            raise ContractError(
                f"components {list(comps)} not in basis '{self.g.name}' with k={self.g.k}"
            )
        object.__setattr__(self, "include_g_components", comps)

    @classmethod
    def baseline(cls, g: GBasis = NONE_BASIS) -> "FeatureSpec":
        """``Y ~ 1 + Z + X``."""
        return cls((), g)

    @classmethod
    def saturated(cls, g: GBasis) -> "FeatureSpec":
        """``Y ~ 1 + Z + X + g(X)``."""
        return cls(tuple(range(g.k)), g)

    @property
    def identifier(self) -> str:
        if not self.include_g_components:
            return "baseline"
        return f"{self.g.name}[{','.join(str(c) for c in self.include_g_components)}]"

    def covariate_design(self, X: np.ndarray) -> np.ndarray:
        """``phi_S(x)`` for every row of ``X``."""
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        blocks = [np.ones((X.shape[0], 1)), X]
        if self.include_g_components:
            blocks.append(self.g(X)[:, list(self.include_g_components)])
        return np.hstack(blocks)

    def design(self, X: np.ndarray, z: np.ndarray) -> np.ndarray:
        """``psi_S(x, z)`` for every row."""
        z = np.asarray(z, dtype=np.float64).reshape(-1, 1)
        return np.hstack([z - 0.5, self.covariate_design(X)])

    def column_names(self, d: int) -> list[str]:
        names = ["z", "intercept"] + [f"x{j + 1}" for j in range(d)]
        names += [f"g{c + 1}" for c in self.include_g_components]
        return names
