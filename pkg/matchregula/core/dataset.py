"""
Observational dataset types and CSV I/O.

A :class:`Dataset` is an immutable table of ``n`` units, each an observed
triple of covariates ``x`` (length ``d``), outcome ``y`` and binary treatment
``z``. Unit index equals row index everywhere in the package, so matchings
and fits always refer back to the original row order.

CSV layout::

    x1,...,xd,y,z
"""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
import pandas as pd

from .errors import ContractError, DatasetParseError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class Unit:
    """One observed unit."""

    x: tuple[float, ...]
    y: float
    z: int

    def __post_init__(self):
        if self.z not in (0, 1):
            raise ContractError(f"treatment must be 0 or 1, got {self.z!r}")
        if not (np.all(np.isfinite(self.x)) and np.isfinite(self.y)):
            raise ContractError("covariates and outcome must be finite")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Immutable collection of units stored column-wise.

    Args:
        X: ``(n, d)`` covariate matrix
        y: ``(n,)`` outcomes
        z: ``(n,)`` treatment indicators in {0, 1}
    """

    X: np.ndarray
    y: np.ndarray
    z: np.ndarray
    _treated: np.ndarray = field(init=False, repr=False)
    _control: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        X = np.array(self.X, dtype=np.float64, copy=True)
        y = np.array(self.y, dtype=np.float64, copy=True).reshape(-1)
        z_raw = np.asarray(self.z)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise ContractError(f"covariates must be a 2-D array, got ndim={X.ndim}")
        n = X.shape[0]
        if n < 1:
            raise ContractError("dataset must contain at least one unit")
        if y.shape[0] != n or z_raw.reshape(-1).shape[0] != n:
            raise ContractError(
                f"length mismatch: X has {n} rows, y has {y.shape[0]}, "
                f"z has {z_raw.size}"
            )
        if not np.all(np.isin(z_raw, (0, 1))):
            raise ContractError("treatment indicators must be 0 or 1")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ContractError("covariates and outcomes must be finite")
        z = z_raw.reshape(-1).astype(np.int8)

        for arr in (X, y, z):
            arr.setflags(write=False)
        treated = np.flatnonzero(z == 1)
        control = np.flatnonzero(z == 0)
        treated.setflags(write=False)
        control.setflags(write=False)

        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "_treated", treated)
        object.__setattr__(self, "_control", control)

    @classmethod
    def from_units(cls, units: Sequence[Unit]) -> "Dataset":
        if not units:
            raise ContractError("dataset must contain at least one unit")
        d = len(units[0].x)
        if any(len(u.x) != d for u in units):
            raise ContractError("all units must share the covariate dimension")
        X = np.array([u.x for u in units], dtype=np.float64).reshape(len(units), d)
        return cls(X=X, y=[u.y for u in units], z=[u.z for u in units])

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def d(self) -> int:
        return int(self.X.shape[1])

    @property
    def n_treated(self) -> int:
        return int(self._treated.size)

    @property
    def n_control(self) -> int:
        return int(self._control.size)

    @property
    def treated_indices(self) -> np.ndarray:
        return self._treated

    @property
    def control_indices(self) -> np.ndarray:
        return self._control

    @property
    def units(self) -> tuple[Unit, ...]:
        return tuple(
            Unit(x=tuple(float(v) for v in self.X[i]), y=float(self.y[i]), z=int(self.z[i]))
            for i in range(self.n)
        )

    def subset(self, index_set: Sequence[int]) -> "Dataset":
        """Dataset restricted to ``index_set`` (in the given order)."""
        idx = np.asarray(index_set, dtype=np.intp)
        return Dataset(X=self.X[idx], y=self.y[idx], z=self.z[idx])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.X.shape == other.X.shape
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.z, other.z)
        )

    __hash__ = None  # type: ignore[assignment]

    def __len__(self) -> int:
        return self.n


def _covariate_columns(header: list[str]) -> int:
    """Validate the header and return the covariate dimension."""
    if len(header) < 2 or header[-2:] != ["y", "z"]:
        raise DatasetParseError(
            "header must end with columns 'y,z'", row=0, column=",".join(header[-2:])
        )
    expected = [f"x{j}" for j in range(1, len(header) - 1)]
    for got, want in zip(header[:-2], expected):
        if got != want:
            raise DatasetParseError(
                f"unexpected covariate column name, expected '{want}'", row=0, column=got
            )
    return len(expected)


def _parse_column(frame: pd.DataFrame, name: str) -> np.ndarray:
    raw = frame[name]
    numeric = pd.to_numeric(raw, errors="coerce")
    bad = numeric.isna().to_numpy() | ~np.isfinite(numeric.to_numpy(dtype=np.float64))
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + 1
        raise DatasetParseError(
            f"value {raw.iloc[row - 1]!r} is not a finite number", row=row, column=name
        )
    # float() on the text is the exact round-trip parse
    return np.array([float(v) for v in raw], dtype=np.float64)


def load_dataset(path: PathLike) -> Dataset:
    """Load a dataset CSV with header ``x1..xd,y,z``.

    Rows are numbered from 1 (the header is row 0) in error messages.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetParseError(f"dataset file not found: {path}")

    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError as e:
        raise DatasetParseError(f"empty dataset file: {path}") from e
    except pd.errors.ParserError as e:
        raise DatasetParseError(f"malformed CSV: {e}") from e

    header = [str(c).strip() for c in frame.columns]
    frame.columns = header
    d = _covariate_columns(header)
    if len(frame) == 0:
        raise DatasetParseError("dataset has no data rows", row=1)

    X = np.empty((len(frame), d), dtype=np.float64)
    for j in range(d):
        X[:, j] = _parse_column(frame, f"x{j + 1}")
    y = _parse_column(frame, "y")

    z_text = frame["z"].str.strip()
    bad = ~z_text.isin(["0", "1"]).to_numpy()
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + 1
        raise DatasetParseError(
            f"treatment must be 0 or 1, got {z_text.iloc[row - 1]!r}", row=row, column="z"
        )
    z = z_text.astype(np.int8).to_numpy()

    dataset = Dataset(X=X, y=y, z=z)
    logger.debug(
        f"Loaded {path}: n={dataset.n}, d={dataset.d}, "
        f"N1={dataset.n_treated}, N0={dataset.n_control}"
    )
    return dataset


def _format_float(value: float) -> str:
    return repr(float(value))


def save_dataset(dataset: Dataset, path: PathLike) -> None:
    """Write ``dataset`` as CSV using shortest round-trip float formatting."""
    if dataset.d < 1:
        raise ContractError("cannot save a dataset without covariates (d = 0)")
    path = Path(path)

    columns: dict[str, list[str]] = {}
    for j in range(dataset.d):
        columns[f"x{j + 1}"] = [_format_float(v) for v in dataset.X[:, j]]
    columns["y"] = [_format_float(v) for v in dataset.y]
    columns["z"] = [str(int(v)) for v in dataset.z]

    pd.DataFrame(columns).to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    logger.debug(f"Saved dataset with {dataset.n} rows to {path}")
