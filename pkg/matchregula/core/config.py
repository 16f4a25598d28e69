"""
Experiment configuration.

An :class:`ExperimentConfig` is loaded from JSON (or YAML), validated against
:data:`EXPERIMENT_SCHEMA` with unknown keys rejected, and then checked
semantically (DGP parameters, pipeline id). Configs are frozen and embed
themselves in every report so experiments can be replayed.
"""

import hashlib
import json
import logging
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Optional, Union

import jsonschema
import yaml

from .errors import ConfigError, ContractError

logger = logging.getLogger(__name__)

THREADS_ENV = "MATCHREGULA_THREADS"
CHUNK_SIZE_ENV = "MATCHREGULA_CHUNK_SIZE"

DEFAULT_PERMUTATIONS = 1000
DEFAULT_ALPHA = 0.05
DEFAULT_REPLICATIONS = 500
DEFAULT_SELECTION_LEVEL = 0.05
DEFAULT_BALANCE_LEVEL = 0.10
DEFAULT_CHUNK_SIZE = 4096
MAX_EXHAUSTIVE_PAIRS = 20

_LEVEL = {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}

EXPERIMENT_SCHEMA: dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "additionalProperties": False,
    "required": ["dgp", "sample_sizes"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "dgp": {
            "type": "object",
            "additionalProperties": False,
            "required": ["variant"],
            "properties": {
                "variant": {"type": "string"},
                "params": {"type": "object"},
                "local_misspec": {
                    "type": ["object", "null"],
                    "additionalProperties": False,
                    "required": ["g"],
                    "properties": {
                        "g": {"type": "string"},
                        "c": {"type": "array", "items": {"type": "number"}},
                        "norm": {"type": "number", "minimum": 0},
                    },
                },
            },
        },
        "sample_sizes": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "integer", "minimum": 1},
        },
        "replications": {"type": "integer", "minimum": 1},
        "permutations": {"type": "integer", "minimum": 1},
        "alpha": _LEVEL,
        "seed": {"type": "integer", "minimum": 0},
        "pipeline": {"type": "string"},
        "randomization_mode": {"enum": ["sampled", "exhaustive"]},
        "selection_level": _LEVEL,
        "balance_level": _LEVEL,
        "model_basis": {"type": ["string", "null"]},
        "unmatched_contrast": {"type": "boolean"},
        "outputs": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "report": {"type": ["string", "null"]},
                "plot_csv": {"type": ["string", "null"]},
                "trials": {"type": ["string", "null"]},
            },
        },
    },
}


class JSONSchemaValidator:
    """JSON Schema-based configuration validator."""

    def __init__(self, schema: dict[str, Any]):
        self.schema = schema
        self.errors: list[str] = []

    def validate(self, config_data: Any) -> bool:
        self.errors.clear()
        validator = jsonschema.Draft7Validator(self.schema)
        for error in sorted(validator.iter_errors(config_data), key=str):
            where = "/".join(str(p) for p in error.absolute_path) or "<root>"
            self.errors.append(f"{where}: {error.message}")
        return not self.errors

    def get_errors(self) -> list[str]:
        return self.errors.copy()


@dataclass(frozen=True)
class OutputPaths:
    """Where an experiment writes its artifacts (``None`` = not written)."""

    report: Optional[str] = None
    plot_csv: Optional[str] = None
    trials: Optional[str] = None

    def resolved(self, base: Optional[Path]) -> "OutputPaths":
        """Paths re-rooted under ``base`` when they are relative."""
        if base is None:
            return self

        def _join(p: Optional[str]) -> Optional[str]:
            if p is None or Path(p).is_absolute():
                return p
            return str(base / p)

        return OutputPaths(_join(self.report), _join(self.plot_csv), _join(self.trials))


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved Monte Carlo experiment."""

    dgp: dict[str, Any]
    sample_sizes: tuple[int, ...]
    name: str = "experiment"
    replications: int = DEFAULT_REPLICATIONS
    permutations: int = DEFAULT_PERMUTATIONS
    alpha: float = DEFAULT_ALPHA
    seed: int = 0
    pipeline: str = "pairs-dm"
    randomization_mode: str = "sampled"
    selection_level: float = DEFAULT_SELECTION_LEVEL
    balance_level: float = DEFAULT_BALANCE_LEVEL
    model_basis: Optional[str] = None
    unmatched_contrast: bool = False
    outputs: OutputPaths = field(default_factory=OutputPaths)

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        if self.replications < 1:
            raise ConfigError(f"replications must be >= 1, got {self.replications}")
        if self.permutations < 1:
            raise ConfigError(f"permutations must be >= 1, got {self.permutations}")
        if not 0 < self.alpha < 1:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not self.sample_sizes or min(self.sample_sizes) < 1:
            raise ConfigError("sample sizes must be a non-empty list of positive integers")

    @classmethod
    def from_dict(cls, data: Any) -> "ExperimentConfig":
        """Validate a raw document and build the config."""
        validator = JSONSchemaValidator(EXPERIMENT_SCHEMA)
        if not validator.validate(data):
            raise ConfigError("invalid experiment config: " + "; ".join(validator.get_errors()))

        kwargs = {k: v for k, v in data.items() if k != "outputs"}
        kwargs["sample_sizes"] = tuple(data["sample_sizes"])
        config = cls(**kwargs, outputs=OutputPaths(**data.get("outputs", {})))
        config.check()
        return config

    def check(self) -> None:
        """Semantic validation beyond the schema."""
        from ..dgp import DgpSpec, bounded_g_library
        from ..simulation.pipelines import get_pipeline

        try:
            spec = DgpSpec.from_dict(self.dgp)
            pipeline = get_pipeline(self.pipeline)
            if self.model_basis is not None:
                bounded_g_library(self.model_basis, spec.d)
        except ContractError as e:
            raise ConfigError(str(e)) from e
        except TypeError as e:
            raise ConfigError(f"invalid dgp parameters: {e}") from e
        if self.randomization_mode == "exhaustive" and not pipeline.randomization:
            logger.warning(
                f"randomization_mode 'exhaustive' has no effect for pipeline '{self.pipeline}'"
            )
        elif self.randomization_mode == "exhaustive" and max(self.sample_sizes) > 2 * MAX_EXHAUSTIVE_PAIRS:
            # pair matching needs N1 <= N0, so n <= 40 keeps N1 within the enumeration limit
            raise ConfigError(
                f"exhaustive randomization enumerates at most {MAX_EXHAUSTIVE_PAIRS} pairs; "
                f"sample sizes above {2 * MAX_EXHAUSTIVE_PAIRS} need randomization_mode 'sampled'"
            )

    def dgp_spec(self):
        from ..dgp import DgpSpec

        return DgpSpec.from_dict(self.dgp)

    def with_overrides(self, **changes: Any) -> "ExperimentConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["sample_sizes"] = list(self.sample_sizes)
        return data

    def fingerprint(self) -> str:
        """Content address of the canonical JSON form."""
        serialized = json.dumps(self.to_dict(), sort_keys=True, default=str)
        return hashlib.blake2b(serialized.encode("utf-8")).hexdigest()


def _parse_text(text: str, suffix: str) -> Any:
    if suffix in (".yaml", ".yml"):
        try:
            return yaml.safe_load(text)
        except yaml.MarkedYAMLError as e:
            mark = e.problem_mark
            line = mark.line + 1 if mark is not None else None
            column = mark.column + 1 if mark is not None else None
            raise ConfigError(f"malformed YAML: {e.problem}", line=line, column=column) from e
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"malformed JSON: {e.msg}", line=e.lineno, column=e.colno) from e


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """Load and validate an experiment config file (JSON, or YAML by suffix)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e

    data = _parse_text(text, path.suffix.lower())
    config = ExperimentConfig.from_dict(data)
    logger.info(f"Loaded experiment config '{config.name}' from {path}")
    return config


def _positive_int_env(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError as e:
        raise ConfigError(f"{name} must be a positive integer, got {raw!r}") from e
    if value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {raw!r}")
    return value


def resolve_threads(requested: Optional[int] = None) -> int:
    """Worker count: explicit request, then ``MATCHREGULA_THREADS``, then CPU count."""
    if requested is not None:
        if requested < 1:
            raise ConfigError(f"thread count must be >= 1, got {requested}")
        return requested
    return _positive_int_env(THREADS_ENV, os.cpu_count() or 1)


def resolve_chunk_size() -> int:
    """Randomization draws evaluated per vectorised block."""
    return _positive_int_env(CHUNK_SIZE_ENV, DEFAULT_CHUNK_SIZE)
