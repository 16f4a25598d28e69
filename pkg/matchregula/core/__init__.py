"""
Core domain types, configuration, errors and random streams.
"""

from .config import (
    ExperimentConfig,
    JSONSchemaValidator,
    OutputPaths,
    load_experiment_config,
    resolve_chunk_size,
    resolve_threads,
)
from .dataset import Dataset, Unit, load_dataset, save_dataset
from .errors import (
    ConfigError,
    ContractError,
    DatasetParseError,
    DegenerateDesign,
    DegenerateInputError,
    ErrorCategory,
    ErrorSeverity,
    MatchregulaError,
    SingularDesign,
    exit_code_for,
)
from .rng import Stream, derive_seed, draw_stream, stream, stream_key

__all__ = [
    "ConfigError",
    "ContractError",
    "Dataset",
    "DatasetParseError",
    "DegenerateDesign",
    "DegenerateInputError",
    "ErrorCategory",
    "ErrorSeverity",
    "ExperimentConfig",
    "JSONSchemaValidator",
    "MatchregulaError",
    "OutputPaths",
    "SingularDesign",
    "Stream",
    "Unit",
    "derive_seed",
    "draw_stream",
    "exit_code_for",
    "load_dataset",
    "load_experiment_config",
    "resolve_chunk_size",
    "resolve_threads",
    "save_dataset",
    "stream",
    "stream_key",
]
