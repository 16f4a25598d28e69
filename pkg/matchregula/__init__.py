"""
Matchregula - covariate matching with randomization and HC inference.

Features:
- Optimal pair matching and nearest-control matching with replacement
  on the Mahalanobis metric
- Paired Fisher randomization tests (exhaustive or counter-seeded sampling)
- Weighted least squares with HC0 sandwich variances and model selection
- Null data-generating processes with local misspecification
- Seeded, parallel Monte Carlo harness with packaged reproduction presets
"""

from contextlib import suppress

__version__ = "0.1.0"
__author__ = "Matchregula Team"

with suppress(ImportError):
    from .core import Dataset, ExperimentConfig, load_dataset, load_experiment_config

with suppress(ImportError):
    from .linalg import build_metric, sample_covariance

with suppress(ImportError):
    from .matching import match_with_replacement, optimal_pair_match

with suppress(ImportError):
    from .randomization import paired_randomization_test, randomization_pvalue

with suppress(ImportError):
    from .simulation import run_experiment, run_trial

__all__ = [
    "Dataset",
    "ExperimentConfig",
    "build_metric",
    "load_dataset",
    "load_experiment_config",
    "match_with_replacement",
    "optimal_pair_match",
    "paired_randomization_test",
    "randomization_pvalue",
    "run_experiment",
    "run_trial",
    "sample_covariance",
    "__version__",
]
