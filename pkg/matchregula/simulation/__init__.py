"""
Monte Carlo harness: seeded replications, aggregation and reproduction presets.
"""

from .experiment import (
    PLOT_COLUMNS,
    ModelDependence,
    ProgressCallback,
    SampleSizeSummary,
    SimulationReport,
    aggregate_trials,
    bias_slope,
    model_dependence_experiment,
    run_experiment,
    run_trials,
    trial_seed,
    write_plot_csv,
    write_report,
    write_trials_jsonl,
)
from .pipelines import Pipeline, available_pipelines, get_pipeline, register_pipeline
from .presets import available_presets, load_presets, preset_configs
from .trial import HC_STRATEGIES, TrialRecord, TrialSettings, run_trial

__all__ = [
    "HC_STRATEGIES",
    "PLOT_COLUMNS",
    "ModelDependence",
    "Pipeline",
    "ProgressCallback",
    "SampleSizeSummary",
    "SimulationReport",
    "TrialRecord",
    "TrialSettings",
    "aggregate_trials",
    "available_pipelines",
    "available_presets",
    "bias_slope",
    "get_pipeline",
    "load_presets",
    "model_dependence_experiment",
    "preset_configs",
    "register_pipeline",
    "run_experiment",
    "run_trial",
    "run_trials",
    "trial_seed",
    "write_plot_csv",
    "write_report",
    "write_trials_jsonl",
]
