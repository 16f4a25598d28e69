"""
Monte Carlo experiments: replicated trials, aggregation and artifacts.

Trial ``t`` at sample size ``n`` runs under ``derive_seed(master, n, t)``,
so records depend only on the config and never on worker count or
completion order. Records are re-ordered by ``(n, t)`` before aggregation
and before anything is written.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.stats import linregress

from ..core.config import ExperimentConfig, OutputPaths, resolve_threads
from ..core.errors import ConfigError, ContractError
from ..core.rng import derive_seed
from ..dgp import DgpSpec
from .pipelines import get_pipeline
from .trial import TrialRecord, TrialSettings, run_trial

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int], None]

PLOT_COLUMNS = (
    "n",
    "mean_abs_bias",
    "reject_rate_dm",
    "reject_rate_reg",
    "reject_rate_hc1",
    "reject_rate_hc2",
    "reject_rate_hc3",
    "agreement_rate",
    "balance_detect_rate",
)


def trial_seed(master_seed: int, n: int, trial: int) -> int:
    return derive_seed(master_seed, n, trial)


@dataclass(frozen=True)
class SampleSizeSummary:
    """Aggregates over the R trials at one sample size.

    Rates are ``None`` when the pipeline does not produce the quantity.
    ``mean_abs_bias`` is the absolute value of the mean DM bias.
    """

    n: int
    replications: int
    mean_bias: Optional[float] = None
    mean_abs_bias: Optional[float] = None
    mean_abs_error: Optional[float] = None
    reject_rate_dm: Optional[float] = None
    reject_rate_reg: Optional[float] = None
    reject_rate_hc1: Optional[float] = None
    reject_rate_hc2: Optional[float] = None
    reject_rate_hc3: Optional[float] = None
    agreement_rate: Optional[float] = None
    balance_detect_rate: Optional[float] = None
    mean_total_cost: Optional[float] = None
    mean_imbalance_norm: Optional[float] = None
    degenerate_trials: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    def plot_row(self) -> dict[str, Any]:
        return {column: getattr(self, column) for column in PLOT_COLUMNS}


@dataclass(frozen=True)
class SimulationReport:
    """Resolved config, per-n aggregates and the fitted bias slope."""

    config: ExperimentConfig
    summaries: tuple[SampleSizeSummary, ...]
    bias_slope: Optional[float]
    seeds: dict[int, list[int]]
    threads: int
    contrast: Optional["SimulationReport"] = None
    artifacts: tuple[str, ...] = field(default=())

    def summary_for(self, n: int) -> SampleSizeSummary:
        for summary in self.summaries:
            if summary.n == n:
                return summary
        raise KeyError(n)

    def to_dict(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "config": self.config.to_dict(),
            "fingerprint": self.config.fingerprint(),
            "threads": self.threads,
            "seed_rule": "derive_seed(seed, n, trial)",
            "seeds": {str(n): seeds for n, seeds in self.seeds.items()},
            "summaries": [s.to_dict() for s in self.summaries],
            "bias_slope": self.bias_slope,
        }
        if self.contrast is not None:
            data["unmatched_contrast"] = self.contrast.to_dict()
        return data


def _mean(values: list[float]) -> Optional[float]:
    return float(np.mean(values)) if values else None


def _rate(flags: Iterable[Optional[bool]]) -> Optional[float]:
    present = [bool(f) for f in flags if f is not None]
    return float(np.mean(present)) if present else None


def _reject(p: Optional[float], alpha: float) -> Optional[bool]:
    return None if p is None else p < alpha


def aggregate_trials(records: Sequence[TrialRecord], alpha: float) -> list[SampleSizeSummary]:
    """Per-sample-size aggregates, in increasing ``n``."""
    by_n: dict[int, list[TrialRecord]] = {}
    for record in records:
        by_n.setdefault(record.n, []).append(record)

    summaries = []
    for n in sorted(by_n):
        group = sorted(by_n[n], key=lambda r: r.trial)
        biases = [r.bias_dm for r in group if r.bias_dm is not None]
        mean_bias = _mean(biases)

        def hc_rate(k: int) -> Optional[float]:
            return _rate(_reject(r.p_hc[k], alpha) if r.p_hc else None for r in group)

        summaries.append(
            SampleSizeSummary(
                n=n,
                replications=len(group),
                mean_bias=mean_bias,
                mean_abs_bias=None if mean_bias is None else abs(mean_bias),
                mean_abs_error=_mean([abs(b) for b in biases]),
                reject_rate_dm=_rate(_reject(r.p_rand_dm, alpha) for r in group),
                reject_rate_reg=_rate(_reject(r.p_rand_reg, alpha) for r in group),
                reject_rate_hc1=hc_rate(0),
                reject_rate_hc2=hc_rate(1),
                reject_rate_hc3=hc_rate(2),
                agreement_rate=_rate(r.agree for r in group),
                balance_detect_rate=_rate(r.balance_test_reject for r in group),
                mean_total_cost=_mean([r.total_cost for r in group if r.total_cost is not None]),
                mean_imbalance_norm=_mean(
                    [r.imbalance_norm for r in group if r.imbalance_norm is not None]
                ),
                degenerate_trials=sum(r.degenerate for r in group),
            )
        )
    return summaries


def bias_slope(report: Union[SimulationReport, Sequence[SampleSizeSummary]]) -> float:
    """OLS slope of ``log(mean |bias|)`` on ``log(n)``.

    Raises:
        ContractError: fewer than two sample sizes with positive mean |bias|
    """
    summaries = report.summaries if isinstance(report, SimulationReport) else report
    points = [
        (s.n, s.mean_abs_bias)
        for s in summaries
        if s.mean_abs_bias is not None and s.mean_abs_bias > 0
    ]
    if len({n for n, _ in points}) < 2:
        raise ContractError("bias slope needs at least two sample sizes with nonzero bias")
    log_n = np.log([float(n) for n, _ in points])
    log_bias = np.log([b for _, b in points])
    return float(linregress(log_n, log_bias).slope)


def _run_one(spec: DgpSpec, pipeline: str, settings: TrialSettings,
             n: int, trial: int, seed: int) -> TrialRecord:
    return run_trial(spec, pipeline, n, seed, settings, trial)


def run_trials(
    config: ExperimentConfig,
    threads: int = 1,
    progress: Optional[ProgressCallback] = None,
) -> list[TrialRecord]:
    """Every (n, trial) replication of ``config``, ordered by ``(n, trial)``."""
    spec = config.dgp_spec()
    settings = TrialSettings.from_config(config)
    tasks = [
        (n, t, trial_seed(config.seed, n, t))
        for n in config.sample_sizes
        for t in range(config.replications)
    ]
    total = len(tasks)
    records: dict[tuple[int, int], TrialRecord] = {}

    if threads <= 1:
        for done, (n, t, seed) in enumerate(tasks, start=1):
            records[(n, t)] = _run_one(spec, config.pipeline, settings, n, t, seed)
            if progress:
                progress(done, total)
    else:
        with ProcessPoolExecutor(max_workers=threads) as executor:
            futures = {
                executor.submit(_run_one, spec, config.pipeline, settings, n, t, seed): (n, t)
                for n, t, seed in tasks
            }
            for done, future in enumerate(as_completed(futures), start=1):
                records[futures[future]] = future.result()
                if progress:
                    progress(done, total)

    return [records[(n, t)] for n, t, _ in tasks]


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if np.isnan(value):
            return ""
        return repr(value)
    return str(value)


def write_plot_csv(summaries: Sequence[SampleSizeSummary], path: Union[str, Path]) -> None:
    frame = pd.DataFrame([s.plot_row() for s in summaries], columns=list(PLOT_COLUMNS))
    frame = frame.astype(object).map(_csv_cell)
    frame.to_csv(Path(path), index=False, lineterminator="\n")
    logger.info(f"Wrote plot data for {len(frame)} sample sizes to {path}")


def write_trials_jsonl(records: Sequence[TrialRecord], path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for record in records:
            f.write(json.dumps(record.to_dict(), sort_keys=True) + "\n")
    logger.info(f"Wrote {len(records)} trial records to {path}")


def write_report(report: SimulationReport, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(report.to_dict(), f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Wrote simulation report to {path}")


def _write_artifacts(report: SimulationReport, records: Sequence[TrialRecord],
                     outputs: OutputPaths) -> tuple[str, ...]:
    written = []
    for target in (outputs.report, outputs.plot_csv, outputs.trials):
        if target is not None:
            Path(target).parent.mkdir(parents=True, exist_ok=True)
    if outputs.plot_csv is not None:
        write_plot_csv(report.summaries, outputs.plot_csv)
        written.append(outputs.plot_csv)
    if outputs.trials is not None:
        write_trials_jsonl(records, outputs.trials)
        written.append(outputs.trials)
    if outputs.report is not None:
        write_report(report, outputs.report)
        written.append(outputs.report)
    return tuple(written)


def _contrast_config(config: ExperimentConfig) -> ExperimentConfig:
    return config.with_overrides(
        name=f"{config.name}-unmatched",
        pipeline="unmatched-hc",
        unmatched_contrast=False,
        outputs=OutputPaths(),
    )


def run_experiment(
    config: ExperimentConfig,
    threads: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
    write: bool = True,
) -> SimulationReport:
    """Run R trials per sample size and aggregate them.

    With ``unmatched_contrast`` the same draws are also analysed by the
    ``unmatched-hc`` pipeline and attached as ``report.contrast``. Artifacts
    named in ``config.outputs`` are written when ``write`` is set.
    """
    workers = resolve_threads(threads)
    total_trials = config.replications * len(config.sample_sizes)
    logger.info(
        f"Running experiment '{config.name}': pipeline={config.pipeline}, "
        f"n={list(config.sample_sizes)}, R={config.replications}, threads={workers}"
    )

    records = run_trials(config, workers, progress)
    summaries = tuple(aggregate_trials(records, config.alpha))

    seeds = {
        n: [trial_seed(config.seed, n, t) for t in range(config.replications)]
        for n in config.sample_sizes
    }
    slope: Optional[float] = None
    if len(config.sample_sizes) > 1:
        try:
            slope = bias_slope(summaries)
        except ContractError as e:
            logger.warning(f"Bias slope skipped: {e}")

    contrast = None
    if config.unmatched_contrast:
        if not get_pipeline(config.pipeline).hc:
            raise ConfigError(
                f"unmatched_contrast needs an HC pipeline, got '{config.pipeline}'"
            )
        contrast = run_experiment(_contrast_config(config), workers, progress, write=False)

    report = SimulationReport(
        config=config,
        summaries=summaries,
        bias_slope=slope,
        seeds=seeds,
        threads=workers,
        contrast=contrast,
    )
    if write:
        report = replace(report, artifacts=_write_artifacts(report, records, config.outputs))
    logger.info(f"Experiment '{config.name}' finished: {total_trials} trials")
    return report


@dataclass(frozen=True)
class ModelDependence:
    """Agreement of the three HC strategies at one sample size."""

    n: int
    agreement_rate: Optional[float]
    reject_rates: tuple[Optional[float], Optional[float], Optional[float]]
    unmatched_agreement_rate: Optional[float] = None
    unmatched_reject_rates: Optional[tuple[Optional[float], ...]] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "agreement_rate": self.agreement_rate,
            "reject_rates": list(self.reject_rates),
            "unmatched_agreement_rate": self.unmatched_agreement_rate,
            "unmatched_reject_rates": (
                None if self.unmatched_reject_rates is None
                else list(self.unmatched_reject_rates)
            ),
        }


def model_dependence_experiment(
    config: ExperimentConfig,
    threads: Optional[int] = None,
    progress: Optional[ProgressCallback] = None,
    write: bool = True,
) -> list[ModelDependence]:
    """Agreement rate ``P(phi1 = phi2 = phi3)`` and per-strategy Type I error.

    Raises:
        ConfigError: the pipeline does not run the HC strategies
    """
    if not get_pipeline(config.pipeline).hc:
        raise ConfigError(f"pipeline '{config.pipeline}' does not run HC strategies")
    report = run_experiment(config, threads, progress, write)

    results = []
    for summary in report.summaries:
        rates = (summary.reject_rate_hc1, summary.reject_rate_hc2, summary.reject_rate_hc3)
        unmatched_agreement = unmatched_rates = None
        if report.contrast is not None:
            other = report.contrast.summary_for(summary.n)
            unmatched_agreement = other.agreement_rate
            unmatched_rates = (other.reject_rate_hc1, other.reject_rate_hc2, other.reject_rate_hc3)
        results.append(
            ModelDependence(
                n=summary.n,
                agreement_rate=summary.agreement_rate,
                reject_rates=rates,
                unmatched_agreement_rate=unmatched_agreement,
                unmatched_reject_rates=unmatched_rates,
            )
        )
    return results
