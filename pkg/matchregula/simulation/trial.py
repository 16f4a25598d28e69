"""
One end-to-end simulation replication.

sample -> match -> statistics -> randomization p-values -> HC p-values for
the baseline, saturated and selected models -> balance check.

Every random stream of a trial is derived from the trial seed, so a record
depends only on ``(spec, pipeline, n, seed)``.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Union

import numpy as np

from ..core.config import (
    DEFAULT_ALPHA,
    DEFAULT_BALANCE_LEVEL,
    DEFAULT_PERMUTATIONS,
    DEFAULT_SELECTION_LEVEL,
    ExperimentConfig,
)
from ..core.errors import (
    ContractError,
    DegenerateDesign,
    DegenerateInputError,
    SingularDesign,
)
from ..core.rng import Stream, derive_seed, stream
from ..dgp import NONE_BASIS, DgpSpec, GBasis, bounded_g_library, sample
from ..estimators import (
    DifferenceOfMeans,
    FeatureSpec,
    dm_statistic,
    fit_linear,
    hc_pvalue,
    hotelling_t2,
    select_model,
    unmatched_design,
)
from ..linalg import build_metric, sample_covariance
from ..matching import (
    MatchedSample,
    PairMatching,
    covariate_imbalance,
    match_with_replacement,
    optimal_pair_match,
)
from ..randomization import Exhaustive, Sampled, randomization_pvalue
from .pipelines import Pipeline, get_pipeline

logger = logging.getLogger(__name__)

HC_STRATEGIES = ("baseline", "saturated", "selected")


@dataclass(frozen=True)
class TrialSettings:
    """Per-trial knobs taken from the experiment config."""

    alpha: float = DEFAULT_ALPHA
    permutations: int = DEFAULT_PERMUTATIONS
    randomization_mode: str = "sampled"
    selection_level: float = DEFAULT_SELECTION_LEVEL
    balance_level: float = DEFAULT_BALANCE_LEVEL
    model_basis: Optional[str] = None

    @classmethod
    def from_config(cls, config: ExperimentConfig) -> "TrialSettings":
        return cls(
            alpha=config.alpha,
            permutations=config.permutations,
            randomization_mode=config.randomization_mode,
            selection_level=config.selection_level,
            balance_level=config.balance_level,
            model_basis=config.model_basis,
        )


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one replication.

    ``None`` marks quantities the pipeline does not compute (or that are
    undefined for a degenerate draw). The true effect is 0 under every null
    model, so ``bias_dm == tau_dm``.
    """

    n: int
    trial: int
    seed: int
    tau_dm: Optional[float] = None
    tau_reg: Optional[float] = None
    bias_dm: Optional[float] = None
    p_rand_dm: Optional[float] = None
    p_rand_reg: Optional[float] = None
    p_hc: tuple[float, ...] = ()
    decisions: tuple[bool, ...] = ()
    hc_specs: tuple[str, ...] = ()
    balance_p: Optional[float] = None
    balance_test_reject: Optional[bool] = None
    total_cost: Optional[float] = None
    imbalance_norm: Optional[float] = None
    n_treated: int = 0
    n_analysed: int = 0
    degenerate: bool = False
    notes: tuple[str, ...] = field(default=())

    def __post_init__(self):
        for name in ("p_rand_dm", "p_rand_reg", "balance_p"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ContractError(f"{name}={value} outside [0, 1]")
        if any(not 0.0 <= p <= 1.0 for p in self.p_hc):
            raise ContractError(f"HC p-values {self.p_hc} outside [0, 1]")

    @property
    def agree(self) -> Optional[bool]:
        """Whether the HC strategies reached the same decision."""
        if not self.decisions:
            return None
        return len(set(self.decisions)) == 1

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        for key in ("p_hc", "decisions", "hc_specs", "notes"):
            data[key] = list(data[key])
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TrialRecord":
        data = dict(data)
        for key in ("p_hc", "decisions", "hc_specs", "notes"):
            data[key] = tuple(data.get(key, ()))
        return cls(**data)


def _finite(value: float) -> Optional[float]:
    return float(value) if math.isfinite(value) else None


def _strategy_basis(spec: DgpSpec, settings: TrialSettings) -> GBasis:
    basis_id = settings.model_basis
    if basis_id is None and spec.local_misspec is not None:
        basis_id = spec.local_misspec.g
    return bounded_g_library(basis_id, spec.d) if basis_id else NONE_BASIS


def _hc_pvalues(dataset, index_set, weights, g: GBasis, settings: TrialSettings,
                notes: list[str]) -> tuple[tuple[float, ...], tuple[str, ...]]:
    pvalues, specs = [], []
    for strategy in HC_STRATEGIES:
        try:
            if strategy == "baseline":
                feature_spec = FeatureSpec.baseline(g)
            elif strategy == "saturated":
                feature_spec = FeatureSpec.saturated(g)
            else:
                feature_spec = select_model(
                    dataset, index_set, weights, g, settings.selection_level
                )
            fit = fit_linear(dataset, index_set, weights, feature_spec)
            pvalues.append(hc_pvalue(fit))
            specs.append(feature_spec.identifier)
        except (SingularDesign, DegenerateInputError) as e:
            logger.warning(f"HC {strategy} fit failed, p-value set to 1: {e}")
            notes.append(f"hc_{strategy}: {e}")
            pvalues.append(1.0)
            specs.append(strategy)
    return tuple(pvalues), tuple(specs)


def _replicated(index_set: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Analysed rows with each unit repeated by its multiplicity weight."""
    return np.repeat(np.asarray(index_set, dtype=np.intp), np.rint(weights).astype(np.intp))


def _degenerate_record(pipe: Pipeline, n: int, trial: int, seed: int, n_treated: int,
                       reason: str) -> TrialRecord:
    logger.warning(f"Trial n={n} #{trial}: {reason}; p-values set to 1")
    return TrialRecord(
        n=n,
        trial=trial,
        seed=seed,
        p_rand_dm=1.0 if "dm" in pipe.randomization else None,
        p_rand_reg=1.0 if "reg" in pipe.randomization else None,
        p_hc=(1.0,) * len(HC_STRATEGIES) if pipe.hc else (),
        decisions=(False,) * len(HC_STRATEGIES) if pipe.hc else (),
        n_treated=n_treated,
        degenerate=True,
        notes=(reason,),
    )


def run_trial(
    spec: DgpSpec,
    pipeline: Union[str, Pipeline],
    n: int,
    seed: int,
    settings: Optional[TrialSettings] = None,
    trial: int = 0,
) -> TrialRecord:
    """Run one replication of ``pipeline`` on a fresh draw of size ``n``.

    Degenerate designs (no treated units, too few controls for pairs) are
    recorded with every requested p-value equal to 1.
    """
    pipe = get_pipeline(pipeline) if isinstance(pipeline, str) else pipeline
    settings = settings or TrialSettings()
    notes: list[str] = []

    dataset = sample(spec, n, stream(seed, Stream.SAMPLE)).dataset
    try:
        metric = build_metric(sample_covariance(dataset))
        if pipe.matcher == "pairs":
            matching = optimal_pair_match(dataset, metric)
        elif pipe.matcher == "replacement":
            matching = match_with_replacement(
                dataset, metric, derive_seed(seed, Stream.TIEBREAK)
            )
        else:
            matching = None
        if matching is None and (dataset.n_treated == 0 or dataset.n_control == 0):
            raise DegenerateDesign("the sample lacks a treated or a control unit")
    except (DegenerateDesign, DegenerateInputError) as e:
        return _degenerate_record(pipe, n, trial, seed, dataset.n_treated, str(e))

    if matching is None:
        index_set, weights = unmatched_design(dataset)
        tau_dm = DifferenceOfMeans().evaluate(MatchedSample.full(dataset), dataset.z)
        total_cost = imbalance_norm = None
    else:
        analysed = MatchedSample.from_matching(dataset, matching)
        index_set, weights = analysed.indices, analysed.weights
        tau_dm = dm_statistic(dataset, matching)
        total_cost = float(matching.total_cost)
        imbalance_norm = float(np.linalg.norm(covariate_imbalance(dataset, matching)))

    try:
        tau_reg: Optional[float] = fit_linear(
            dataset, index_set, weights, FeatureSpec.baseline()
        ).tau_hat
    except SingularDesign as e:
        notes.append(f"tau_reg: {e}")
        tau_reg = None

    p_rand: dict[str, float] = {}
    if pipe.randomization:
        assert isinstance(matching, PairMatching)
        mode = (
            Exhaustive()
            if settings.randomization_mode == "exhaustive"
            else Sampled(settings.permutations, seed)
        )
        for name in pipe.randomization:
            try:
                result = randomization_pvalue(dataset, matching, name, mode, settings.alpha)
                p_rand[name] = result.p_value
            except SingularDesign as e:
                logger.warning(f"Randomization test {name} failed, p-value set to 1: {e}")
                notes.append(f"rand_{name}: {e}")
                p_rand[name] = 1.0

    p_hc: tuple[float, ...] = ()
    hc_specs: tuple[str, ...] = ()
    if pipe.hc:
        g = _strategy_basis(spec, settings)
        p_hc, hc_specs = _hc_pvalues(dataset, index_set, weights, g, settings, notes)

    balance_p: Optional[float] = None
    balance_reject: Optional[bool] = None
    if pipe.balance:
        try:
            balance = hotelling_t2(dataset, _replicated(index_set, weights))
            balance_p = balance.p_value
            balance_reject = balance.rejects(settings.balance_level)
        except (ContractError, SingularDesign) as e:
            notes.append(f"balance: {e}")

    record = TrialRecord(
        n=n,
        trial=trial,
        seed=seed,
        tau_dm=_finite(tau_dm),
        tau_reg=None if tau_reg is None else _finite(tau_reg),
        bias_dm=_finite(tau_dm),
        p_rand_dm=p_rand.get("dm"),
        p_rand_reg=p_rand.get("reg"),
        p_hc=p_hc,
        decisions=tuple(p < settings.alpha for p in p_hc),
        hc_specs=hc_specs,
        balance_p=balance_p,
        balance_test_reject=balance_reject,
        total_cost=total_cost,
        imbalance_norm=imbalance_norm,
        n_treated=dataset.n_treated,
        n_analysed=int(np.asarray(index_set).size),
        notes=tuple(notes),
    )
    logger.debug(
        f"Trial n={n} #{trial}: tau_dm={record.tau_dm}, p_dm={record.p_rand_dm}, "
        f"p_hc={record.p_hc}"
    )
    return record
