"""
``mr test``: paired Fisher randomization test on a dataset.
"""

import logging
from pathlib import Path
from typing import Any, Optional

import click

from .. import __version__
from ..core.config import DEFAULT_ALPHA, DEFAULT_PERMUTATIONS
from ..core.dataset import Dataset, load_dataset
from ..core.errors import DegenerateDesign, SingularDesign
from ..estimators import FeatureSpec, available_statistics, fit_linear, fit_report
from ..linalg import build_metric, sample_covariance
from ..matching import MatchedSample, PairMatching, optimal_pair_match
from ..matching.matchers import ensure_pairable
from ..randomization import Exhaustive, Sampled, degenerate_result, randomization_pvalue
from .common import CommandOutcome, finish, handle_errors, output_dir, write_json

logger = logging.getLogger(__name__)


def _baseline_fit_report(data: Dataset, pairs: PairMatching) -> Optional[dict[str, Any]]:
    """HC fit report of the baseline regression on the matched pairs."""
    analysed = MatchedSample.from_matching(data, pairs)
    try:
        fit = fit_linear(data, analysed.indices, analysed.weights, FeatureSpec.baseline())
    except SingularDesign as e:
        logger.warning(f"No regression report: {e}")
        return None
    return fit_report(fit)


@click.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--statistic",
    type=click.Choice(available_statistics()),
    default="dm",
    show_default=True,
    help="Difference of means or regression-adjusted statistic",
)
@click.option(
    "--exhaustive",
    is_flag=True,
    help="Enumerate all 2^N1 assignments (at most 20 pairs)",
)
@click.option(
    "--permutations",
    "-B",
    type=click.IntRange(min=1),
    default=DEFAULT_PERMUTATIONS,
    show_default=True,
    help="Number of sampled assignments",
)
@click.option(
    "--alpha",
    type=click.FloatRange(0, 1, min_open=True, max_open=True),
    default=DEFAULT_ALPHA,
    show_default=True,
    help="Level for the critical value and the decision",
)
@click.option(
    "--sidedness",
    type=click.Choice(["two", "greater"]),
    default="two",
    show_default=True,
    help="Compare |tau| (two) or tau (greater)",
)
@click.option(
    "--report",
    "report_name",
    default="test_report.json",
    show_default=True,
    help="Report file name under --out",
)
@click.pass_context
@handle_errors
def fisher_test_cmd(ctx: click.Context, dataset: Path, statistic: str, exhaustive: bool,
                    permutations: int, alpha: float, sidedness: str, report_name: str):
    """Optimal pair matching followed by a within-pair randomization test.

    A design without a pair matching (no treated units, or more treated than
    controls) is a valid answer with p = 1 and exits 0.

    Examples:

        mr test data.csv

        mr --seed 11 test data.csv --statistic reg -B 5000

        mr test small.csv --exhaustive
    """
    seed = ctx.obj.get("seed") or 0
    data = load_dataset(dataset)
    mode = Exhaustive() if exhaustive else Sampled(permutations, seed)

    regression = None
    try:
        ensure_pairable(data)
        pairs = optimal_pair_match(data, build_metric(sample_covariance(data)))
    except DegenerateDesign as e:
        logger.info(f"Degenerate design, p-value set to 1: {e}")
        result = degenerate_result(statistic, mode, alpha, str(e), sidedness)
    else:
        result = randomization_pvalue(data, pairs, statistic, mode, alpha, sidedness)
        if statistic == "reg":
            regression = _baseline_fit_report(data, pairs)

    report = result.to_dict()
    report.update(
        {
            "dataset": str(dataset),
            "n": data.n,
            "n_treated": data.n_treated,
            "n_control": data.n_control,
            "reject": result.rejects(),
            "version": __version__,
        }
    )
    if regression is not None:
        report["regression"] = regression
    path = write_json(report, output_dir(ctx) / report_name)

    decision = "reject" if result.rejects() else "do not reject"
    line = f"{statistic}: p = {result.p_value:.4g} over {result.draws.size} draws ({decision} at {alpha})"
    if result.degenerate:
        line = f"{statistic}: p = 1 ({result.message})"
    finish(ctx, CommandOutcome.written(line, (path,)), "Randomization test")
