"""
``mr match``: match a dataset and export the pairs.
"""

import logging
from pathlib import Path

import click

from ..core.dataset import load_dataset
from ..linalg import build_metric, sample_covariance
from ..matching import (
    match_with_replacement,
    matching_summary,
    optimal_pair_match,
    write_matching_csv,
)
from .common import CommandOutcome, finish, handle_errors, output_dir, write_json

logger = logging.getLogger(__name__)


@click.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option(
    "--scheme",
    type=click.Choice(["pairs", "replacement"]),
    default="pairs",
    show_default=True,
    help="Optimal pair matching or nearest control with replacement",
)
@click.option(
    "--prefix",
    default="matching",
    show_default=True,
    help="File name prefix for the CSV and summary written under --out",
)
@click.pass_context
@handle_errors
def match_cmd(ctx: click.Context, dataset: Path, scheme: str, prefix: str):
    """Match treated units to controls by Mahalanobis distance.

    Writes PREFIX.csv (treated_index, control_index, distance, weight) and
    PREFIX_summary.json (N1, N0, total cost, covariate imbalance).

    Examples:

        mr match data.csv --scheme pairs

        mr --seed 7 --out results match data.csv --scheme replacement
    """
    seed = ctx.obj.get("seed") or 0
    data = load_dataset(dataset)
    metric = build_metric(sample_covariance(data))

    if scheme == "pairs":
        matching = optimal_pair_match(data, metric)
    else:
        matching = match_with_replacement(data, metric, seed)

    out = output_dir(ctx)
    csv_path = out / f"{prefix}.csv"
    write_matching_csv(matching, csv_path)

    summary = matching_summary(data, matching)
    summary.update(
        {
            "dataset": str(dataset),
            "seed": seed,
            "identity_metric": metric.used_identity_fallback,
        }
    )
    summary_path = write_json(summary, out / f"{prefix}_summary.json")

    outcome = CommandOutcome.written(
        f"{scheme}: N1={summary['n_treated']}, N0={summary['n_control']}, "
        f"total cost={summary['total_cost']:.6g}, |imbalance|={summary['imbalance_norm']:.4g}",
        (str(csv_path), summary_path),
    )
    finish(ctx, outcome, "Matching")
