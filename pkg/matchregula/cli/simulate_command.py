"""
``mr simulate`` and ``mr reproduce``: Monte Carlo experiments from the CLI.
"""

import json
import logging
from pathlib import Path
from typing import Optional

import click
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from ..core.config import ExperimentConfig, OutputPaths, load_experiment_config
from ..simulation import SimulationReport, load_presets, preset_configs, run_experiment
from ..simulation.presets import SCALES
from .common import CommandOutcome, console, finish, handle_errors, output_dir

logger = logging.getLogger(__name__)


def _fmt(value: Optional[float], digits: int = 3) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def _resolve(ctx: click.Context, config: ExperimentConfig) -> ExperimentConfig:
    """Apply the global --seed and --out options and default output names."""
    changes = {}
    if ctx.obj.get("seed") is not None:
        changes["seed"] = ctx.obj["seed"]
    outputs = config.outputs
    outputs = OutputPaths(
        report=outputs.report or f"{config.name}_report.json",
        plot_csv=outputs.plot_csv or f"{config.name}_plot.csv",
        trials=outputs.trials,
    )
    base = Path(ctx.obj["out"]) if ctx.obj.get("out") else None
    changes["outputs"] = outputs.resolved(base)
    return config.with_overrides(**changes)


def _dry_run(configs: list[ExperimentConfig]) -> None:
    documents = [{"config": c.to_dict(), "fingerprint": c.fingerprint()} for c in configs]
    payload = documents[0] if len(documents) == 1 else documents
    click.echo(json.dumps(payload, indent=2, sort_keys=True))


def _summary_table(report: SimulationReport) -> Table:
    table = Table(title=f"{report.config.name} ({report.config.pipeline})")
    for column in ("n", "mean |bias|", "DM", "REG", "HC1", "HC2", "HC3", "agree", "balance"):
        table.add_column(column, justify="right")
    for s in report.summaries:
        table.add_row(
            str(s.n),
            _fmt(s.mean_abs_bias, 4),
            _fmt(s.reject_rate_dm),
            _fmt(s.reject_rate_reg),
            _fmt(s.reject_rate_hc1),
            _fmt(s.reject_rate_hc2),
            _fmt(s.reject_rate_hc3),
            _fmt(s.agreement_rate),
            _fmt(s.balance_detect_rate),
        )
    return table


def _run(ctx: click.Context, config: ExperimentConfig) -> SimulationReport:
    threads = ctx.obj.get("threads")
    if ctx.obj.get("quiet"):
        return run_experiment(config, threads)

    columns = (
        TextColumn("[bold blue]{task.description}"),
        BarColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
    )
    with Progress(*columns, console=console, transient=True) as progress:
        task = progress.add_task(config.name, total=None)

        def on_progress(done: int, total: int) -> None:
            progress.update(task, completed=done, total=total)

        report = run_experiment(config, threads, on_progress)

    console.print(_summary_table(report))
    if report.contrast is not None:
        console.print(_summary_table(report.contrast))
    if report.bias_slope is not None:
        console.print(f"log-log bias slope: {report.bias_slope:.3f}")
    return report


def _run_all(ctx: click.Context, configs: list[ExperimentConfig], title: str) -> None:
    output_dir(ctx)
    artifacts: list[str] = []
    for config in configs:
        artifacts.extend(_run(ctx, config).artifacts)
    names = ", ".join(c.name for c in configs)
    finish(ctx, CommandOutcome.written(f"{names}: done", tuple(artifacts)), title)


@click.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--dry-run", is_flag=True, help="Print the resolved config and write nothing")
@click.pass_context
@handle_errors
def simulate_cmd(ctx: click.Context, config_path: Path, dry_run: bool):
    """Run the Monte Carlo experiment described by CONFIG_PATH (JSON or YAML).

    Examples:

        mr simulate experiment.json

        mr --threads 8 --out runs simulate experiment.yaml

        mr simulate experiment.json --dry-run
    """
    config = _resolve(ctx, load_experiment_config(config_path))
    if dry_run:
        _dry_run([config])
        return
    _run_all(ctx, [config], "Simulation")


@click.command()
@click.argument("preset_id", required=False)
@click.option(
    "--scale",
    type=click.Choice(SCALES),
    default="desk",
    show_default=True,
    help="desk: reduced replications; full: full replication counts",
)
@click.option("--dry-run", is_flag=True, help="Print the resolved configs and write nothing")
@click.option("--list", "list_ids", is_flag=True, help="List reproduction ids")
@click.pass_context
@handle_errors
def reproduce_cmd(ctx: click.Context, preset_id: Optional[str], scale: str,
                  dry_run: bool, list_ids: bool):
    """Reproduce a packaged experiment by id (fig1, ex1, ex2, ex3, thm1, ...).

    Examples:

        mr reproduce --list

        mr reproduce fig1 --scale desk

        mr --out full_runs reproduce thm3 --scale full
    """
    if list_ids or preset_id is None:
        table = Table(title="Reproduction ids")
        table.add_column("id", style="bold")
        table.add_column("runs", justify="right")
        table.add_column("description")
        for name, preset in load_presets().items():
            table.add_row(name, str(len(preset["runs"])), preset.get("description", ""))
        console.print(table)
        return

    configs = [_resolve(ctx, c) for c in preset_configs(preset_id, scale)]
    if dry_run:
        _dry_run(configs)
        return
    _run_all(ctx, configs, f"Reproduce {preset_id}")
