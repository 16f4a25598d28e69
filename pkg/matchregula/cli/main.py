"""
Main CLI entry point for matchregula.
"""

import logging
import sys

import click

from .. import __version__
from .common import EXIT_INTERNAL_ERROR, console
from .fisher_command import fisher_test_cmd
from .match_command import match_cmd
from .simulate_command import reproduce_cmd, simulate_cmd

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


@click.group()
@click.version_option(version=__version__, prog_name="matchregula")
@click.option("--seed", type=click.IntRange(min=0), default=None,
              help="Master seed (commands default to 0; overrides config seeds)")
@click.option("--threads", type=click.IntRange(min=1), default=None,
              help="Simulation workers (default: $MATCHREGULA_THREADS or CPU count)")
@click.option("--out", type=click.Path(file_okay=False, path_type=str), default=None,
              help="Directory for written artifacts (default: current directory)")
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.option("--quiet", "-q", is_flag=True, help="Only warnings and errors")
@click.pass_context
def cli(ctx, seed, threads, out, verbose, quiet):
    """Matchregula - covariate matching with randomization and HC inference.

    Matches treated units to controls, runs paired Fisher randomization
    tests and HC regression tests on the matched sample, and reproduces
    the Monte Carlo experiments that study their validity.
    """
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["threads"] = threads
    ctx.obj["out"] = out
    ctx.obj["verbose"] = verbose
    ctx.obj["quiet"] = quiet

    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


cli.add_command(match_cmd, name="match")
cli.add_command(fisher_test_cmd, name="test")
cli.add_command(simulate_cmd, name="simulate")
cli.add_command(reproduce_cmd, name="reproduce")


def main():
    """Main entry point."""
    try:
        cli()
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled by user[/yellow]")
        sys.exit(130)
    except Exception as e:
        console.print(f"[red]Unexpected error: {e}[/red]")
        sys.exit(EXIT_INTERNAL_ERROR)


if __name__ == "__main__":
    main()
