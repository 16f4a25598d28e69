"""
Shared plumbing for CLI commands: console, outcomes and error handling.
"""

import functools
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import click
from rich.console import Console
from rich.panel import Panel

from ..core.errors import MatchregulaError, exit_code_for, log_error

logger = logging.getLogger(__name__)

console = Console(stderr=True)

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INTERNAL_ERROR = 2


@dataclass(frozen=True)
class CommandOutcome:
    """Exit code, one summary line and the artifacts a command wrote."""

    exit_code: int
    summary: str
    artifacts: tuple[str, ...] = field(default=())

    @classmethod
    def written(cls, summary: str, artifacts: tuple[str, ...]) -> "CommandOutcome":
        """Success only if every artifact exists on disk."""
        missing = [a for a in artifacts if not Path(a).exists()]
        if missing:
            return cls(EXIT_INTERNAL_ERROR, f"artifacts missing: {', '.join(missing)}", artifacts)
        return cls(EXIT_OK, summary, artifacts)


def finish(ctx: click.Context, outcome: CommandOutcome, title: str) -> None:
    """Report the outcome and exit with its code."""
    if outcome.exit_code != EXIT_OK:
        click.echo(f"Error: {outcome.summary}", err=True)
        sys.exit(outcome.exit_code)
    if not ctx.obj.get("quiet"):
        body = outcome.summary
        if outcome.artifacts:
            body += "\n" + "\n".join(f"  → {a}" for a in outcome.artifacts)
        console.print(Panel(body, title=title, border_style="green"))


def handle_errors(command: Callable) -> Callable:
    """Map library exceptions to CLI exit codes."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except MatchregulaError as e:
            log_error(e)
            click.echo(f"Error: {e}", err=True)
            sys.exit(exit_code_for(e))
        except OSError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_USER_ERROR)
        except (click.exceptions.Exit, click.ClickException):
            raise
        except Exception as e:
            logger.debug("Internal error", exc_info=True)
            click.echo(f"Internal error: {e}", err=True)
            sys.exit(EXIT_INTERNAL_ERROR)

    return wrapper


def output_dir(ctx: click.Context) -> Path:
    out = Path(ctx.obj.get("out") or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_json(data: Any, path: Path) -> str:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Wrote {path}")
    return str(path)
