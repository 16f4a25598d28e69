"""
Command-line interface for matchregula.
"""

from .common import CommandOutcome
from .main import cli, main

__all__ = ["CommandOutcome", "cli", "main"]
