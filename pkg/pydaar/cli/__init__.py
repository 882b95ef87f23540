"""Command-line interface."""

from pydaar.cli.main import main

__all__ = ["main"]
