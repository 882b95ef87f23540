"""
Command-line interface for pydaar.

This module provides the main CLI entry point using Click.
"""

from typing import Optional

import click

from pydaar.cli.common import EXIT_USAGE, configure_logging, error_document
from pydaar.core.constants import VERSION
from pydaar.core.exceptions import ConfigError
from pydaar.io.config import load_config


def _apply_config(ctx: click.Context, path: str) -> None:
    """Install a configuration file as defaults of the invoked subcommand."""
    name = ctx.invoked_subcommand
    try:
        config = load_config(path)
    except ConfigError as exc:
        click.echo(error_document(exc), err=True)
        ctx.exit(EXIT_USAGE)
    command = main.get_command(ctx, name) if name else None
    if command is None:
        return
    known = {p.name for p in command.params}
    unknown = sorted(set(config) - known)
    if unknown:
        raise click.UsageError(
            f"Unknown configuration key(s) for '{name}': {', '.join(unknown)}", ctx=ctx
        )
    ctx.default_map = {name: config}


@click.group()
@click.version_option(version=VERSION, prog_name="pydaar")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
              help="JSON file of option defaults for the subcommand")
@click.option("-v", "--verbose", count=True, help="Log to stderr (-v info, -vv debug)")
@click.option("--threads", type=click.IntRange(min=0), default=None,
              help="Worker threads (default: all CPUs; 0 means all)")
@click.pass_context
def main(ctx: click.Context, config_path: Optional[str], verbose: int,
         threads: Optional[int]) -> None:
    """
    pydaar - Data-driven ridge-regularized Anderson-Rubin inference

    Weak-identification-robust tests and confidence sets for one
    endogenous regressor with many instruments, plus the simulation
    designs used to study them.
    """
    configure_logging(verbose)
    ctx.obj = {"threads": threads}
    if config_path is not None:
        _apply_config(ctx, config_path)


# Import subcommands
from pydaar.cli.ci import ci_command  # noqa: E402
from pydaar.cli.select_lambda import select_lambda_command  # noqa: E402
from pydaar.cli.simulate import simulate_command  # noqa: E402
from pydaar.cli.test_cmd import test_command  # noqa: E402

# Register commands
main.add_command(test_command)
main.add_command(ci_command)
main.add_command(select_lambda_command)
main.add_command(simulate_command)


if __name__ == '__main__':
    main()
