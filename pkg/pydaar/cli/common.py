"""
Options and helpers shared by the pydaar subcommands.
"""

from functools import wraps
from typing import Any, Callable, Optional
import logging
import os
import sys

import click

from pydaar.core.constants import (
    DEFAULT_ALPHA,
    DEFAULT_BOOTSTRAP_DRAWS,
    DEFAULT_GRID_SIZE,
    DEFAULT_SEED,
)
from pydaar.core.exceptions import ConfigError, PydaarError
from pydaar.core.types import InfeasiblePolicy, Method, WeightLaw
from pydaar.io.csv_data import ColumnRoles
from pydaar.io.results import json_document, write_json

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_USAGE = 2


def configure_logging(verbosity: int) -> None:
    """Route the pydaar logger to stderr: WARNING, INFO with -v, DEBUG with -vv."""
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    root = logging.getLogger("pydaar")
    root.setLevel(level)
    if not any(getattr(h, "_pydaar_cli", False) for h in root.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._pydaar_cli = True  # type: ignore[attr-defined]
        root.addHandler(handler)


def style(text: str, **kwargs: Any) -> str:
    """click.style unless NO_COLOR is set."""
    if os.environ.get("NO_COLOR"):
        return text
    return click.style(text, **kwargs)


def error_document(exc: Exception) -> str:
    code = getattr(exc, "error_code", type(exc).__name__)
    return json_document({"error": code, "message": str(exc)})


def handle_errors(func: Callable[..., Any]) -> Callable[..., Any]:
    """
    Turn library failures into an error JSON document on stderr.

    PydaarError and missing files exit with 1; configuration and other
    validation errors exit with 2, like click usage errors.
    """
    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except ConfigError as exc:
            click.echo(error_document(exc), err=True)
            ctx.exit(EXIT_USAGE)
        except (PydaarError, FileNotFoundError) as exc:
            click.echo(error_document(exc), err=True)
            ctx.exit(EXIT_ERROR)
        except ValueError as exc:
            click.echo(error_document(exc), err=True)
            ctx.exit(EXIT_USAGE)
    return wrapper


def emit(payload: dict, out: Optional[str]) -> None:
    """Write the JSON document to --out, or to stdout."""
    text = write_json(payload, out)
    if out is None:
        click.echo(text)


def parse_method(ctx: click.Context, param: click.Parameter, value: Any) -> Any:
    if value is None or isinstance(value, Method):
        return value
    try:
        return Method.parse(str(value))
    except ValueError as exc:
        raise click.BadParameter(str(exc), ctx=ctx, param=param) from None


def parse_methods(ctx: click.Context, param: click.Parameter, value: Any) -> Any:
    if value is None:
        return ()
    names = value.split(",") if isinstance(value, str) else list(value)
    try:
        return tuple(Method.parse(name) for name in names if str(name).strip())
    except ValueError as exc:
        raise click.BadParameter(str(exc), ctx=ctx, param=param) from None


def data_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """CSV path plus the column-role options."""
    options = [
        click.argument("data", type=click.Path(dir_okay=False)),
        click.option("--outcome", required=True, help="Outcome column"),
        click.option("--endogenous", required=True, help="Endogenous regressor column"),
        click.option("--controls", default="", help="Comma-separated control columns"),
        click.option("--instruments", required=True,
                     help="Comma-separated instrument columns, or prefix:<p>"),
        click.option("--intercept/--no-intercept", default=False,
                     help="Append a column of ones to the controls"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def roles_from(outcome: str, endogenous: str, controls: str, instruments: str,
               intercept: bool) -> ColumnRoles:
    return ColumnRoles(outcome=outcome, endogenous=endogenous, controls=controls,
                       instruments=instruments, add_intercept=intercept)


def method_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Options shared by the test and ci commands."""
    options = [
        click.option("--method", default=Method.BS.value, callback=parse_method,
                     help="BS, JAR_STD, JAR_CF, AR, RJAR, BCCH or CT (default BS)"),
        click.option("--alpha", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True),
                     default=DEFAULT_ALPHA, show_default=True, help="Nominal level"),
        click.option("-B", "--draws", type=click.IntRange(min=1), default=DEFAULT_BOOTSTRAP_DRAWS,
                     show_default=True, help="Bootstrap draws"),
        click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=DEFAULT_SEED,
                     show_default=True, help="Seed of all randomness"),
        click.option("--weight-law", type=click.Choice([w.value for w in WeightLaw][:2]),
                     default=WeightLaw.RADEMACHER.value, show_default=True,
                     help="Law of the bootstrap multipliers"),
        click.option("--lambda", "lambda_override", type=click.FloatRange(min=0.0), default=None,
                     help="Fixed ridge penalty for BS instead of the data-driven one"),
        click.option("--standardize/--no-standardize", default=True,
                     help="Scale instruments to unit mean square (default on)"),
        click.option("--grid-size", type=click.IntRange(min=2), default=DEFAULT_GRID_SIZE,
                     show_default=True, help="Grid size of the regularizer searches"),
        click.option("--on-infeasible", type=click.Choice([p.value for p in InfeasiblePolicy]),
                     default=InfeasiblePolicy.RAISE.value, show_default=True,
                     help="What BS does when no lambda is feasible"),
    ]
    for option in reversed(options):
        func = option(func)
    return func
