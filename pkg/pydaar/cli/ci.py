"""
Confidence-set command.

Inverts the chosen test on an equally spaced beta0 grid. With --compare,
further methods are inverted on the same grid and their total lengths are
reported relative to the main method.
"""

import click

from pydaar.cli.common import (
    data_options,
    emit,
    handle_errors,
    method_options,
    parse_methods,
    roles_from,
)
from pydaar.cli.test_cmd import options_from
from pydaar.inference.confidence import beta_grid, invert_test, relative_length
from pydaar.io.csv_data import ingest_csv
from pydaar.io.results import confidence_set_frame, write_frame_csv
from pydaar.linalg.partial import partial_out


@click.command(name="ci")
@data_options
@method_options
@click.option("--grid-lo", type=float, required=True, help="Lower end of the beta0 grid")
@click.option("--grid-hi", type=float, required=True, help="Upper end of the beta0 grid")
@click.option("--grid-points", type=click.IntRange(min=2), default=201, show_default=True,
              help="Number of grid points")
@click.option("--compare", default=None, callback=parse_methods,
              help="Comma-separated methods to invert on the same grid")
@click.option("--csv", "csv_path", default=None, type=click.Path(dir_okay=False),
              help="Also write the per-point acceptance table (beta, accepted)")
@click.option("-o", "--out", default=None, type=click.Path(dir_okay=False),
              help="Write the JSON result here instead of stdout")
@click.option("--quiet", is_flag=True, help="No progress bar")
@click.pass_context
@handle_errors
def ci_command(ctx, data, outcome, endogenous, controls, instruments, intercept,
               method, grid_lo, grid_hi, grid_points, compare, csv_path, out, quiet,
               **method_kwargs):
    """
    Confidence set for beta by test inversion.

    Example:
        pydaar ci card.csv --outcome y --endogenous x --instruments prefix:z_ \\
            --intercept --grid-lo -1 --grid-hi 1 --compare AR,JAR_CF
    """
    roles = roles_from(outcome, endogenous, controls, instruments, intercept)
    sample = partial_out(ingest_csv(data, roles))
    grid = beta_grid(grid_lo, grid_hi, grid_points)
    options = options_from(ctx, method_kwargs)

    main_set = invert_test(method, sample, grid, options, progress=not quiet)
    payload = main_set.to_dict()
    payload["command"] = "ci"

    if compare:
        comparison = {}
        for other in compare:
            cs = invert_test(other, sample, grid, options, progress=not quiet)
            entry = cs.to_dict()
            entry["relative_length"] = relative_length(cs, main_set)
            comparison[other.value] = entry
        payload["comparison"] = comparison

    if csv_path is not None:
        write_frame_csv(confidence_set_frame(main_set.grid, main_set.accepted), csv_path)
    emit(payload, out)
