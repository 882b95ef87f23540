"""
Regularizer inspection command.

Reports the data-driven ridge penalty lambda with its leverage
diagnostics and audit grid, together with the RJAR penalty gamma* and the
instrument rank r_n.
"""

import click

from pydaar.cli.common import data_options, emit, handle_errors, roles_from
from pydaar.core.constants import DEFAULT_GRID_SIZE
from pydaar.inference.competitors import gamma_star
from pydaar.io.csv_data import ingest_csv
from pydaar.linalg.partial import partial_out, standardize_instruments
from pydaar.linalg.selection import select_lambda
from pydaar.linalg.svd import svd_factorize


@click.command(name="select-lambda")
@data_options
@click.option("--grid-size", type=click.IntRange(min=2), default=DEFAULT_GRID_SIZE,
              show_default=True, help="Number of grid points")
@click.option("--grid/--no-grid", "include_grid", default=True,
              help="Include the per-grid-point audit trail")
@click.option("-o", "--out", default=None, type=click.Path(dir_okay=False),
              help="Write the JSON report here instead of stdout")
@handle_errors
def select_lambda_command(data, outcome, endogenous, controls, instruments, intercept,
                          grid_size, include_grid, out):
    """
    Show the ridge penalty the BS test would use on a CSV file.

    Example:
        pydaar select-lambda card.csv --outcome y --endogenous x --instruments z1,z2
    """
    roles = roles_from(outcome, endogenous, controls, instruments, intercept)
    sample = standardize_instruments(partial_out(ingest_csv(data, roles)))
    f = svd_factorize(sample.Z)
    selection = select_lambda(f, sample.n, grid_size)
    rjar = gamma_star(f, sample.n, grid_size)

    payload = selection.to_dict(include_grid=include_grid)
    payload.update({
        "command": "select-lambda",
        "n": sample.n,
        "K": sample.K,
        "r_n": rjar.r_n,
        "gamma_star": rjar.gamma_star,
    })
    emit(payload, out)
