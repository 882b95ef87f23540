"""
Monte Carlo experiment command.

Runs a size experiment (the default) or, with --power and --beta-grid, a power curve
for one design, writes the rejection table as CSV and JSON and prints a
summary.
"""

from pathlib import Path
from typing import Optional

import click

from pydaar.cli.common import emit, handle_errors, parse_methods, style
from pydaar.core.constants import (
    DEFAULT_ALPHA,
    DEFAULT_BOOTSTRAP_DRAWS,
    DEFAULT_REPLICATIONS,
    DEFAULT_SEED,
)
from pydaar.core.exceptions import ConfigError
from pydaar.core.types import InfeasiblePolicy, Method
from pydaar.io.csv_data import split_names
from pydaar.io.results import write_frame_csv, write_json
from pydaar.simulation.dgp import NULL_BETA, DgpFamily, DgpSpec, FirstStage
from pydaar.simulation.experiment import (
    MonteCarloConfig,
    RejectionTable,
    run_power_curve,
    run_size_experiment,
)


def build_spec(family: str, k: int, n: Optional[int], mu2: float, first_stage: str,
               beta: Optional[float], power: bool) -> DgpSpec:
    """DgpSpec from the command-line flags; invalid combinations are configuration errors."""
    fam = DgpFamily(family)
    beta0 = NULL_BETA[fam]
    beta = beta0 if beta is None or power else beta
    kwargs = {} if n is None else {"n": n}
    try:
        if fam is DgpFamily.DKM:
            return DgpSpec.dkm(K=k, mu2=mu2, first_stage=FirstStage(first_stage), beta=beta,
                               beta0=beta0 if power else beta, **kwargs)
        return DgpSpec.hausman(K=k, beta=beta, beta0=beta0 if power else beta, **kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def summary_lines(table: RejectionTable):
    yield style(f"{'method':<8}{'K':>6}{'beta':>10}{'rate':>9}{'se':>9}{'reg':>11}{'fail':>6}",
                bold=True)
    for r in table.rows:
        yield (f"{r.method.value:<8}{r.K:>6}{r.beta:>10.4g}{r.rejection_rate:>9.4f}"
               f"{r.mc_se:>9.4f}{r.mean_regularizer:>11.4g}{r.failures:>6}")


@click.command(name="simulate")
@click.option("--family", type=click.Choice([f.value for f in DgpFamily]), default="dkm",
              show_default=True, help="Simulation design")
@click.option("--k", "k", type=click.IntRange(min=1), required=True, help="Number of instruments")
@click.option("--n", "n", type=click.IntRange(min=2), default=None,
              help="Sample size (design default: 100 DKM, 200 Hausman)")
@click.option("--mu2", type=click.FloatRange(min=0.0), default=0.0, show_default=True,
              help="Concentration parameter (DKM)")
@click.option("--first-stage", type=click.Choice(["sparse", "dense"]), default="sparse",
              show_default=True, help="First-stage pattern (DKM)")
@click.option("--beta", type=float, default=None,
              help="True coefficient for a size experiment (design default)")
@click.option("--null/--power", "null", default=True,
              help="Size experiment (default) or power curve over --beta-grid")
@click.option("--beta-grid", default=None, help="Comma-separated true betas for a power curve")
@click.option("--methods", default="BS", callback=parse_methods, show_default=True,
              help="Comma-separated methods")
@click.option("--replications", type=click.IntRange(min=1), default=DEFAULT_REPLICATIONS,
              show_default=True)
@click.option("-B", "--draws", type=click.IntRange(min=1), default=DEFAULT_BOOTSTRAP_DRAWS,
              show_default=True, help="Bootstrap draws per test")
@click.option("--alpha", type=click.FloatRange(0.0, 1.0, min_open=True, max_open=True),
              default=DEFAULT_ALPHA, show_default=True)
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=DEFAULT_SEED, show_default=True,
              help="Master seed")
@click.option("--on-infeasible", type=click.Choice([p.value for p in InfeasiblePolicy]),
              default=InfeasiblePolicy.UPPER.value, show_default=True,
              help="lambda fallback when no penalty is feasible")
@click.option("-o", "--out", default=None, type=click.Path(dir_okay=False),
              help="Output prefix: writes <out>.csv and <out>.json")
@click.option("--quiet", is_flag=True, help="No progress bar")
@click.pass_context
@handle_errors
def simulate_command(ctx, family, k, n, mu2, first_stage, beta, null, beta_grid, methods,
                     replications, draws, alpha, seed, on_infeasible, out, quiet):
    """
    Rejection rates for a simulation design.

    Example:
        pydaar simulate --family dkm --k 5 --mu2 30 --null --replications 2000
    """
    grid = None
    if not null:
        try:
            grid = tuple(float(b) for b in split_names(beta_grid))
        except ValueError as exc:
            raise ConfigError(f"Invalid --beta-grid: {exc}") from exc
        if not grid:
            raise ConfigError("A power curve (--power) needs --beta-grid")

    spec = build_spec(family, k, n, mu2, first_stage, beta, power=not null)
    try:
        mc = MonteCarloConfig(
            replications=replications, bootstrap_draws=draws, alpha=alpha, master_seed=seed,
            tests=tuple(methods) or (Method.BS,), beta_grid=grid,
            threads=(ctx.obj or {}).get("threads"), progress=not quiet,
            on_infeasible=on_infeasible,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    table = run_size_experiment(spec, mc) if null else run_power_curve(spec, mc)
    payload = {
        "command": "simulate",
        "experiment": "size" if null else "power",
        "design": {"family": spec.family.value, "n": spec.n, "K": spec.K, "mu2": spec.mu2,
                   "first_stage": spec.first_stage.value, "beta0": spec.beta0},
        "replications": replications,
        "bootstrap_draws": draws,
        "alpha": alpha,
        "seed": seed,
        "rows": table.to_frame().to_dict(orient="records"),
    }

    if out is None:
        emit(payload, None)
        return
    prefix = Path(out)
    write_frame_csv(table.to_frame(), prefix.with_suffix(".csv"))
    write_json(payload, prefix.with_suffix(".json"))
    for line in summary_lines(table):
        click.echo(line)
