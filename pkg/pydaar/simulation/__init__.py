"""Simulation module initialization."""

from pydaar.simulation.dgp import (
    DgpFamily,
    DgpSpec,
    FirstStage,
    NULL_BETA,
    first_stage_coefficients,
    gen_dkm,
    gen_hausman,
    generate,
)
from pydaar.simulation.experiment import (
    TABLE_COLUMNS,
    MonteCarloConfig,
    RejectionRow,
    RejectionTable,
    run_power_curve,
    run_size_experiment,
)
from pydaar.simulation.oracles import (
    diverging_k_mu,
    diverging_k_power,
    dkm_local_power,
    fixed_k_power,
    weighted_chisq_mc_quantile,
    weighted_chisq_quantile,
    weighted_chisq_sf,
)

__all__ = [
    "DgpFamily",
    "DgpSpec",
    "FirstStage",
    "NULL_BETA",
    "first_stage_coefficients",
    "gen_dkm",
    "gen_hausman",
    "generate",
    "TABLE_COLUMNS",
    "MonteCarloConfig",
    "RejectionRow",
    "RejectionTable",
    "run_power_curve",
    "run_size_experiment",
    "diverging_k_mu",
    "diverging_k_power",
    "dkm_local_power",
    "fixed_k_power",
    "weighted_chisq_mc_quantile",
    "weighted_chisq_quantile",
    "weighted_chisq_sf",
]
