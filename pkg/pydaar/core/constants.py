"""Core constants used throughout pydaar."""

import numpy as np

# Version information
VERSION = "0.1.0"
SCHEMA_VERSION = "1.0"

# Numerical tolerances
MACHINE_EPSILON = float(np.finfo(np.float64).eps)
ORTHOGONALITY_TOLERANCE = 1e-8
SYMMETRY_TOLERANCE = 1e-10

# Regularizer search
DEFAULT_GRID_SIZE = 200
GRID_ANCHOR_FACTOR = 1e-4       # interior grid starts at s_min^2 * factor
BISECTION_RELATIVE_PRECISION = 1e-6
FEASIBILITY_SLACK = 1e-12
ARGMAX_RELATIVE_TOLERANCE = 1e-9

# Above this sample size P is never materialized
MATERIALIZE_MAX_N = 2000

# Bootstrap
DEFAULT_BOOTSTRAP_DRAWS = 2000
REFERENCE_BOOTSTRAP_DRAWS = 10_000
DEFAULT_ALPHA = 0.05
DEFAULT_SEED = 20240101
BOOTSTRAP_BLOCK_SIZE = 256

# Monte Carlo
DEFAULT_REPLICATIONS = 2000

# Competitor tests
BCCH_CONSTANT = 1.1
CT_REGULARIZER = 0.05

# Simulation designs
DKM_DEFAULT_N = 100
DKM_DEFAULT_BETA = 1.0
DKM_ERROR_COVARIANCE = np.array([[2.0, 1.2], [1.2, 1.0]])
DKM_SPARSE_ACTIVE = 5
DKM_DENSE_SHARE = 0.4

HAUSMAN_DEFAULT_N = 200
HAUSMAN_DEFAULT_BETA = 0.0
HAUSMAN_GAMMA = 1.0
HAUSMAN_PHI = 0.3
HAUSMAN_RHO = 0.3
HAUSMAN_V2_SCALE = 0.86
HAUSMAN_Z1_MEAN = 0.5
HAUSMAN_EXP_RATE = 0.2
HAUSMAN_POLY_DEGREE = 5
HAUSMAN_PI_SCALE_K1 = 0.6
HAUSMAN_PI_SCALE_MANY = 0.2
