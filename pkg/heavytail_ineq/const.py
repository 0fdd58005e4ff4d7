"""
Constants for the functional-inequality toolkit.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import math

# Product weak-Cheeger constants.
KAPPA_1 = 2.0 * math.sqrt(6.0)
KAPPA_2 = 2.0 * (1.0 + 2.0 * math.sqrt(6.0))

# Quadrature defaults.
QUAD_ABS_TOL = 1e-10
QUAD_REL_TOL = 1e-8
QUAD_TAIL_EPS = 1e-14
QUAD_MAX_DEPTH = 200
DYADIC_MAX_CHUNKS = 1000

# Root finding.
BRACKET_INITIAL = 1.0
BRACKET_GROWTH = 2.0
BRACKET_MAX_STEPS = 1020
ROOT_XTOL = 1e-13

# Finite differences when no closed-form derivative is registered.
FD_REL_STEP = 1e-6
FD_MIN_STEP = 1e-6

# Shape checks.
DHR_REL_TOL = 1e-9
SLOPE_REL_TOL = 1e-7
REGULARITY_GRID_POINTS = 512
REGULARITY_SLACK = 1e-9
LOG_CONCAVITY_TOL = 1e-9

# Duality transforms.
DUALITY_GRID_POINTS = 2048
DUALITY_CLIP = 1e-12

# Lyapunov certificates.
DRIFT_TOL = 1e-7
DRIFT_SCAN_POINTS = 4096
LOG_W_CAP = 600.0
CAUCHY_JOIN_RADIUS = 2.0
SUBEXP_JOIN_RADIUS = 1.0
SUBEXP_GAMMA = 0.5
SUBEXP_PHI_SCALE = 0.5
B_SAFETY = 1.05
LOCAL_POINCARE_CELLS = 400
RATIO_LIMIT_MARGIN = 1e-3

# Muckenhoupt supremum grid.
MUCKENHOUPT_Y_MIN = 1e-3
MUCKENHOUPT_Y_MAX = 1e3
MUCKENHOUPT_GRID_POINTS = 400
MUCKENHOUPT_EPS = 1e-2

# Weak rates.
G_BISECTION_TOL = 1e-10

# Monte Carlo.
MC_DEFAULT_SAMPLES = 1_000_000
MC_DEFAULT_BLOCKS = 10
MC_SIGMA = 3.0
GRADIENT_CHECK_POINTS = 100
GRADIENT_CHECK_RTOL = 1e-5
GOLDEN_TOL = 1e-8

# Provenance tags carried by every emitted number.
PROVENANCE_FORMULA = "paper-formula"
PROVENANCE_QUADRATURE = "quadrature"
PROVENANCE_MC = "MC"
PROVENANCE_FITTED = "fitted"

# CLI exit codes.
EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_CONFIG = 3

CSV_FLOAT_FORMAT = "{:.17g}"

ENV_OUTPUT_DIR = "HTI_OUTPUT_DIR"
ENV_LOG_LEVEL = "HTI_LOG_LEVEL"

# Command-line runs.
CLI_DUALITY_POINTS = 256
BOUNDARY_STEP = 1e-4
