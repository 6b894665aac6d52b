"""
experiment_params.py
--------------------
Fixed constants of the coin-toss π experiments.

Values here are not meant to be tuned per run (those live in
`config/config.yaml`); they pin down the conventions every module
shares: the default walk cap, the published 10,000-flip result, the
statistical gate widths and the enumeration limits.

Usage
-----
Example:
    from config.experiment_params import DEFAULT_CAP, PARKER_FLIPS
"""

import math

# -------------------------------------------------------------------
# 🪙 WALK SIMULATION
# -------------------------------------------------------------------
DEFAULT_CAP = 2**24 - 1                 # Walk trials stop here and count as censored
UNIFORM_BITS = 53                       # Bits per uniform draw
REFILL_BITS = 1 << 16                   # Bits generated per buffer refill
WALK_FIRST_BLOCK = 64                   # First block of flips examined per trial
WALK_MAX_BLOCK = 1 << 16                # Largest block of flips examined at once
TAU_HISTOGRAM_DEPTH = 16                # Summaries count tau = 2k+1 for k < depth

# -------------------------------------------------------------------
# 🧮 ANALYTICS
# -------------------------------------------------------------------
COMPENSATED_SUM_THRESHOLD = 10**5       # Above this many terms, sums use math.fsum
TABLE_INITIAL_TERMS = 1024
TABLE_MAX_TERMS = 1 << 20

# -------------------------------------------------------------------
# 🔍 ORACLE
# -------------------------------------------------------------------
ORACLE_MAX_LEN = 25
BRUTE_FORCE_MAX_LEN = 15
ORACLE_FLOAT_TOLERANCE = 1e-13
ORACLE_SPLIT_DEPTH = 4                  # Prefix length used to split pruned enumeration

# -------------------------------------------------------------------
# 📈 EXPERIMENTS
# -------------------------------------------------------------------
PI = math.pi
PARKER_FLIPS = 10_000
PARKER_ESTIMATE = 3.2266
PARKER_ABS_ERROR = abs(PARKER_ESTIMATE - PI)
PARKER_MIN_REPS = 100
CONVERGENCE_MIN_BUDGETS = 4
CONVERGENCE_MIN_DECADES = 3
CONVERGENCE_MIN_REPS = 30
BOUNDS_MIN_TRIALS = 10**5
GATE_SIGMAS = 4.0
AGREEMENT_SIGMAS = 5.0
SECONDS_PER_YEAR = 365.25 * 24 * 3600
