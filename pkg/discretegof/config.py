"""
discretegof configuration and numerical constants

Defaults for simulation runs, tolerances and logging. Environment overrides
are read once at CLI start-up (after a .env file, if any, is loaded).
"""
import math
import os
import sys

# ============================================================================
# SIMULATION DEFAULTS
# ============================================================================

DEFAULT_SIMULATIONS = 100_000
DEFAULT_SEED = 0
DEFAULT_TRIALS = 10
MAX_SEED = 2**64 - 1

# Simulations are scheduled in fixed-size chunks; the partition never depends
# on the worker count, so hit counts are identical for any number of workers.
CHUNK_SIZE = 2048

# Hits count simulated values >= observed * (1 - TIE_RELATIVE_SLACK); exact
# ties that differ only by floating-point rounding still count as ties.
TIE_RELATIVE_SLACK = 64 * sys.float_info.epsilon

# ============================================================================
# TOLERANCES
# ============================================================================

PROBABILITY_ATOL = 1e-12
POISSON_TAIL_TOL = 1e-12
SPARSE_THRESHOLD = 10**6  # supports larger than this must be sparse
MAX_SUPPORT = 2**63 - 1  # draws are stored as int64
MAX_TOTAL_COUNT = 2**63 - 1  # n must fit an int64
DRAW_CHUNK_WORDS = 1 << 20  # uint32 words read per chunk of a binary draw file
HW_HAPLOTYPES = 9

# ============================================================================
# THEORY CHECKS
# ============================================================================

BRIDGE_CONSTANT = math.sqrt(math.pi / 2) * math.log(2)  # ~0.8687
BRIDGE_RELATIVE_TOL = 0.015
NULL_KS_ABS_TOL = 0.03
POWER_MEAN_RELATIVE_TOL = 0.02
SIGMA_BAND = 5.0
SPARSE_LIMIT_DEVIATION = 1e-3
SPARSE_LIMIT_MAX_RATIO = 1e-6
THEORY_TRIALS = 1000
RNG_SUPPORT = 2**32

# ============================================================================
# OUTPUT
# ============================================================================

JSON_SIGNIFICANT_DIGITS = 17
PERMUTATION_INLINE_LIMIT = 64  # trial records embed perms up to this size

# ============================================================================
# ENVIRONMENT / LOGGING
# ============================================================================

WORKERS_ENV = "DISCRETEGOF_WORKERS"
LOG_LEVEL_ENV = "LOG_LEVEL"
LOG_LEVEL = "WARNING"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

SUBCOMMANDS = ("test", "trials", "theory", "rng-uniform", "plot", "datasets")


def default_workers():
    """Worker count from the environment, else the CPU count."""
    raw = os.environ.get(WORKERS_ENV, "").strip().lower()
    if raw and raw != "auto":
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return os.cpu_count() or 1


def log_level():
    return os.environ.get(LOG_LEVEL_ENV, LOG_LEVEL).upper()


def get_default_run_config():
    """Get default settings for a new run."""
    return {
        "simulations": DEFAULT_SIMULATIONS,
        "seed": DEFAULT_SEED,
        "trials": DEFAULT_TRIALS,
        "workers": None,
        "statistics": ["ks", "euclidean"],
        "ordering": "canonical",
    }


def validate_run_config(config):
    """Validate run settings; returns a list of error messages."""
    errors = []

    if config.get("simulations", 0) < 1:
        errors.append("Number of simulations must be at least 1")

    seed = config.get("seed", 0)
    if not 0 <= seed <= MAX_SEED:
        errors.append(f"Seed must be between 0 and {MAX_SEED}")

    if config.get("trials", 1) < 1:
        errors.append("Trial count must be at least 1")

    workers = config.get("workers")
    if workers is not None and workers < 1:
        errors.append("Worker count must be at least 1")

    if config.get("subcommand", "test") not in SUBCOMMANDS:
        errors.append(f"Unknown command {config.get('subcommand')!r}")

    if not config.get("statistics"):
        errors.append("At least one statistic is required")

    return errors
