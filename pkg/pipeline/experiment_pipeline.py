"""
experiment_pipeline.py
----------------------
Unified entrypoint that reproduces every coin-toss π result end to end.

This script runs the stages below in order, each with its defaults from
`config/config.yaml`, and writes every result (plus its manifest sidecar)
under `artifacts/`:
  1. Oracle cross-check of the closed forms
  2. Exact series table
  3. Monte Carlo estimate
  4. Convergence-rate study
  5. 10,000-flip replication
  6. Bounds demonstration
  7. Buffon's needle baseline

Stages go through `src.cli.main`, so pipeline artifacts are identical to
what the matching `coin-pi` subcommands write with `--out`.

Usage
-----
    python -m pipeline.experiment_pipeline
"""

# -------------------------------------------------------------------
# Imports
# -------------------------------------------------------------------
import sys

from src.cli import EXIT_OK, main
from src.logger import get_logger
from config.paths_config import (
    BOUNDS_PATH,
    BUFFON_PATH,
    CONVERGENCE_PATH,
    EXACT_TABLE_PATH,
    ORACLE_REPORT_PATH,
    PARKER_PATH,
    SIMULATE_SUMMARY_PATH,
)

logger = get_logger(__name__)

STAGES = [
    ("oracle", ["oracle", "--out", ORACLE_REPORT_PATH]),
    ("exact", ["exact", "--format", "csv", "--out", EXACT_TABLE_PATH]),
    ("simulate", ["simulate", "--format", "json", "--out", SIMULATE_SUMMARY_PATH]),
    ("converge", ["converge", "--out", CONVERGENCE_PATH]),
    ("parker", ["parker", "--out", PARKER_PATH]),
    ("bounds", ["bounds", "--out", BOUNDS_PATH]),
    ("buffon", ["buffon", "--out", BUFFON_PATH]),
]


def run_pipeline(extra_args=()) -> int:
    """Run every stage; stop at the first one that fails and return its exit code."""
    for name, argv in STAGES:
        logger.info(f"Pipeline stage '{name}' started")
        code = main([*argv, *extra_args])
        if code != EXIT_OK:
            logger.error(f"Pipeline stage '{name}' failed with exit code {code}")
            return code
        logger.info(f"Pipeline stage '{name}' completed")
    return EXIT_OK


# -------------------------------------------------------------------
# Pipeline Orchestration
# -------------------------------------------------------------------
if __name__ == "__main__":
    sys.exit(run_pipeline(sys.argv[1:]))
