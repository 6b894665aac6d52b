"""
paths_config.py
---------------
Centralised file path configuration for the coin-toss π project.

Usage
-----
Example:
    from config.paths_config import CONFIG_PATH, EXPERIMENTS_DIR

Notes
-----
- All paths are relative to the project root.
- Output directories are created by the writers in
  `utils.common_functions`, not on import.
"""

import os

# -------------------------------------------------------------------
# ⚙️ CONFIGURATION
# -------------------------------------------------------------------
CONFIG_DIR = os.path.dirname(os.path.abspath(__file__))
CONFIG_PATH = os.path.join(CONFIG_DIR, "config.yaml")

# -------------------------------------------------------------------
# 🪙 SIMULATION OUTPUTS
# -------------------------------------------------------------------
ARTIFACTS_DIR = "artifacts"
SIMULATE_DIR = os.path.join(ARTIFACTS_DIR, "simulate")
SIMULATE_SUMMARY_PATH = os.path.join(SIMULATE_DIR, "summary.json")
EXACT_TABLE_PATH = os.path.join(SIMULATE_DIR, "exact_series.csv")

# -------------------------------------------------------------------
# 🔍 ORACLE OUTPUTS
# -------------------------------------------------------------------
ORACLE_DIR = os.path.join(ARTIFACTS_DIR, "oracle")
ORACLE_REPORT_PATH = os.path.join(ORACLE_DIR, "oracle_report.json")

# -------------------------------------------------------------------
# 📈 EXPERIMENT OUTPUTS
# -------------------------------------------------------------------
EXPERIMENTS_DIR = os.path.join(ARTIFACTS_DIR, "experiments")
CONVERGENCE_PATH = os.path.join(EXPERIMENTS_DIR, "convergence.csv")
PARKER_PATH = os.path.join(EXPERIMENTS_DIR, "parker.csv")
BOUNDS_PATH = os.path.join(EXPERIMENTS_DIR, "bounds.json")
BUFFON_PATH = os.path.join(EXPERIMENTS_DIR, "buffon.csv")
