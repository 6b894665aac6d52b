"""
logger.py
----------------
Logging setup shared by the simulator, the exact calculators and the
experiment drivers.

Records go to one file per day. Nothing is written to stdout or stderr
by the logging system, so the CLI can print JSON or CSV results and
stay byte-comparable between runs.

Usage
-----
    from src.logger import get_logger

    logger = get_logger(__name__)
    logger.info("estimate_pi: method=%s trials=%d", "direct", 10000)

Notes
-----
- File: `<log dir>/log_YYYY-MM-DD.log`, log dir `logs/` by default.
- `COIN_PI_LOG_DIR` moves the log directory (the test suite points it at a tempdir).
- `COIN_PI_LOG_LEVEL` overrides the INFO default, e.g. `WARNING` for quiet batch runs.
"""

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
import logging
import os
from datetime import date

# -------------------------------------------------------------------
# Settings
# -------------------------------------------------------------------
LOGS_DIR = os.environ.get("COIN_PI_LOG_DIR", "logs")
LOG_LEVEL = logging.getLevelName(os.environ.get("COIN_PI_LOG_LEVEL", "INFO").upper())
if not isinstance(LOG_LEVEL, int):
    LOG_LEVEL = logging.INFO

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(name)s - %(message)s"
LOG_FILE = os.path.join(LOGS_DIR, f"log_{date.today():%Y-%m-%d}.log")

os.makedirs(LOGS_DIR, exist_ok=True)
logging.basicConfig(filename=LOG_FILE, format=LOG_FORMAT, level=LOG_LEVEL)


def get_logger(name: str) -> logging.Logger:
    """Named logger at the project level; pass `__name__`."""
    logger = logging.getLogger(name)
    logger.setLevel(LOG_LEVEL)
    return logger
