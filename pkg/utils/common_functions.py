"""
common_functions.py
-------------------
Shared helpers for configuration loading and result output.

This module provides:
1) `read_yaml`      - reads YAML configuration (defaults to `config/config.yaml`).
2) `canonical_json` - deterministic JSON text (sorted keys, fixed separators).
3) `checksum`       - SHA-256 of a result payload, recorded in run manifests.
4) `render_table`   - CSV text of a pandas DataFrame with a `# manifest:` header line.
5) `write_output`   - writes a result file plus its `.manifest.json` sidecar.
6) `load_table`     - reads a CSV written by `render_table` back into pandas.

The functions integrate with the project-wide logger and raise
`CustomException` for consistent, descriptive error handling.

Usage
-----
Example:
    from utils.common_functions import read_yaml, render_table

    cfg = read_yaml()  # uses CONFIG_PATH from config/paths_config.py
    text = render_table(df, manifest)

Notes
-----
- Default YAML path is imported from `config.paths_config.CONFIG_PATH`.
- Errors are logged and re-raised as `CustomException`.
"""

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
import hashlib
import json
import math
import os
import sys
from typing import Any, Dict, Optional

# -------------------------------------------------------------------
# Third-Party Imports
# -------------------------------------------------------------------
import numpy as np
import pandas as pd
import yaml

# -------------------------------------------------------------------
# Internal Imports
# -------------------------------------------------------------------
from src.logger import get_logger
from src.custom_exception import CustomException
from config.paths_config import CONFIG_PATH

# -------------------------------------------------------------------
# Logger Setup
# -------------------------------------------------------------------
logger = get_logger(__name__)

MANIFEST_PREFIX = "# manifest: "


# -------------------------------------------------------------------
# Function: read_yaml
# -------------------------------------------------------------------
def read_yaml(file_path: str = CONFIG_PATH) -> dict:
    """
    Read a YAML configuration file and return its contents as a dictionary.

    Parameters
    ----------
    file_path : str, optional
        Path to the YAML file. Defaults to `CONFIG_PATH` from
        `config.paths_config`.

    Returns
    -------
    dict
        Parsed YAML contents.

    Raises
    ------
    CustomException
        If the file does not exist or cannot be parsed.
    """
    try:
        if not os.path.exists(file_path):
            raise FileNotFoundError(f"Config file not found at path: {file_path}")

        with open(file_path, "r", encoding="utf-8") as f:
            cfg = yaml.safe_load(f) or {}
            logger.info(f"Successfully read YAML config: {file_path}")
            return cfg

    except Exception as e:
        logger.error(f"Error while reading YAML file '{file_path}': {e}")
        raise CustomException("Failed to read YAML configuration", sys) from e


# -------------------------------------------------------------------
# JSON helpers
# -------------------------------------------------------------------
def _plain(value: Any) -> Any:
    """Convert numpy scalars and non-finite floats into JSON-safe values."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def canonical_json(payload: Any, indent: Optional[int] = 2) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=indent, separators=(",", ": ") if indent else (",", ":"))


def checksum(payload: Any) -> str:
    """SHA-256 over the compact canonical JSON of `payload` (or over the text itself)."""
    text = payload if isinstance(payload, str) else canonical_json(payload, indent=None)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# -------------------------------------------------------------------
# Function: render_table
# -------------------------------------------------------------------
def render_table(df: pd.DataFrame, manifest: Dict[str, Any]) -> str:
    """
    Render `df` as CSV text preceded by one `# manifest: {...}` line.

    Floats are written with `repr` precision so reruns compare byte for byte.
    """
    body = df.to_csv(index=False, lineterminator="\n", float_format="%.17g")
    return f"{MANIFEST_PREFIX}{canonical_json(manifest, indent=None)}\n{body}"


def load_table(csv_path: str) -> pd.DataFrame:
    """
    Load a CSV written by `render_table` into a pandas DataFrame.

    Raises
    ------
    CustomException
        If the CSV cannot be read or parsed.
    """
    try:
        logger.info(f"Loading table from: {csv_path}")
        df = pd.read_csv(csv_path, comment="#")
        logger.info(f"Table loaded successfully: shape={df.shape}")
        return df

    except Exception as e:
        logger.error(f"Error while loading table from '{csv_path}': {e}")
        raise CustomException("Failed to load table", sys) from e


def read_manifest(csv_path: str) -> Dict[str, Any]:
    with open(csv_path, "r", encoding="utf-8") as f:
        first = f.readline()
    if not first.startswith(MANIFEST_PREFIX):
        raise CustomException(f"No manifest line in {csv_path}", sys)
    return json.loads(first[len(MANIFEST_PREFIX):])


# -------------------------------------------------------------------
# Function: write_output
# -------------------------------------------------------------------
def write_output(path: str, text: str, manifest: Dict[str, Any], wall_time: Optional[float] = None) -> str:
    """
    Write `text` to `path` and the manifest (plus wall time) to `path.manifest.json`.

    Returns
    -------
    str
        Path of the sidecar file.
    """
    sidecar = f"{path}.manifest.json"
    try:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        with open(sidecar, "w", encoding="utf-8") as f:
            f.write(canonical_json({**manifest, "wall_time_seconds": wall_time}) + "\n")
        logger.info(f"Wrote {path} and {sidecar}")
        return sidecar

    except Exception as e:
        logger.error(f"Error while writing output '{path}': {e}")
        raise CustomException("Failed to write output", sys) from e
