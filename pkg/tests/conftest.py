import os
import tempfile

# Keep test runs from writing into the project's logs/ directory.
os.environ.setdefault("COIN_PI_LOG_DIR", tempfile.mkdtemp(prefix="coin-pi-logs-"))

import pytest

from src.walk_sim import NumpyBitSource, SequenceBitSource


@pytest.fixture
def bits():
    return NumpyBitSource(seed=12345)


@pytest.fixture
def flips():
    """Factory for scripted coin sequences, e.g. flips("THH")."""
    return SequenceBitSource.from_flips
