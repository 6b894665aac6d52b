"""
walk_sim.py
-----------
Trial engine for the coin-toss π estimator.

A trial tosses a fair coin until heads outnumber tails for the first
time and records the fraction of heads at that moment. Two ways of
producing trials are offered:

1) `run_trial_walk`   - literally flips coins, one bit per toss, up to a cap
2) `run_trial_direct` - draws τ from its known law by inverse cdf, since
                        H_τ = (τ+1)/2 is fixed once τ is known

plus Buffon's needle as a classical baseline (`buffon_trial`).

Randomness comes from a `BitSource`. `NumpyBitSource` wraps a Philox
generator seeded through `np.random.SeedSequence`; `spawn(*key)` derives
independent substreams, so trial chunk c, or repetition r of budget b,
always sees the same bits whatever the number of workers.

Usage
-----
Example:
    from src.walk_sim import NumpyBitSource, run_trial_walk

    bits = NumpyBitSource(seed=1).spawn(0)
    trial = run_trial_walk(bits, cap=2**24 - 1)
    print(trial.tau, trial.fraction)

Notes
-----
- A bit value of 1 is heads, 0 is tails.
- Uniforms are built from 53 consecutive bits, most significant first,
  so both trial methods consume the same stream abstraction.
"""

from __future__ import annotations

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

# -------------------------------------------------------------------
# Third-Party Imports
# -------------------------------------------------------------------
import numpy as np

# -------------------------------------------------------------------
# Internal Imports
# -------------------------------------------------------------------
from src.logger import get_logger
from src.custom_exception import BitSourceExhaustedError, InvalidInputError
from src.analytics import DEFAULT_TABLE, TauTable, sample_tau_direct
from config.experiment_params import (
    REFILL_BITS,
    UNIFORM_BITS,
    WALK_FIRST_BLOCK,
    WALK_MAX_BLOCK,
)

# -------------------------------------------------------------------
# Logger Setup
# -------------------------------------------------------------------
logger = get_logger(__name__)

_UNIFORM_WEIGHTS = np.ldexp(1.0, -np.arange(1, UNIFORM_BITS + 1))


# -------------------------------------------------------------------
# Bit sources
# -------------------------------------------------------------------
class BitSource(ABC):
    """
    Provider of independent fair bits.

    Subclasses implement `peek_bits`, `advance` and `spawn`; everything
    else (bit blocks, uniforms) is derived from those three.
    """

    @abstractmethod
    def peek_bits(self, n: int) -> np.ndarray:
        """Next n bits (uint8) without consuming them. Shorter only if exhausted."""

    @abstractmethod
    def advance(self, n: int) -> None:
        """Consume n bits."""

    @abstractmethod
    def spawn(self, *key: int) -> "BitSource":
        """Independent substream identified by an integer key path."""

    def take_bits(self, n: int) -> np.ndarray:
        bits = self.peek_bits(n).copy()
        if len(bits) < n:
            raise BitSourceExhaustedError(f"Requested {n} bits, only {len(bits)} left")
        self.advance(n)
        return bits

    def uniform53(self) -> float:
        """One uniform on [0, 1) with 53 bits of resolution."""
        return float(self.uniforms(1)[0])

    def uniforms(self, n: int) -> np.ndarray:
        """
        n uniforms on [0, 1), each from 53 consecutive bits.

        Every partial sum of distinct powers 2^-1..2^-53 is representable,
        so the dot product is exact regardless of summation order.
        """
        bits = self.take_bits(UNIFORM_BITS * n).reshape(n, UNIFORM_BITS)
        return bits.astype(np.float64) @ _UNIFORM_WEIGHTS


class NumpyBitSource(BitSource):
    """
    Seeded bit stream backed by a Philox counter-based generator.

    Parameters
    ----------
    seed : int
        Non-negative master seed.
    key : tuple of int, optional
        Substream path; `NumpyBitSource(s).spawn(3)` equals
        `NumpyBitSource(s, key=(3,))`.
    """

    def __init__(self, seed: int, key: Tuple[int, ...] = ()):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) or seed < 0:
            raise InvalidInputError(f"seed must be a non-negative integer, got {seed!r}")
        if any(int(part) < 0 for part in key):
            raise InvalidInputError(f"substream keys must be non-negative, got {key}")
        self.seed = int(seed)
        self.key = tuple(int(part) for part in key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.key)
        self._gen = np.random.Generator(np.random.Philox(sequence))
        self._buf = np.zeros(0, dtype=np.uint8)
        self._pos = 0

    def _refill(self, n: int) -> None:
        missing = n - (len(self._buf) - self._pos)
        # Whole 64-bit words only, so the stream does not depend on how reads are sized.
        n_bytes = -(-max(missing, REFILL_BITS) // 64) * 8
        fresh = np.unpackbits(np.frombuffer(self._gen.bytes(n_bytes), dtype=np.uint8))
        self._buf = np.concatenate((self._buf[self._pos:], fresh))
        self._pos = 0

    def peek_bits(self, n: int) -> np.ndarray:
        if len(self._buf) - self._pos < n:
            self._refill(n)
        return self._buf[self._pos:self._pos + n]

    def advance(self, n: int) -> None:
        if len(self._buf) - self._pos < n:
            self._refill(n)
        self._pos += n

    def spawn(self, *key: int) -> "NumpyBitSource":
        return NumpyBitSource(self.seed, self.key + tuple(key))

    def __repr__(self) -> str:
        return f"NumpyBitSource(seed={self.seed}, key={self.key})"


class SequenceBitSource(BitSource):
    """Replays a fixed bit sequence; used for scripted trials and oracle replay."""

    def __init__(self, bits: Iterable[int]):
        self._bits = np.asarray(list(bits), dtype=np.uint8)
        if self._bits.size and self._bits.max() > 1:
            raise InvalidInputError("bits must be 0 or 1")
        self._pos = 0

    @classmethod
    def from_flips(cls, flips: str) -> "SequenceBitSource":
        """Build from a string such as "THTHH" (H = heads = 1)."""
        flips = flips.replace(",", "").replace(" ", "").upper()
        if set(flips) - {"H", "T"}:
            raise InvalidInputError(f"flips must contain only H and T, got {flips!r}")
        return cls(1 if f == "H" else 0 for f in flips)

    @property
    def remaining(self) -> int:
        return len(self._bits) - self._pos

    def peek_bits(self, n: int) -> np.ndarray:
        return self._bits[self._pos:self._pos + n]

    def advance(self, n: int) -> None:
        if n > self.remaining:
            raise BitSourceExhaustedError(f"Cannot advance {n} bits, only {self.remaining} left")
        self._pos += n

    def spawn(self, *key: int) -> "SequenceBitSource":
        raise InvalidInputError("A scripted bit sequence has no substreams")


# -------------------------------------------------------------------
# Trial records
# -------------------------------------------------------------------
@dataclass(frozen=True)
class Trial:
    """
    One completed run of the stopping rule.

    Attributes
    ----------
    tau : int or None
        Flips until heads first outnumber tails; None when censored.
    heads : int
        Heads seen; (tau+1)/2 for a completed trial.
    fraction : float or None
        heads / tau, in (1/2, 1]; None when censored.
    censored : bool
        True when the cap was reached before the walk went positive.
    flips_consumed : int
        tau for a completed trial, the cap otherwise.
    """

    tau: Optional[int]
    heads: int
    fraction: Optional[float]
    censored: bool
    flips_consumed: int

    @classmethod
    def from_k(cls, k: int) -> "Trial":
        tau = 2 * k + 1
        return cls(tau=tau, heads=k + 1, fraction=(k + 1) / tau, censored=False, flips_consumed=tau)

    @classmethod
    def censored_at(cls, cap: int, heads: int) -> "Trial":
        return cls(tau=None, heads=heads, fraction=None, censored=True, flips_consumed=cap)

    @property
    def k(self) -> Optional[int]:
        return None if self.tau is None else (self.tau - 1) // 2

    @property
    def inv_tau(self) -> Optional[float]:
        return None if self.tau is None else 1.0 / self.tau


# -------------------------------------------------------------------
# Function: run_trial_walk
# -------------------------------------------------------------------
def run_trial_walk(bits: BitSource, cap: int) -> Trial:
    """
    Flip coins until S_n = H_n − T_n first exceeds 0, or until `cap` flips.

    Flips are examined in blocks (cumulative sums over a peeked window)
    and only the flips the trial actually used are consumed, so the next
    trial starts on the very next bit.

    Parameters
    ----------
    bits : BitSource
        Stream of coin flips.
    cap : int
        Maximum number of flips; must be >= 1.

    Returns
    -------
    Trial
        Completed trial with tau = n, or a censored trial with
        flips_consumed = cap.
    """
    if isinstance(cap, bool) or not isinstance(cap, (int, np.integer)) or cap < 1:
        raise InvalidInputError(f"cap must be a positive integer, got {cap!r}")

    position = 0
    flips = 0
    heads = 0
    block = WALK_FIRST_BLOCK
    while flips < cap:
        chunk = bits.peek_bits(min(block, cap - flips))
        if len(chunk) == 0:
            raise BitSourceExhaustedError(f"Bit source ran dry after {flips} flips")
        path = position + np.cumsum(2 * chunk.astype(np.int64) - 1)
        first = int(np.argmax(path > 0))
        if path[first] > 0:
            used = first + 1
            bits.advance(used)
            return Trial.from_k((flips + used - 1) // 2)

        bits.advance(len(chunk))
        flips += len(chunk)
        heads += int(chunk.sum())
        position = int(path[-1])
        block = min(2 * block, WALK_MAX_BLOCK)

    logger.info(f"Walk trial censored at cap={cap} (S={position}).")
    return Trial.censored_at(int(cap), heads)


# -------------------------------------------------------------------
# Direct method
# -------------------------------------------------------------------
def run_trial_direct(bits: BitSource, table: Optional[TauTable] = None) -> Trial:
    """Draw one uniform, invert the τ cdf, and build the implied trial."""
    k = sample_tau_direct(bits.uniform53(), table or DEFAULT_TABLE)
    return Trial.from_k(k)


def run_trials_direct(bits: BitSource, n: int, table: Optional[TauTable] = None) -> np.ndarray:
    """
    Vectorized `run_trial_direct`: the k values of n consecutive trials.

    Consumes exactly the bits that n calls of `run_trial_direct` would.
    """
    if n <= 0:
        return np.zeros(0, dtype=np.int64)
    return (table or DEFAULT_TABLE).sample_many(bits.uniforms(n))


# -------------------------------------------------------------------
# Buffon's needle baseline
# -------------------------------------------------------------------
@dataclass(frozen=True)
class NeedleDrop:
    """A dropped needle: distance from its centre to the nearest line, its angle, and whether it crosses."""

    center_offset: float
    angle: float
    crossed: bool

    @classmethod
    def from_geometry(cls, center_offset: float, angle: float, needle_len: float) -> "NeedleDrop":
        crossed = center_offset <= 0.5 * needle_len * math.sin(angle)
        return cls(center_offset=center_offset, angle=angle, crossed=bool(crossed))


def _check_needle(needle_len: float, spacing: float) -> None:
    if not 0.0 < needle_len <= spacing:
        raise InvalidInputError(
            f"Only short needles are supported: need 0 < needle_len <= spacing, "
            f"got needle_len={needle_len}, spacing={spacing}"
        )


def buffon_probability(needle_len: float, spacing: float) -> float:
    """Crossing probability 2L / (π d) of a short needle."""
    _check_needle(needle_len, spacing)
    return 2.0 * needle_len / (math.pi * spacing)


def buffon_trial(bits: BitSource, needle_len: float, spacing: float) -> NeedleDrop:
    """Drop one needle: offset uniform on [0, d/2], angle uniform on [0, π)."""
    _check_needle(needle_len, spacing)
    u_offset, u_angle = bits.uniforms(2)
    return NeedleDrop.from_geometry(u_offset * spacing / 2.0, u_angle * math.pi, needle_len)


def buffon_batch(bits: BitSource, n: int, needle_len: float, spacing: float) -> int:
    """Number of crossings among n drops, using the same bits as n `buffon_trial` calls."""
    _check_needle(needle_len, spacing)
    if n <= 0:
        return 0
    u = bits.uniforms(2 * n).reshape(n, 2)
    offsets = u[:, 0] * spacing / 2.0
    angles = u[:, 1] * math.pi
    return int(np.count_nonzero(offsets <= 0.5 * needle_len * np.sin(angles)))

