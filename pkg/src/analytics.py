"""
analytics.py
------------
Closed-form side of the coin-toss π estimator.

The stopping time τ (first time heads outnumber tails) takes the values
2k+1 with probability

    P(τ = 2k+1) = C(2k, k) / (2 · 4^k · (k+1)),

which is a Catalan number over 2^(2k+1). Averaging H_τ/τ = (k+1)/(2k+1)
against this law gives ½·Σ C(2k,k)/(4^k (2k+1)) = ½·arcsin(1) = π/4, and
averaging 1/τ gives π/2 − 1. This module evaluates all of these:

1) `catalan`                     - exact Catalan numbers
2) `TauTable` / `tau_pmf`         - pmf, cdf and tail of τ by ratio recurrences
3) `fraction_mean_truncated`      - partial sums converging to π/4
4) `inv_tau_mean_truncated`       - partial sums converging to π/2 − 1
5) `arcsin_series`                - partial sums of the arcsine power series
6) `fraction_tail_bound` & co.    - proven remainder bounds
7) `exact_*`                      - the same quantities as exact rationals

Usage
-----
Example:
    from src.analytics import fraction_mean_truncated, fraction_tail_bound

    s = fraction_mean_truncated(10_000)
    assert math.pi / 4 - s <= fraction_tail_bound(10_000)

Notes
-----
- Series terms come from multiplicative recurrences evaluated with
  `np.cumprod`, which multiplies strictly left to right, so term k is the
  same float no matter how many terms are requested.
- Sums of more than `COMPENSATED_SUM_THRESHOLD` terms use `math.fsum`.
- A `TauTable` must have a single writer; read-only sharing is safe.
"""

from __future__ import annotations

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

# -------------------------------------------------------------------
# Third-Party Imports
# -------------------------------------------------------------------
import numpy as np
from scipy.special import beta

# -------------------------------------------------------------------
# Internal Imports
# -------------------------------------------------------------------
from src.logger import get_logger
from src.custom_exception import InvalidInputError
from config.experiment_params import (
    COMPENSATED_SUM_THRESHOLD,
    TABLE_INITIAL_TERMS,
    TABLE_MAX_TERMS,
)

# -------------------------------------------------------------------
# Logger Setup
# -------------------------------------------------------------------
logger = get_logger(__name__)

SERIES_TARGETS = ("pmf", "fraction-mean", "inv-tau-mean", "arcsine")


def _check_index(name: str, value: int, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidInputError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InvalidInputError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def _recurrence(first: float, ratios: np.ndarray) -> np.ndarray:
    """Return [first, first*r0, first*r0*r1, ...] multiplied left to right."""
    return np.cumprod(np.concatenate(([first], ratios)))


def _sum_terms(terms: np.ndarray) -> float:
    if len(terms) > COMPENSATED_SUM_THRESHOLD:
        return math.fsum(terms)
    return float(np.cumsum(terms)[-1])


# -------------------------------------------------------------------
# Function: catalan
# -------------------------------------------------------------------
def catalan(k: int) -> int:
    """
    Exact Catalan number C_k = C(2k, k) / (k+1).

    Parameters
    ----------
    k : int
        Non-negative index.

    Returns
    -------
    int
        Arbitrary-precision Catalan number.
    """
    k = _check_index("k", k)
    return math.comb(2 * k, k) // (k + 1)


# -------------------------------------------------------------------
# Far tail of τ
# -------------------------------------------------------------------
def tail_closed_form(k: int) -> float:
    """
    P(τ > 2k+1) = C(2k+2, k+1) / 4^(k+1) = B(k + 3/2, 1/2) / π.

    The beta-function form stays accurate for indices far beyond any
    table, which is what the far-tail sampler needs.
    """
    return float(beta(float(k) + 1.5, 0.5) / math.pi)


def _invert_far_tail(threshold: float, start: int) -> int:
    """Smallest k >= start with P(τ > 2k+1) < threshold, by integer bisection."""
    lo = max(start, 0)
    if tail_closed_form(lo) < threshold:
        return lo
    hi = max(2 * lo, 1)
    while tail_closed_form(hi) >= threshold:
        lo, hi = hi, 2 * hi
    # invariant: tail(lo) >= threshold > tail(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if tail_closed_form(mid) < threshold:
            hi = mid
        else:
            lo = mid
    return hi


# -------------------------------------------------------------------
# Class: TauTable
# -------------------------------------------------------------------
class TauTable:
    """
    Cached pmf, cdf and tail of τ, grown on demand by doubling.

    pmf[k] = P(τ = 2k+1) follows pmf[0] = 1/2, pmf[k+1] = pmf[k]·(2k+1)/(2k+4).
    tail[k] = P(τ > 2k+1) follows tail[0] = 1/2, tail[k+1] = tail[k]·(2k+3)/(2k+4).
    cdf[k] = 1 − tail[k].

    Parameters
    ----------
    max_terms : int
        Largest number of explicit entries. Sampling beyond it inverts the
        closed-form tail instead of growing the arrays.
    """

    built_via = "ratio-recurrence"

    def __init__(self, max_terms: int = TABLE_MAX_TERMS):
        self.max_terms = max(int(max_terms), TABLE_INITIAL_TERMS)
        self._pmf = np.array([0.5])
        self._tail = np.array([0.5])
        self._grow(TABLE_INITIAL_TERMS)

    def __len__(self) -> int:
        return len(self._pmf)

    @property
    def pmf(self) -> np.ndarray:
        return self._pmf

    @property
    def tail(self) -> np.ndarray:
        return self._tail

    @property
    def cdf(self) -> np.ndarray:
        return self._cdf

    def _grow(self, size: int) -> None:
        n = len(self._pmf)
        size = min(size, self.max_terms)
        if size <= n:
            return
        j = np.arange(n - 1, size - 1, dtype=np.float64)
        pmf_new = _recurrence(self._pmf[-1], (2 * j + 1) / (2 * j + 4))[1:]
        tail_new = _recurrence(self._tail[-1], (2 * j + 3) / (2 * j + 4))[1:]
        self._pmf = np.concatenate((self._pmf, pmf_new))
        self._tail = np.concatenate((self._tail, tail_new))
        self._cdf = 1.0 - self._tail
        logger.info(f"Tau table extended from {n} to {size} terms.")

    def extend_to(self, k: int) -> bool:
        """
        Make sure entries 0..k exist, doubling the table as needed.

        Returns
        -------
        bool
            False when k lies beyond `max_terms` and could not be tabulated.
        """
        while len(self) <= k and len(self) < self.max_terms:
            self._grow(2 * len(self))
        return k < len(self)

    def extend_past(self, u: float) -> None:
        """Grow until cdf[-1] > u or the size limit is reached."""
        while self._cdf[-1] <= u and len(self) < self.max_terms:
            self._grow(2 * len(self))

    def pmf_at(self, k: int) -> float:
        if self.extend_to(k):
            return float(self._pmf[k])
        return tail_closed_form(k - 1) / (2 * (k + 1))

    def tail_at(self, k: int) -> float:
        if self.extend_to(k):
            return float(self._tail[k])
        return tail_closed_form(k)

    # -------------------------------------------------------------------
    # Method: sample
    # -------------------------------------------------------------------
    def sample(self, u: float) -> int:
        """Smallest k with u < cdf[k]; see `sample_tau_direct`."""
        if not 0.0 <= u < 1.0:
            raise InvalidInputError(f"u must lie in [0, 1), got {u}")
        self.extend_past(u)
        if u < self._cdf[-1]:
            return int(np.searchsorted(self._cdf, u, side="right"))
        return _invert_far_tail(1.0 - u, len(self))

    def sample_many(self, u: np.ndarray) -> np.ndarray:
        """
        Vectorized `sample`.

        Returns an int64 array, or an object array of Python ints if a
        far-tail draw does not fit in 64 bits.
        """
        u = np.asarray(u, dtype=np.float64)
        if u.size == 0:
            return np.zeros(0, dtype=np.int64)
        if u.min() < 0.0 or u.max() >= 1.0:
            raise InvalidInputError("every u must lie in [0, 1)")
        self.extend_past(float(u.max()))
        k = np.searchsorted(self._cdf, u, side="right").astype(np.int64)
        far = np.flatnonzero(k == len(self))
        if far.size == 0:
            return k
        far_k = [_invert_far_tail(1.0 - float(u[i]), len(self)) for i in far]
        logger.info(f"{far.size} draw(s) resolved beyond the tau table.")
        if max(far_k) >= np.iinfo(np.int64).max // 4:
            k = k.astype(object)
        for i, value in zip(far, far_k):
            k[i] = value
        return k


# Shared read-mostly table used when callers do not supply their own.
DEFAULT_TABLE = TauTable()


# -------------------------------------------------------------------
# Functions: pmf, tail and direct sampling
# -------------------------------------------------------------------
def tau_pmf(k: int, table: Optional[TauTable] = None) -> float:
    """P(τ = 2k+1), from the ratio recurrence (no binomials)."""
    k = _check_index("k", k)
    return (table or DEFAULT_TABLE).pmf_at(k)


def tau_tail(k: int, table: Optional[TauTable] = None) -> float:
    """P(τ > 2k+1) = 1 − cdf[k]."""
    k = _check_index("k", k)
    return (table or DEFAULT_TABLE).tail_at(k)


def sample_tau_direct(u: float, table: Optional[TauTable] = None) -> int:
    """
    Inverse-cdf draw of k, where τ = 2k+1.

    Parameters
    ----------
    u : float
        Uniform value in [0, 1).
    table : TauTable, optional
        Table to read and extend; the module default otherwise.

    Returns
    -------
    int
        The smallest k with u < CDF(k).

    Raises
    ------
    InvalidInputError
        If u is outside [0, 1).
    """
    return (table or DEFAULT_TABLE).sample(float(u))


# -------------------------------------------------------------------
# Series terms
# -------------------------------------------------------------------
def _arcsin_ratios(K: int, x2: float) -> np.ndarray:
    n = np.arange(K, dtype=np.float64)
    ratios = (2 * n + 1) ** 2 / (2 * (n + 1) * (2 * n + 3))
    return ratios * x2 if x2 != 1.0 else ratios


def pmf_terms(K: int) -> np.ndarray:
    """pmf[0..K] by the same recurrence the table uses."""
    j = np.arange(K, dtype=np.float64)
    return _recurrence(0.5, (2 * j + 1) / (2 * j + 4))


def series_terms(target: str, K: int, x: float = 1.0) -> np.ndarray:
    """
    Terms 0..K of one of the series in `SERIES_TARGETS`.

    The fraction-mean terms are exactly half the arcsine terms at x = 1,
    since both come from the same recurrence started at 1/2 and 1.
    """
    K = _check_index("K", K)
    if target == "pmf":
        return pmf_terms(K)
    if target == "fraction-mean":
        return _recurrence(0.5, _arcsin_ratios(K, 1.0))
    if target == "inv-tau-mean":
        return pmf_terms(K) / (2 * np.arange(K + 1, dtype=np.float64) + 1)
    if target == "arcsine":
        x = float(x)
        if abs(x) > 1.0:
            raise InvalidInputError(f"|x| must be <= 1 for the arcsine series, got {x}")
        return _recurrence(x, _arcsin_ratios(K, x * x))
    raise InvalidInputError(f"Unknown series target {target!r}; expected one of {SERIES_TARGETS}")


@dataclass(frozen=True)
class SeriesState:
    """One row of a series evaluation: index, current term and partial sum."""

    k: int
    term: float
    partial_sum: float
    target: str


def iter_series(target: str, K: int, x: float = 1.0) -> Iterator[SeriesState]:
    """Yield the `SeriesState` after each of the terms 0..K."""
    terms = series_terms(target, K, x)
    partials = np.cumsum(terms)
    for k, (term, partial) in enumerate(zip(terms.tolist(), partials.tolist())):
        yield SeriesState(k=k, term=term, partial_sum=partial, target=target)


# -------------------------------------------------------------------
# Truncated expectations and the arcsine series
# -------------------------------------------------------------------
def fraction_mean_truncated(K: int) -> float:
    """
    Σ_{k=0..K} ½ · C(2k,k) / (4^k (2k+1)), increasing to π/4.

    Parameters
    ----------
    K : int
        Last index included.

    Returns
    -------
    float
        The partial sum.
    """
    return _sum_terms(series_terms("fraction-mean", K))


def inv_tau_mean_truncated(K: int) -> float:
    """Σ_{k=0..K} P(τ=2k+1)/(2k+1), increasing to π/2 − 1."""
    return _sum_terms(series_terms("inv-tau-mean", K))


def arcsin_series(x: float, K: int) -> float:
    """
    Partial sum through n = K of Σ C(2n,n)/4^n · x^(2n+1)/(2n+1).

    Raises
    ------
    InvalidInputError
        If |x| > 1.
    """
    return _sum_terms(series_terms("arcsine", K, x))


# -------------------------------------------------------------------
# Remainder bounds
# -------------------------------------------------------------------
def fraction_tail_bound(K: int) -> float:
    """
    Upper bound on π/4 − fraction_mean_truncated(K).

    From C(2k,k)/4^k <= 1/sqrt(πk) the remainder is below
    Σ_{k>K} k^(-3/2) / (4 sqrt(π)) <= 1 / (2 sqrt(πK)).
    """
    K = _check_index("K", K, minimum=1)
    return 1.0 / (2.0 * math.sqrt(math.pi * K))


def inv_tau_tail_bound(K: int) -> float:
    """Upper bound on (π/2 − 1) − inv_tau_mean_truncated(K): 1 / (6 sqrt(π) K^(3/2))."""
    K = _check_index("K", K, minimum=1)
    return 1.0 / (6.0 * math.sqrt(math.pi) * K**1.5)


def arcsin_tail_bound(x: float, K: int) -> float:
    """
    Upper bound on |arcsin(x) − arcsin_series(x, K)|.

    Geometric for |x| < 1; at |x| = 1 it is twice `fraction_tail_bound`.
    """
    x = abs(float(x))
    if x > 1.0:
        raise InvalidInputError(f"|x| must be <= 1 for the arcsine series, got {x}")
    if x == 1.0:
        return 2.0 * fraction_tail_bound(K)
    K = _check_index("K", K)
    return x ** (2 * K + 3) / ((1.0 - x * x) * (2 * K + 3) * math.sqrt(math.pi * (K + 1)))


# -------------------------------------------------------------------
# Exact rational forms
# -------------------------------------------------------------------
def exact_tau_pmf(k: int) -> Fraction:
    """P(τ = 2k+1) as an exact rational."""
    k = _check_index("k", k)
    return Fraction(math.comb(2 * k, k), 2 * 4**k * (k + 1))


def exact_tau_tail(k: int) -> Fraction:
    """P(τ > 2k+1) = C(2k+2, k+1) / 4^(k+1) as an exact rational."""
    k = _check_index("k", k)
    return Fraction(math.comb(2 * k + 2, k + 1), 4 ** (k + 1))


def exact_fraction_mean_truncated(K: int) -> Fraction:
    K = _check_index("K", K)
    return sum(
        (exact_tau_pmf(k) * Fraction(k + 1, 2 * k + 1) for k in range(K + 1)),
        Fraction(0),
    )


def exact_inv_tau_mean_truncated(K: int) -> Fraction:
    K = _check_index("K", K)
    return sum((exact_tau_pmf(k) / (2 * k + 1) for k in range(K + 1)), Fraction(0))

