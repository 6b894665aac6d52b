"""
oracle.py
---------
Exhaustive, exact-rational enumeration of coin sequences.

The oracle is independent ground truth for the analytics module: it
walks every sequence of up to L flips, classifies each by the time the
walk S_n = H_n − T_n first reaches +1, and accumulates the resulting
probabilities as exact fractions with power-of-two denominators.

Two enumerations are provided:

1) pruned  - walks the prefix tree and stops descending at first passage;
             the tree is split on its first few flips and the subtrees can
             run on separate workers (merged by exact addition)
2) brute   - scans all 2^L sequences; kept for L <= 15 as a check on (1)

Usage
-----
Example:
    from src.oracle import enumerate_first_passage, oracle_vs_analytics

    report = enumerate_first_passage(21)
    assert report.counts[10] == 16796
    oracle_vs_analytics(21)   # raises InvariantViolationError on mismatch
"""

from __future__ import annotations

# -------------------------------------------------------------------
# Standard Library Imports
# -------------------------------------------------------------------
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Tuple

# -------------------------------------------------------------------
# Third-Party Imports
# -------------------------------------------------------------------
import numpy as np
from joblib import Parallel, delayed

# -------------------------------------------------------------------
# Internal Imports
# -------------------------------------------------------------------
from src.logger import get_logger
from src.custom_exception import InvalidInputError, InvariantViolationError
from src.analytics import (
    catalan,
    exact_fraction_mean_truncated,
    exact_inv_tau_mean_truncated,
    exact_tau_pmf,
    exact_tau_tail,
    fraction_mean_truncated,
    inv_tau_mean_truncated,
    tau_pmf,
)
from config.experiment_params import (
    BRUTE_FORCE_MAX_LEN,
    ORACLE_FLOAT_TOLERANCE,
    ORACLE_MAX_LEN,
    ORACLE_SPLIT_DEPTH,
)

# -------------------------------------------------------------------
# Logger Setup
# -------------------------------------------------------------------
logger = get_logger(__name__)


def rational_str(value: Fraction) -> str:
    """Format a rational as "p/q", including integers ("1/1")."""
    return f"{value.numerator}/{value.denominator}"


# -------------------------------------------------------------------
# Class: OracleReport
# -------------------------------------------------------------------
@dataclass(frozen=True)
class OracleReport:
    """
    Exact first-passage statistics for all sequences of length <= max_len.

    Attributes
    ----------
    max_len : int
        Odd length bound L.
    counts : dict
        k -> number of first-passage paths of length 2k+1.
    truncated_fraction_mean : Fraction
        Σ_{2k+1<=L} P(τ=2k+1)·(k+1)/(2k+1).
    truncated_inv_tau_mean : Fraction
        Σ_{2k+1<=L} P(τ=2k+1)/(2k+1).
    mass_accounted : Fraction
        Σ_{2k+1<=L} P(τ=2k+1), which is below 1.
    """

    max_len: int
    counts: Dict[int, int]
    truncated_fraction_mean: Fraction
    truncated_inv_tau_mean: Fraction
    mass_accounted: Fraction
    method: str = field(default="pruned", compare=False)

    @classmethod
    def from_counts(cls, max_len: int, counts: Dict[int, int], method: str) -> "OracleReport":
        counts = {k: int(counts.get(k, 0)) for k in range((max_len - 1) // 2 + 1)}
        fraction_mean = Fraction(0)
        inv_tau_mean = Fraction(0)
        mass = Fraction(0)
        for k, count in counts.items():
            probability = Fraction(count, 2 ** (2 * k + 1))
            mass += probability
            fraction_mean += probability * Fraction(k + 1, 2 * k + 1)
            inv_tau_mean += probability / (2 * k + 1)
        return cls(
            max_len=max_len,
            counts=counts,
            truncated_fraction_mean=fraction_mean,
            truncated_inv_tau_mean=inv_tau_mean,
            mass_accounted=mass,
            method=method,
        )

    def probability(self, k: int) -> Fraction:
        return Fraction(self.counts[k], 2 ** (2 * k + 1))

    def to_dict(self) -> dict:
        return {
            "max_len": self.max_len,
            "method": self.method,
            "counts": {str(k): str(c) for k, c in self.counts.items()},
            "truncated_fraction_mean": rational_str(self.truncated_fraction_mean),
            "truncated_inv_tau_mean": rational_str(self.truncated_inv_tau_mean),
            "mass_accounted": rational_str(self.mass_accounted),
        }


# -------------------------------------------------------------------
# Enumeration helpers
# -------------------------------------------------------------------
def _check_length(L: int, limit: int = ORACLE_MAX_LEN) -> int:
    if isinstance(L, bool) or not isinstance(L, (int, np.integer)):
        raise InvalidInputError(f"L must be an integer, got {L!r}")
    if L < 1 or L % 2 == 0:
        raise InvalidInputError(f"L must be a positive odd integer, got {L}")
    if L > limit:
        raise InvalidInputError(f"L must be <= {limit}, got {L}")
    return int(L)


def _prefix_roots(depth: int) -> Tuple[Dict[int, int], List[int]]:
    """
    Walk the prefix tree down to `depth` flips.

    Returns the first passages found on the way and the walk position at
    the end of every prefix still alive (each one roots a subtree).
    """
    early: Dict[int, int] = {}
    roots: List[int] = []
    stack = [(0, 0)]
    while stack:
        length, position = stack.pop()
        if length == depth:
            roots.append(position)
            continue
        for step in (1, -1):
            nxt = position + step
            if nxt > 0:
                early[length // 2] = early.get(length // 2, 0) + 1
            else:
                stack.append((length + 1, nxt))
    return early, sorted(roots)


def _enumerate_subtree(position: int, depth: int, L: int) -> Dict[int, int]:
    """First-passage counts below one alive prefix, one frontier level at a time."""
    counts: Dict[int, int] = {}
    frontier = np.array([position], dtype=np.int8)
    for n in range(depth + 1, L + 1):
        nxt = np.concatenate((frontier + 1, frontier - 1))
        alive = nxt <= 0
        hits = int(nxt.size - np.count_nonzero(alive))
        if hits:
            counts[(n - 1) // 2] = hits
        frontier = nxt[alive]
    return counts


def _enumerate_pruned(L: int, n_jobs: int) -> Dict[int, int]:
    depth = min(ORACLE_SPLIT_DEPTH, L)
    counts, roots = _prefix_roots(depth)
    subtree_counts = Parallel(n_jobs=n_jobs)(
        delayed(_enumerate_subtree)(position, depth, L) for position in roots
    )
    for partial in subtree_counts:
        for k, c in partial.items():
            counts[k] = counts.get(k, 0) + c
    return counts


def _enumerate_brute(L: int) -> Dict[int, int]:
    """Classify all 2^L sequences; bit j of the sequence index is flip j."""
    sequences = np.arange(2**L, dtype=np.int64)
    bits = (sequences[:, None] >> np.arange(L, dtype=np.int64)) & 1
    paths = np.cumsum(2 * bits - 1, axis=1)
    positive = paths > 0
    reached = positive.any(axis=1)
    lengths = positive.argmax(axis=1)[reached] + 1
    counts: Dict[int, int] = {}
    for n, c in zip(*np.unique(lengths, return_counts=True)):
        # every path of length n is the prefix of 2^(L-n) sequences
        counts[(int(n) - 1) // 2] = int(c) >> (L - int(n))
    return counts


# -------------------------------------------------------------------
# Function: enumerate_first_passage
# -------------------------------------------------------------------
def enumerate_first_passage(L: int, method: str = "pruned", n_jobs: int = 1) -> OracleReport:
    """
    Exact first-passage report over all sequences of at most L flips.

    Parameters
    ----------
    L : int
        Odd length bound, at most 25 (15 for the brute-force scan).
    method : {"pruned", "brute"}
        Enumeration strategy.
    n_jobs : int
        Workers for the pruned subtrees; the result does not depend on it.

    Returns
    -------
    OracleReport

    Raises
    ------
    InvalidInputError
        If L is even, non-positive or too large, or the method is unknown.
    """
    if method == "pruned":
        L = _check_length(L)
        counts = _enumerate_pruned(L, n_jobs)
    elif method == "brute":
        L = _check_length(L, BRUTE_FORCE_MAX_LEN)
        counts = _enumerate_brute(L)
    else:
        raise InvalidInputError(f"Unknown enumeration method {method!r}")

    report = OracleReport.from_counts(L, counts, method)
    logger.info(f"Enumerated first passages up to L={L} ({method}): {report.counts}")
    return report


def iter_first_passage_paths(L: int) -> Iterator[Tuple[int, ...]]:
    """Yield every first-passage path of length <= L as a tuple of bits (1 = heads)."""
    L = _check_length(L)

    def descend(prefix: Tuple[int, ...], position: int) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == L:
            return
        for bit in (1, 0):
            nxt = position + (1 if bit else -1)
            if nxt > 0:
                yield prefix + (bit,)
            else:
                yield from descend(prefix + (bit,), nxt)

    yield from descend((), 0)


# -------------------------------------------------------------------
# Cross-validation against analytics
# -------------------------------------------------------------------
@dataclass
class OracleComparison:
    """Result of `oracle_vs_analytics`: per-k residuals and the checks that failed."""

    report: OracleReport
    residuals: List[dict]
    fraction_mean_residual: float
    inv_tau_mean_residual: float
    mismatches: List[str]

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "report": self.report.to_dict(),
            "residuals": self.residuals,
            "fraction_mean_residual": self.fraction_mean_residual,
            "inv_tau_mean_residual": self.inv_tau_mean_residual,
            "passed": self.passed,
            "mismatches": self.mismatches,
        }


def oracle_vs_analytics(L: int, n_jobs: int = 1) -> OracleComparison:
    """
    Compare the oracle with analytics, exactly and in floating point.

    Exact checks: counts equal Catalan numbers, probabilities equal
    C(2k,k)/(2·4^k(k+1)), truncated means equal the exact partial sums at
    K = (L−1)/2, and the accounted mass equals 1 − P(τ > L). Floating
    checks: every residual against the float analytics is within 1e-13.

    Raises
    ------
    InvariantViolationError
        If any check fails; the comparison is attached as `record`.
    """
    report = enumerate_first_passage(L, n_jobs=n_jobs)
    K = (report.max_len - 1) // 2
    mismatches: List[str] = []
    residuals: List[dict] = []

    for k in range(K + 1):
        count = report.counts[k]
        probability = report.probability(k)
        residual = float(probability) - tau_pmf(k)
        residuals.append({
            "k": k,
            "count": str(count),
            "catalan": str(catalan(k)),
            "probability": rational_str(probability),
            "residual": residual,
        })
        if count != catalan(k):
            mismatches.append(f"count[{k}]={count} differs from catalan({k})={catalan(k)}")
        if probability != exact_tau_pmf(k):
            mismatches.append(f"P(tau={2 * k + 1}) differs from the closed form")
        if abs(residual) > ORACLE_FLOAT_TOLERANCE:
            mismatches.append(f"float pmf residual {residual:.3e} at k={k}")

    if report.truncated_fraction_mean != exact_fraction_mean_truncated(K):
        mismatches.append("truncated fraction mean differs from the exact partial sum")
    if report.truncated_inv_tau_mean != exact_inv_tau_mean_truncated(K):
        mismatches.append("truncated 1/tau mean differs from the exact partial sum")
    if report.mass_accounted != 1 - exact_tau_tail(K):
        mismatches.append("accounted mass differs from 1 - P(tau > L)")

    fraction_residual = float(report.truncated_fraction_mean) - fraction_mean_truncated(K)
    inv_tau_residual = float(report.truncated_inv_tau_mean) - inv_tau_mean_truncated(K)
    if abs(fraction_residual) > ORACLE_FLOAT_TOLERANCE:
        mismatches.append(f"float fraction mean residual {fraction_residual:.3e}")
    if abs(inv_tau_residual) > ORACLE_FLOAT_TOLERANCE:
        mismatches.append(f"float 1/tau mean residual {inv_tau_residual:.3e}")

    comparison = OracleComparison(
        report=report,
        residuals=residuals,
        fraction_mean_residual=fraction_residual,
        inv_tau_mean_residual=inv_tau_residual,
        mismatches=mismatches,
    )
    if mismatches:
        logger.error(f"Oracle/analytics mismatch at L={L}: {mismatches}")
        raise InvariantViolationError(f"Oracle disagrees with analytics at L={L}", record=comparison)

    logger.info(f"Oracle agrees with analytics at L={L}.")
    return comparison
