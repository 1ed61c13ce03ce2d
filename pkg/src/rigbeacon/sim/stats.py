"""Pearson chi-square test for uniformity over ``[0, m)``."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np
from scipy.stats import chi2

from ..errors import InvalidParameters

# upper 1% points of the chi-square distribution, from standard tables
CRITICAL_AT_001 = {1: 6.635, 3: 11.345, 7: 18.475, 15: 30.578, 31: 52.191}


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    critical: float
    df: int
    alpha: float
    passed: bool
    counts: tuple[int, ...]

    @property
    def n(self) -> int:
        return sum(self.counts)


def bucket_counts(samples: Iterable[int], m: int) -> np.ndarray:
    arr = np.fromiter(samples, dtype=np.int64)
    if arr.size == 0:
        raise InvalidParameters("no samples")
    if arr.min() < 0 or arr.max() >= m:
        raise InvalidParameters(f"samples must lie in [0, {m})")
    return np.bincount(arr, minlength=m)


def chi_square_statistic(counts: Iterable[int]) -> Fraction:
    """Exact ``sum (O_j - E)^2 / E`` with ``E = N / m``."""
    counts = [int(c) for c in counts]
    n, m = sum(counts), len(counts)
    expected = Fraction(n, m)
    return sum((Fraction(c) - expected) ** 2 for c in counts) / expected


def critical_value(m: int, alpha: float = 0.01) -> float:
    if not 0 < alpha < 1:
        raise InvalidParameters(f"alpha must lie in (0, 1), got {alpha}")
    return float(chi2.ppf(1 - alpha, m - 1))


def chi_square_uniformity(samples: Iterable[int], m: int, alpha: float = 0.01) -> ChiSquareResult:
    if m < 2:
        raise InvalidParameters(f"need at least 2 buckets, got {m}")
    counts = bucket_counts(samples, m)
    stat = float(chi_square_statistic(counts))
    crit = critical_value(m, alpha)
    return ChiSquareResult(stat, crit, m - 1, alpha, stat < crit, tuple(int(c) for c in counts))
