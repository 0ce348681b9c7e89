"""Independent reference implementations used as test oracles.

Deliberately separate from the package: extended-precision partial
fractions via mpmath, exact rational series coefficients via fractions,
sort-based Monte Carlo via numpy's default generator, and a
partition-counting recurrence.  None of these share code with the paths
they check.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

import mpmath as mp
import numpy as np

# Deep-outage checks subtract terms of magnitude up to ~1e7 to resolve
# probabilities below 1e-60; 150 digits leaves ample headroom.
mp.mp.dps = 150


def exact_coeffs(k_ens: int, t_d: int) -> list[Fraction]:
    return [Fraction(t_d - k + 1, k_ens - k + 1) for k in range(1, t_d + 1)]


def hypoexp_cdf_mp(coeffs, threshold) -> mp.mpf:
    """Partial-fraction CDF evaluated at 60 decimal digits."""
    cs = [mp.mpf(c.numerator) / c.denominator if isinstance(c, Fraction) else mp.mpf(c)
          for c in coeffs]
    n = len(cs)
    acc = mp.mpf(0)
    for i in range(n):
        prod = mp.mpf(1)
        for j in range(n):
            if j != i:
                prod *= cs[i] - cs[j]
        acc += cs[i] ** (n - 1) / prod * mp.e ** (-mp.mpf(threshold) / cs[i])
    return 1 - acc


def gamma_sum_cdf_mp(k_ens: int, threshold) -> mp.mpf:
    t = mp.mpf(threshold)
    head = sum(t ** i / mp.factorial(i) for i in range(k_ens))
    return 1 - mp.e ** (-t) * head


def outage_mp(k_ens: int, t_d: int, power, rate=1) -> mp.mpf:
    t1 = (mp.mpf(2) ** rate - 1) / power
    if t_d == k_ens:
        return gamma_sum_cdf_mp(k_ens, t1)
    return hypoexp_cdf_mp(exact_coeffs(k_ens, t_d), t1)


def sort_based_partial_sums(k_ens: int, t_d: int, draws: int, seed: int) -> np.ndarray:
    """Sum of the t_d smallest of K standard exponentials, sampled by sorting."""
    rng = np.random.default_rng(seed)
    x = rng.exponential(size=(draws, k_ens))
    x.sort(axis=1)
    return x[:, :t_d].sum(axis=1)


@lru_cache(maxsize=None)
def partitions_at_most(total: int, parts: int, largest: int) -> int:
    """Number of partitions of `total` into at most `parts` parts, each <= largest."""
    if total == 0:
        return 1
    if parts == 0 or largest == 0:
        return 0
    count = 0
    for first in range(1, min(largest, total) + 1):
        count += partitions_at_most(total - first, parts - 1, first)
    return count


def feasible_policy_count(n_files: int, k_ens: int, budget: int) -> int:
    """Partitions of every j in 1..budget into at most N parts each <= K."""
    return sum(partitions_at_most(j, n_files, k_ens) for j in range(1, budget + 1))


def divided_difference_det_ratio(nodes, values) -> float:
    """Determinant-ratio form of the highest divided difference.

    Ratio of the Vandermonde determinant with its last column replaced by
    the function values to the plain Vandermonde determinant.
    """
    xs = np.asarray(nodes, dtype=np.float64)
    fs = np.asarray(values, dtype=np.float64)
    r = len(xs) - 1
    a = np.vander(xs, r + 1, increasing=True).astype(np.float64)
    a[:, -1] = fs
    b = np.vander(xs, r + 1, increasing=True).astype(np.float64)
    return float(np.linalg.det(a) / np.linalg.det(b))
