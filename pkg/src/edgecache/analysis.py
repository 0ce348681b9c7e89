"""Closed-form outage probabilities for partition-based cooperative delivery.

A request served from cache is transmitted cooperatively by the t_d edge
nodes holding each subfile; outage occurs when the worst subfile rate drops
below the target rate, which reduces to the event that the sum of the t_d
smallest of K independent unit-mean exponential channel gains falls below
the threshold (2^rate - 1) / power.  That sum is distributed as a linear
combination sum_k c_k Z_k of independent standard exponentials with
strictly decreasing weights c_k = (t_d - k + 1) / (K - k + 1) when t_d < K,
and as a Gamma(K, 1) variable when t_d = K.  This module evaluates both
branches, a small-threshold power-series path that avoids catastrophic
cancellation, the system-level average outage, and diversity-order
estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .config import PlacementPolicy, SystemConfig, db_to_linear
from .popularity import Popularity, miss_mass

__all__ = [
    "CancellationError",
    "SeriesConvergenceError",
    "PartitionCoefficients",
    "OutageQuery",
    "SeriesOutage",
    "OutageReport",
    "partition_coefficients",
    "divided_difference",
    "hypoexp_cdf",
    "gamma_sum_cdf",
    "outage_closed_form",
    "series_coefficient",
    "series_coefficient_exact",
    "outage_series",
    "weighted_system_outage",
    "system_outage",
    "outage_report",
    "diversity_fit",
    "hit_diversity",
    "system_diversity",
]

# Relative magnitude of the alternating-sum terms above which a double
# precision result is considered unreliable and the series path takes over.
DEFAULT_MAX_CONDITION = 1e12

# Power-series controls: stop once the next term is negligible relative to
# the partial sum, and never evaluate more than this many terms.
SERIES_RELATIVE_TOL = 1e-16
DEFAULT_TRUNCATION = 200


class CancellationError(ArithmeticError):
    """The alternating closed-form sum lost too many digits to cancellation."""


class SeriesConvergenceError(ArithmeticError):
    """The truncated series failed its relative-change convergence test."""


@dataclass(frozen=True)
class PartitionCoefficients:
    """Weights of the exponential mixture equivalent to the ordered-gain sum.

    coeffs[k-1] = (t_d - k + 1) / (K - k + 1); strictly decreasing and
    pairwise distinct whenever t_d < K, all equal to 1 when t_d = K.
    """

    coeffs: tuple[float, ...]
    k_ens: int
    t_d: int


@dataclass(frozen=True)
class OutageQuery:
    """A single outage evaluation point.

    power is linear transmit SNR (noise normalized to 1); rate is the target
    rate in bits/s/Hz.  threshold is the equivalent channel-gain threshold.
    """

    k_ens: int
    t_d: int
    power: float
    rate: float

    def __post_init__(self) -> None:
        if self.k_ens < 1:
            raise ValueError(f"k_ens must be >= 1, got {self.k_ens}")
        if not (1 <= self.t_d <= self.k_ens):
            raise ValueError(f"t_d must lie in [1, {self.k_ens}], got {self.t_d}")
        if not self.power > 0:
            raise ValueError(f"power must be positive, got {self.power}")
        if not (math.isfinite(self.rate) and self.rate > 0):
            raise ValueError(f"rate must be positive and finite, got {self.rate}")

    @property
    def threshold(self) -> float:
        return (2.0 ** self.rate - 1.0) / self.power


@dataclass(frozen=True)
class SeriesOutage:
    """Truncated-series outage value with its truncation error bound."""

    value: float
    error_bound: float
    terms: int


@dataclass(frozen=True)
class OutageReport:
    """Per-file and system outage across an SNR grid.

    per_file[d, s] is the outage probability of file d+1 at grid point s
    under the policy active at that point; files beyond the cached prefix
    are in outage with probability 1.  system is the popularity-weighted
    combination of per_file plus the cache-miss mass.
    """

    snr_db_grid: tuple[float, ...]
    per_file: np.ndarray
    system: np.ndarray
    policies: tuple[PlacementPolicy, ...]


def partition_coefficients(k_ens: int, t_d: int) -> PartitionCoefficients:
    """Exponential-mixture weights for replication degree t_d among K nodes."""
    if k_ens < 1:
        raise ValueError(f"k_ens must be >= 1, got {k_ens}")
    if not (1 <= t_d <= k_ens):
        raise ValueError(f"t_d must lie in [1, {k_ens}], got {t_d}")
    coeffs = tuple((t_d - k + 1) / (k_ens - k + 1) for k in range(1, t_d + 1))
    return PartitionCoefficients(coeffs=coeffs, k_ens=int(k_ens), t_d=int(t_d))


def divided_difference(nodes: Sequence[float], values: Sequence[float]) -> float:
    """Highest-order divided difference via the recursive difference table.

    Numerically gentler than the explicit partial-fraction expansion because
    intermediate entries stay near the scale of the data rather than of the
    reciprocal node gaps.
    """
    xs = [float(x) for x in nodes]
    fs = [float(v) for v in values]
    if len(xs) != len(fs) or not xs:
        raise ValueError("nodes and values must be nonempty and equally long")
    table = list(fs)
    n = len(xs)
    for order in range(1, n):
        for i in range(n - order):
            gap = xs[i + order] - xs[i]
            if gap == 0.0:
                raise ValueError("divided difference requires distinct nodes")
            table[i] = (table[i + 1] - table[i]) / gap
    return table[0]


def _coeff_values(coeffs) -> list[float]:
    raw = getattr(coeffs, "coeffs", coeffs)
    return [float(c) for c in raw]


def _partial_fraction_terms(c: list[float], threshold: float) -> list[float]:
    """Terms of sum_i c_i^(n-1)/prod_{j!=i}(c_i - c_j) * exp(-T/c_i)."""
    n = len(c)
    terms = []
    for i in range(n):
        denom = 1.0
        for j in range(n):
            if j != i:
                denom *= c[i] - c[j]
        terms.append(c[i] ** (n - 1) / denom * math.exp(-threshold / c[i]))
    return terms


def hypoexp_cdf(
    coeffs,
    threshold: float,
    *,
    max_condition: float = DEFAULT_MAX_CONDITION,
    method: str = "table",
) -> float:
    """CDF at `threshold` of a sum of exponentials with distinct scale weights.

    Accepts a PartitionCoefficients or any sequence of pairwise-distinct
    positive reals.  The default evaluation runs the recursive
    divided-difference table on the nodes (0, c_1, ..., c_n) of
    z^n * exp(-threshold/z); method="sum" uses the explicit partial-fraction
    expansion instead (retained as a cross-check).

    Raises CancellationError when the alternating sum's condition estimate
    (total term magnitude over result magnitude) exceeds max_condition;
    callers should switch to the series path in that regime.  Coincident
    weights are rejected: the all-equal case belongs to gamma_sum_cdf.
    """
    c = _coeff_values(coeffs)
    if not c:
        raise ValueError("coeffs must be nonempty")
    if any(x <= 0 for x in c):
        raise ValueError("all coefficients must be positive")
    for i in range(len(c)):
        for j in range(i + 1, len(c)):
            if abs(c[i] - c[j]) <= 1e-9 * max(abs(c[i]), abs(c[j])):
                raise ValueError(
                    "coincident coefficients: use gamma_sum_cdf for the all-equal case"
                )
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    if threshold == 0.0:
        return 0.0
    if method not in ("table", "sum"):
        raise ValueError(f"unknown method {method!r}")

    n = len(c)
    terms = _partial_fraction_terms(c, threshold)
    if method == "sum":
        value = 1.0 - math.fsum(terms)
    else:
        nodes = [0.0] + sorted(c)
        values = [0.0] + [z ** n * math.exp(-threshold / z) for z in sorted(c)]
        value = 1.0 - divided_difference(nodes, values)

    mass = 1.0 + math.fsum(abs(t) for t in terms)
    if value == 0.0 or not math.isfinite(value) or mass / abs(value) > max_condition:
        raise CancellationError(
            f"condition estimate {mass / abs(value) if value else math.inf:.3g} exceeds "
            f"{max_condition:.3g} at threshold {threshold:.3g}"
        )
    return min(1.0, max(0.0, value))


def gamma_sum_cdf(k_ens: int, threshold: float) -> float:
    """CDF at `threshold` of a sum of K independent standard exponentials.

    Evaluates the regularized lower incomplete gamma function at integer
    shape K: the ascending tail sum e^-T * sum_{i>=K} T^i/i! for small T
    (immune to cancellation), the complementary head sum otherwise.
    """
    if k_ens < 1:
        raise ValueError(f"k_ens must be >= 1, got {k_ens}")
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    if threshold == 0.0:
        return 0.0
    t = float(threshold)
    term = math.exp(-t)
    if term == 0.0:
        return 1.0
    if t < k_ens + 1:
        for i in range(1, k_ens + 1):
            term *= t / i
        acc = 0.0
        i = k_ens
        while True:
            acc += term
            i += 1
            term *= t / i
            if term <= SERIES_RELATIVE_TOL * acc:
                break
        return min(1.0, acc)
    acc = term
    for i in range(1, k_ens):
        term *= t / i
        acc += term
    return min(1.0, max(0.0, 1.0 - acc))


def outage_closed_form(
    q: OutageQuery, *, max_condition: float = DEFAULT_MAX_CONDITION
) -> float:
    """Outage probability of a file replicated on t_d of the K edge nodes.

    Dispatches to the distinct-weight exponential-mixture CDF for t_d < K and
    to the Gamma(K, 1) CDF for t_d = K; falls back to the truncated series
    when the closed form loses too much precision to cancellation.
    """
    t1 = q.threshold
    if q.t_d == q.k_ens:
        return gamma_sum_cdf(q.k_ens, t1)
    coeffs = partition_coefficients(q.k_ens, q.t_d)
    try:
        return hypoexp_cdf(coeffs, t1, max_condition=max_condition)
    except CancellationError:
        return outage_series(q).value


@lru_cache(maxsize=None)
def series_coefficient_exact(k_ens: int, t_d: int, m: int) -> Fraction:
    """Exact rational power-series coefficient of the small-threshold expansion.

    Equals (-1)^m/m! * sum_i c_i^(t_d-1-m)/prod_{j!=i}(c_i - c_j) over the
    partition weights; identically 1 at m=0, 0 for 1 <= m <= t_d-1, and
    nonzero at m = t_d, which pins the outage decay exponent.
    """
    if k_ens < 1:
        raise ValueError(f"k_ens must be >= 1, got {k_ens}")
    if not (1 <= t_d < k_ens):
        raise ValueError(
            f"t_d must lie in [1, K); the t_d = K branch has its own expansion"
        )
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    c = [Fraction(t_d - k + 1, k_ens - k + 1) for k in range(1, t_d + 1)]
    acc = Fraction(0)
    for i in range(t_d):
        denom = Fraction(1)
        for j in range(t_d):
            if j != i:
                denom *= c[i] - c[j]
        acc += c[i] ** (t_d - 1 - m) / denom
    return Fraction((-1) ** m, math.factorial(m)) * acc


def series_coefficient(k_ens: int, t_d: int, m: int) -> float:
    """Float value of the exact rational series coefficient."""
    return float(series_coefficient_exact(k_ens, t_d, m))


def outage_series(q: OutageQuery, truncation: int = DEFAULT_TRUNCATION) -> SeriesOutage:
    """Small-threshold power-series outage, valid for thresholds below 1.

    For t_d < K sums -f(t_d, m) * T^m from m = t_d; for t_d = K sums the
    Gamma tail e^-T * T^i/i! from i = K.  Stops once the next term is
    negligible relative to the partial sum and reports a geometric bound on
    the truncation error; raises SeriesConvergenceError if the cap is hit
    before the relative-change test passes.
    """
    t1 = q.threshold
    if t1 >= 1.0:
        raise ValueError(f"series path requires threshold < 1, got {t1}")
    if truncation < q.t_d + 2:
        raise ValueError(f"truncation must be >= t_d + 2, got {truncation}")
    if t1 == 0.0:
        return SeriesOutage(value=0.0, error_bound=0.0, terms=0)

    if q.t_d == q.k_ens:
        k = q.k_ens
        term = math.exp(-t1)
        for i in range(1, k + 1):
            term *= t1 / i
        acc = 0.0
        count = 0
        for m in range(k, truncation + 1):
            acc += term
            count += 1
            term *= t1 / (m + 1)
            if abs(term) <= SERIES_RELATIVE_TOL * abs(acc):
                ratio = t1 / (m + 2)
                return SeriesOutage(
                    value=min(1.0, acc),
                    error_bound=abs(term) / (1.0 - ratio),
                    terms=count,
                )
        raise SeriesConvergenceError(
            f"no convergence within {truncation} terms at threshold {t1:.3g}"
        )

    scale = q.k_ens - q.t_d + 1  # reciprocal of the smallest mixture weight
    power_t1 = t1 ** q.t_d
    acc = 0.0
    count = 0
    for m in range(q.t_d, truncation + 1):
        acc += -series_coefficient(q.k_ens, q.t_d, m) * power_t1
        count += 1
        power_t1 *= t1
        nxt = abs(series_coefficient(q.k_ens, q.t_d, m + 1)) * power_t1
        if nxt <= SERIES_RELATIVE_TOL * abs(acc):
            ratio = scale * t1 / (m + 2)
            bound = nxt / (1.0 - ratio) if ratio < 1.0 else math.inf
            return SeriesOutage(
                value=min(1.0, max(0.0, acc)), error_bound=bound, terms=count
            )
    raise SeriesConvergenceError(
        f"no convergence within {truncation} terms at threshold {t1:.3g}"
    )


def weighted_system_outage(
    pop: Popularity,
    t_vector: Sequence[int],
    outage_by_degree: dict[int, float],
) -> float:
    """Popularity-weighted hit outage plus miss mass for a raw degree vector.

    Shared by system_outage and the placement optimizer so both evaluate the
    objective with identical arithmetic.  t_vector need not be sorted; entry
    d applies to the d-th most popular file.
    """
    n0 = len(t_vector)
    hit = sum(float(pop.probs[d]) * outage_by_degree[t_vector[d]] for d in range(n0))
    return hit + miss_mass(pop, n0)


def system_outage(config: SystemConfig, policy: PlacementPolicy, pop: Popularity) -> float:
    """Average outage over file requests: weighted cache-hit outage plus miss mass."""
    policy.validate(config)
    if pop.n_files != config.n_files:
        raise ValueError("popularity and config disagree on library size")
    power = db_to_linear(config.snr_point)
    by_degree = {
        t: outage_closed_form(OutageQuery(config.k_ens, t, power, config.rate))
        for t in set(policy.t)
    }
    return weighted_system_outage(pop, policy.t, by_degree)


def outage_report(
    config: SystemConfig,
    pop: Popularity,
    policies: Sequence[PlacementPolicy],
) -> OutageReport:
    """Evaluate per-file and system outage across the config's SNR grid.

    policies supplies one policy per grid point (a single policy is
    broadcast across the grid).  Files beyond a point's cached prefix get
    per-file outage 1.
    """
    grid = config.snr_grid
    pols = tuple(policies)
    if len(pols) == 1:
        pols = pols * len(grid)
    if len(pols) != len(grid):
        raise ValueError(
            f"need one policy per grid point: {len(pols)} policies, {len(grid)} points"
        )
    n = config.n_files
    per_file = np.ones((n, len(grid)), dtype=np.float64)
    system = np.empty(len(grid), dtype=np.float64)
    for s, (snr_db, policy) in enumerate(zip(grid, pols)):
        policy.validate(config)
        power = db_to_linear(snr_db)
        by_degree = {
            t: outage_closed_form(OutageQuery(config.k_ens, t, power, config.rate))
            for t in set(policy.t)
        }
        for d in range(policy.n0):
            per_file[d, s] = by_degree[policy.t[d]]
        system[s] = weighted_system_outage(pop, policy.t, by_degree)
    return OutageReport(
        snr_db_grid=tuple(float(x) for x in grid),
        per_file=per_file,
        system=system,
        policies=pols,
    )


def diversity_fit(snr_db_grid: Sequence[float], outage_values: Sequence[float]) -> float:
    """Decay exponent of outage versus SNR: negated log-log least-squares slope.

    The grid should sit in the asymptotic (high-SNR) regime for the fit to
    estimate the true diversity order; that is the caller's responsibility.
    """
    snr_db = np.asarray(snr_db_grid, dtype=np.float64)
    out = np.asarray(outage_values, dtype=np.float64)
    if snr_db.ndim != 1 or snr_db.size < 2 or out.shape != snr_db.shape:
        raise ValueError("need >= 2 grid points with matching outage values")
    if np.any(out <= 0.0):
        raise ValueError("outage values must be positive for a log-log fit")
    log_power = snr_db / 10.0  # log10 of linear SNR
    slope = np.polyfit(log_power, np.log10(out), 1)[0]
    return float(-slope)


def hit_diversity(policy: PlacementPolicy) -> int:
    """Worst-case decay exponent over cached files: the smallest replication degree."""
    if policy.n0 == 0:
        return 0
    return min(policy.t)


def system_diversity(policy: PlacementPolicy, n_files: int) -> int:
    """System-level decay exponent: 0 if any file is uncached, else min replication."""
    if policy.n0 < n_files:
        return 0
    return min(policy.t)
