"""Cache-placement search: minimize average system outage under the budget.

The decision variables are how many files to cache (n0) and each cached
file's replication degree t_i in [1, K], subject to sum(t_i) <= M*K.  The
search space is the set of nonincreasing integer vectors (replication
should follow popularity order), enumerated depth-first with budget
pruning; permutation-complete enumeration is available behind a flag as a
soundness check of that restriction.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .analysis import (
    OutageQuery,
    OutageReport,
    outage_closed_form,
    outage_report,
    weighted_system_outage,
)
from .config import PlacementPolicy, SystemConfig, db_to_linear
from .popularity import Popularity, zipf_popularity

__all__ = [
    "OptimizationResult",
    "enumerate_policies",
    "baseline_policies",
    "optimize_placement",
    "optimize_baseline",
    "optimize_sweep",
    "uniform_demand_hit_diversity",
    "full_cooperation_baseline",
]

# Two objectives within this relative distance are treated as tied and
# resolved deterministically (larger n0, then lexicographically larger t).
TIE_RELATIVE_TOL = 1e-15


@dataclass(frozen=True)
class OptimizationResult:
    """Best policy found for one SNR point, with the search effort spent."""

    best: PlacementPolicy
    objective: float
    explored: int
    snr_db: float


def _nonincreasing_vectors(n_files: int, k_ens: int, budget: int
                           ) -> Iterator[tuple[int, ...]]:
    """All nonincreasing vectors with 1..n_files entries in [1, k_ens], sum <= budget."""

    def descend(prefix: tuple[int, ...], last: int, remaining: int):
        for v in range(min(last, remaining), 0, -1):
            cur = prefix + (v,)
            yield cur
            if len(cur) < n_files and remaining - v >= 1:
                yield from descend(cur, v, remaining - v)

    yield from descend((), k_ens, budget)


def _all_vectors(n_files: int, k_ens: int, budget: int) -> Iterator[tuple[int, ...]]:
    """Permutation-complete enumeration (no monotonicity pruning)."""
    for n0 in range(1, min(n_files, budget) + 1):
        for tvec in itertools.product(range(1, k_ens + 1), repeat=n0):
            if sum(tvec) <= budget:
                yield tvec


def enumerate_policies(config: SystemConfig) -> Iterator[PlacementPolicy]:
    """Every budget-feasible canonical policy, each exactly once."""
    budget = config.cache_size * config.k_ens
    for tvec in _nonincreasing_vectors(config.n_files, config.k_ens, budget):
        yield PlacementPolicy(n0=len(tvec), t=tvec)


def baseline_policies(config: SystemConfig) -> Iterator[PlacementPolicy]:
    """The all-or-split reference family: every replication degree is 1 or K."""
    k, n = config.k_ens, config.n_files
    budget = config.cache_size * k
    if k == 1:
        for n0 in range(1, min(n, budget) + 1):
            yield PlacementPolicy(n0=n0, t=(1,) * n0)
        return
    for full in range(0, min(n, budget // k) + 1):
        for split in range(0, min(n - full, budget - full * k) + 1):
            if full + split == 0:
                continue
            yield PlacementPolicy(n0=full + split, t=(k,) * full + (1,) * split)


def _outage_by_degree(config: SystemConfig, power: float) -> dict[int, float]:
    return {
        t: outage_closed_form(OutageQuery(config.k_ens, t, power, config.rate))
        for t in range(1, config.k_ens + 1)
    }


def _select_best(pop: Popularity, by_degree: dict[int, float],
                 vectors: Iterator[tuple[int, ...]]) -> tuple[tuple[int, ...], float, int]:
    best_t: tuple[int, ...] | None = None
    best_obj = float("inf")
    explored = 0
    for tvec in vectors:
        explored += 1
        obj = weighted_system_outage(pop, tvec, by_degree)
        if best_t is None:
            best_t, best_obj = tvec, obj
            continue
        tol = TIE_RELATIVE_TOL * max(abs(obj), abs(best_obj))
        if obj < best_obj - tol:
            best_t, best_obj = tvec, obj
        elif abs(obj - best_obj) <= tol:
            if (len(tvec), tvec) > (len(best_t), best_t):
                best_t, best_obj = tvec, obj
    if best_t is None:
        raise ValueError("no feasible policy")
    return best_t, best_obj, explored


def optimize_placement(config: SystemConfig, *, full_enumeration: bool = False
                       ) -> OptimizationResult:
    """Exhaustive minimization of average system outage at a single SNR point.

    At most K distinct outage values exist per point, so they are memoized
    once and every candidate costs only a weighted sum.  Ties are broken
    toward larger n0, then lexicographically larger t, for reproducible
    tables.
    """
    snr_db = config.snr_point
    power = db_to_linear(snr_db)
    pop = zipf_popularity(config.n_files, config.rho)
    by_degree = _outage_by_degree(config, power)
    budget = config.cache_size * config.k_ens
    if full_enumeration:
        vectors = _all_vectors(config.n_files, config.k_ens, budget)
    else:
        vectors = _nonincreasing_vectors(config.n_files, config.k_ens, budget)
    best_t, best_obj, explored = _select_best(pop, by_degree, vectors)
    return OptimizationResult(
        best=PlacementPolicy(n0=len(best_t), t=best_t),
        objective=best_obj,
        explored=explored,
        snr_db=snr_db,
    )


def optimize_baseline(config: SystemConfig) -> OptimizationResult:
    """Best policy within the all-or-split reference family at one SNR point."""
    snr_db = config.snr_point
    power = db_to_linear(snr_db)
    pop = zipf_popularity(config.n_files, config.rho)
    by_degree = _outage_by_degree(config, power)
    vectors = (p.t for p in baseline_policies(config))
    best_t, best_obj, explored = _select_best(pop, by_degree, vectors)
    return OptimizationResult(
        best=PlacementPolicy(n0=len(best_t), t=best_t),
        objective=best_obj,
        explored=explored,
        snr_db=snr_db,
    )


def optimize_sweep(config: SystemConfig, *, full_enumeration: bool = False
                   ) -> list[OptimizationResult]:
    """optimize_placement at every point of the config's SNR grid."""
    return [
        optimize_placement(config.at_snr(s), full_enumeration=full_enumeration)
        for s in config.snr_grid
    ]


def uniform_demand_hit_diversity(config: SystemConfig, n0: int) -> float:
    """Cache-hit decay exponent under uniform demand with equal splitting.

    With n0 equally popular cached files the budget spreads evenly, so the
    worst replication degree is min(M*K/n0, K).
    """
    if not (1 <= n0 <= config.n_files):
        raise ValueError(f"n0 must lie in [1, {config.n_files}], got {n0}")
    return min(config.cache_size * config.k_ens / n0, float(config.k_ens))


def full_cooperation_baseline(config: SystemConfig) -> OutageReport:
    """Best achievable outage per grid point when every degree is 1 or K.

    The reference scheme either caches a file everywhere (degree K) or
    splits it without overlap (degree 1); its optimum upper-bounds the
    unrestricted scheme at every SNR because its feasible set is contained
    in the unrestricted one.
    """
    pop = zipf_popularity(config.n_files, config.rho)
    policies = [
        optimize_baseline(config.at_snr(s)).best for s in config.snr_grid
    ]
    return outage_report(config, pop, policies)
