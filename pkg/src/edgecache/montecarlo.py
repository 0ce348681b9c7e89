"""Stochastic oracles for the outage formulas, built on counter-based RNG.

Every estimator draws its randomness from Philox streams keyed by
(seed, block index, stream tag), where a block is a fixed-size run of
trials.  Trial i's draws therefore depend only on the seed and i, never on
scheduling or on the total trial count, so estimates are bit-reproducible
and blocks could run on any number of workers with a plain counting
reduction.

Standard exponential channel gains are sampled as -ln(U) with U uniform in
(0, 1] (U = 0 excluded by construction from numpy's [0, 1) uniforms).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

import numpy as np

from .analysis import OutageQuery
from .config import PlacementPolicy, SystemConfig, db_to_linear
from .popularity import Popularity

__all__ = [
    "McEstimate",
    "ChannelDraw",
    "mc_outage",
    "mc_outage_subsets",
    "mc_system_outage",
    "outage_indicators",
    "subset_outage_indicators",
    "sample_ordered_renyi",
    "sample_channel",
    "SUBSET_ENUMERATION_LIMIT",
]

BLOCK_TRIALS = 1 << 16

# Literal subset enumeration is quadratic in practice; refuse absurd fan-out.
SUBSET_ENUMERATION_LIMIT = 10_000

_MASK64 = (1 << 64) - 1

# Stream tags keep logically distinct draws (channel magnitudes, phases,
# request selection) on non-overlapping Philox keys.
_STREAM_CHANNEL = 0
_STREAM_PHASE = 1


@dataclass(frozen=True)
class McEstimate:
    """Bernoulli Monte Carlo estimate with its binomial standard error."""

    mean: float
    std_error: float
    trials: int
    seed: int


@dataclass(frozen=True)
class ChannelDraw:
    """One realization of the K complex fading gains, each CN(0, 1)."""

    gains: np.ndarray


def _block_rng(seed: int, block: int, stream: int) -> np.random.Generator:
    key = (int(seed) & _MASK64) | (block << 64) | (stream << 96)
    return np.random.Generator(np.random.Philox(key=key))


def _iter_blocks(trials: int) -> Iterator[tuple[int, int]]:
    """Yield (block index, rows in block) covering `trials` trials."""
    full, rem = divmod(trials, BLOCK_TRIALS)
    for b in range(full):
        yield b, BLOCK_TRIALS
    if rem:
        yield full, rem


def _exponential_block(seed: int, block: int, rows: int, width: int,
                       stream: int = _STREAM_CHANNEL) -> np.ndarray:
    """(rows, width) matrix of standard exponentials for one trial block."""
    u = _block_rng(seed, block, stream).random((rows, width))
    return -np.log1p(-u)


def _check_trials_seed(trials: int, seed: int) -> None:
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if not isinstance(seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {type(seed).__name__}")


def _estimate(hits: int, trials: int, seed: int) -> McEstimate:
    mean = hits / trials
    return McEstimate(
        mean=mean,
        std_error=math.sqrt(mean * (1.0 - mean) / trials),
        trials=trials,
        seed=int(seed),
    )


def _iter_outage_indicator_blocks(q: OutageQuery, trials: int, seed: int
                                  ) -> Iterator[np.ndarray]:
    t1 = q.threshold
    for block, rows in _iter_blocks(trials):
        x = _exponential_block(seed, block, rows, q.k_ens)
        x.sort(axis=1)
        yield x[:, : q.t_d].sum(axis=1) < t1


def mc_outage(q: OutageQuery, trials: int, seed: int) -> McEstimate:
    """Estimate outage by definition: sum of the t_d smallest of K gains vs threshold."""
    _check_trials_seed(trials, seed)
    hits = sum(int(np.count_nonzero(ind))
               for ind in _iter_outage_indicator_blocks(q, trials, seed))
    return _estimate(hits, trials, seed)


def outage_indicators(q: OutageQuery, trials: int, seed: int) -> np.ndarray:
    """Per-trial outage indicators of mc_outage (bool vector of length trials)."""
    _check_trials_seed(trials, seed)
    return np.concatenate(list(_iter_outage_indicator_blocks(q, trials, seed)))


def _complex_gains(seed: int, block: int, rows: int, k_ens: int
                   ) -> tuple[np.ndarray, np.ndarray]:
    """Complex CN(0,1) gains whose squared magnitudes come from the channel stream.

    Returns (gains, magnitudes_squared).  Magnitudes squared are the exact
    exponential draws of the channel stream, so paths built on either
    representation see bit-identical channel energies.
    """
    magsq = _exponential_block(seed, block, rows, k_ens)
    phases = 2.0 * np.pi * _block_rng(seed, block, _STREAM_PHASE).random((rows, k_ens))
    gains = np.sqrt(magsq) * np.exp(1j * phases)
    return gains, magsq


def _iter_subset_indicator_blocks(q: OutageQuery, trials: int, seed: int
                                  ) -> Iterator[np.ndarray]:
    subsets = list(combinations(range(q.k_ens), q.t_d))
    idx = np.array(subsets, dtype=np.intp)
    for block, rows in _iter_blocks(trials):
        _, magsq = _complex_gains(seed, block, rows, q.k_ens)
        # (rows, n_subsets): cooperative sum-of-gain power per caching subset
        subset_power = magsq[:, idx].sum(axis=2)
        rates = np.log2(1.0 + subset_power * q.power)
        yield rates.min(axis=1) < q.rate


def mc_outage_subsets(q: OutageQuery, trials: int, seed: int) -> McEstimate:
    """Estimate outage by literal enumeration of every caching subset's rate.

    Statistically identical to mc_outage (the minimum cooperative rate is
    attained by the t_d weakest gains); kept as a structural cross-check.
    """
    _check_trials_seed(trials, seed)
    n_subsets = math.comb(q.k_ens, q.t_d)
    if n_subsets > SUBSET_ENUMERATION_LIMIT:
        raise ValueError(
            f"C({q.k_ens}, {q.t_d}) = {n_subsets} subsets exceeds the "
            f"enumeration limit of {SUBSET_ENUMERATION_LIMIT}"
        )
    hits = sum(int(np.count_nonzero(ind))
               for ind in _iter_subset_indicator_blocks(q, trials, seed))
    return _estimate(hits, trials, seed)


def subset_outage_indicators(q: OutageQuery, trials: int, seed: int) -> np.ndarray:
    """Per-trial outage indicators of mc_outage_subsets."""
    _check_trials_seed(trials, seed)
    n_subsets = math.comb(q.k_ens, q.t_d)
    if n_subsets > SUBSET_ENUMERATION_LIMIT:
        raise ValueError(
            f"C({q.k_ens}, {q.t_d}) = {n_subsets} subsets exceeds the "
            f"enumeration limit of {SUBSET_ENUMERATION_LIMIT}"
        )
    return np.concatenate(list(_iter_subset_indicator_blocks(q, trials, seed)))


def mc_system_outage(config: SystemConfig, policy: PlacementPolicy,
                     pop: Popularity, trials: int, seed: int) -> McEstimate:
    """End-to-end system estimate: draw a request, miss counts as outage,
    hits get a fresh channel draw against their replication degree."""
    _check_trials_seed(trials, seed)
    policy.validate(config)
    if pop.n_files != config.n_files:
        raise ValueError("popularity and config disagree on library size")
    power = db_to_linear(config.snr_point)
    t1 = (2.0 ** config.rate - 1.0) / power
    cum = np.cumsum(pop.probs)
    n = config.n_files
    t_arr = np.zeros(n, dtype=np.intp)
    t_arr[: policy.n0] = policy.t

    hits = 0
    for block, rows in _iter_blocks(trials):
        u = _block_rng(seed, block, _STREAM_CHANNEL).random((rows, 1 + config.k_ens))
        requested = np.minimum(np.searchsorted(cum, 1.0 - u[:, 0], side="left"), n - 1)
        x = -np.log1p(-u[:, 1:])
        x.sort(axis=1)
        partial = np.cumsum(x, axis=1)
        miss = requested >= policy.n0
        degree = t_arr[requested]  # 0 on miss rows; their comparison is ORed away
        hit_outage = partial[np.arange(rows), degree - 1] < t1
        hits += int(np.count_nonzero(miss | hit_outage))
    return _estimate(hits, trials, seed)


def sample_ordered_renyi(k_ens: int, seed: int, size: int | None = None) -> np.ndarray:
    """Ordered exponential sample built from independent spacings.

    The k-th smallest of K standard exponentials equals the cumulative sum
    of independent exponentials scaled by 1/(K - i + 1); the output is
    sorted ascending by construction.  Returns shape (K,) or (size, K).
    """
    if k_ens < 1:
        raise ValueError(f"k_ens must be >= 1, got {k_ens}")
    _check_trials_seed(size if size is not None else 1, seed)
    n = 1 if size is None else size
    weights = 1.0 / np.arange(k_ens, 0, -1, dtype=np.float64)
    out = np.empty((n, k_ens), dtype=np.float64)
    row = 0
    for block, rows in _iter_blocks(n):
        z = _exponential_block(seed, block, rows, k_ens)
        out[row: row + rows] = np.cumsum(z * weights, axis=1)
        row += rows
    return out[0] if size is None else out


def sample_channel(k_ens: int, seed: int, size: int | None = None):
    """Complex CN(0,1) channel draws; one ChannelDraw, or (size, K) gains."""
    if k_ens < 1:
        raise ValueError(f"k_ens must be >= 1, got {k_ens}")
    _check_trials_seed(size if size is not None else 1, seed)
    n = 1 if size is None else size
    out = np.empty((n, k_ens), dtype=np.complex128)
    row = 0
    for block, rows in _iter_blocks(n):
        gains, _ = _complex_gains(seed, block, rows, k_ens)
        out[row: row + rows] = gains
        row += rows
    return ChannelDraw(gains=out[0]) if size is None else out
