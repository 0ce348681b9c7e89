"""Zipf file-request popularity and its tail (cache-miss) mass."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Popularity:
    """Request probability over an N-file library, most popular first.

    Invariants (enforced at construction): probs sums to 1, is nonincreasing,
    and every entry lies in (0, 1].
    """

    probs: np.ndarray
    rho: float
    n_files: int

    def __post_init__(self) -> None:
        probs = np.asarray(self.probs, dtype=np.float64)
        object.__setattr__(self, "probs", probs)
        if probs.ndim != 1 or probs.size != self.n_files:
            raise ValueError("probs must be a vector of length n_files")
        if abs(float(probs.sum()) - 1.0) > 1e-12:
            raise ValueError("probs must sum to 1")
        if np.any(probs <= 0.0) or np.any(probs > 1.0):
            raise ValueError("every probability must lie in (0, 1]")
        if np.any(np.diff(probs) > 0.0):
            raise ValueError("probs must be nonincreasing")


def zipf_popularity(n_files: int, rho: float) -> Popularity:
    """Zipf request distribution: p_i proportional to i^(-rho) over ranks 1..N.

    The normalizer is computed by direct summation in double precision; at the
    library sizes supported here (N <= 1e5) this is exact to rounding and
    avoids any zeta-function approximation.
    """
    if n_files < 1:
        raise ValueError(f"n_files must be >= 1, got {n_files}")
    if not math.isfinite(rho):
        raise ValueError(f"rho must be finite, got {rho}")
    if rho < 0:
        raise ValueError(f"rho must be >= 0, got {rho}")
    ranks = np.arange(1, n_files + 1, dtype=np.float64)
    weights = ranks ** (-float(rho))
    probs = weights / weights.sum()
    return Popularity(probs=probs, rho=float(rho), n_files=int(n_files))


def miss_mass(pop: Popularity, n0: int) -> float:
    """Probability that a request falls outside the cached prefix {1..n0}."""
    if not (0 <= n0 <= pop.n_files):
        raise ValueError(f"n0 must lie in [0, {pop.n_files}], got {n0}")
    if n0 == 0:
        return 1.0
    if n0 == pop.n_files:
        return 0.0
    return float(pop.probs[n0:].sum())
