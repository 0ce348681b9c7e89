"""Network configuration and cache-placement policy types shared across modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class ConfigError(ValueError):
    """Invalid network configuration or placement policy."""


def db_to_linear(snr_db: float) -> float:
    """Convert an SNR in dB to linear scale (noise power normalized to 1)."""
    return 10.0 ** (float(snr_db) / 10.0)


def linear_to_db(snr_linear: float) -> float:
    if snr_linear <= 0:
        raise ValueError("linear SNR must be positive")
    return 10.0 * math.log10(snr_linear)


@dataclass(frozen=True)
class SystemConfig:
    """Parameters of a K-edge-node, N-file caching network.

    snr_db may be a single evaluation point (float) or a grid (tuple of
    floats).  All internal computations use linear SNR; conversion happens
    through db_to_linear at the boundary.
    """

    k_ens: int
    n_files: int
    cache_size: int          # per-node cache capacity, in whole files
    rho: float               # Zipf skewness of the request distribution
    rate: float = 1.0        # target rate in bits/s/Hz
    snr_db: float | tuple[float, ...] = 10.0

    def __post_init__(self) -> None:
        if self.k_ens < 1:
            raise ConfigError(f"k_ens must be >= 1, got {self.k_ens}")
        if self.n_files < 1:
            raise ConfigError(f"n_files must be >= 1, got {self.n_files}")
        if not (1 <= self.cache_size < self.n_files):
            raise ConfigError(
                f"cache_size must satisfy 1 <= M < N, got M={self.cache_size}, N={self.n_files}"
            )
        if not (math.isfinite(self.rho) and self.rho >= 0.0):
            raise ConfigError(f"rho must be finite and >= 0, got {self.rho}")
        if not self.rate > 0:
            raise ConfigError(f"rate must be positive, got {self.rate}")
        if isinstance(self.snr_db, (list, tuple)):
            if len(self.snr_db) == 0:
                raise ConfigError("snr_db grid must be nonempty")
            object.__setattr__(self, "snr_db", tuple(float(x) for x in self.snr_db))
        else:
            object.__setattr__(self, "snr_db", float(self.snr_db))

    @property
    def snr_grid(self) -> tuple[float, ...]:
        """The evaluation SNRs as a tuple, whether configured as point or grid."""
        if isinstance(self.snr_db, tuple):
            return self.snr_db
        return (self.snr_db,)

    @property
    def snr_point(self) -> float:
        """The single evaluation SNR; rejects grid-valued configurations."""
        if isinstance(self.snr_db, tuple):
            if len(self.snr_db) == 1:
                return self.snr_db[0]
            raise ConfigError("operation requires a single SNR point, got a grid")
        return self.snr_db

    def at_snr(self, snr_db: float) -> "SystemConfig":
        return SystemConfig(
            k_ens=self.k_ens,
            n_files=self.n_files,
            cache_size=self.cache_size,
            rho=self.rho,
            rate=self.rate,
            snr_db=float(snr_db),
        )


@dataclass(frozen=True, order=True)
class PlacementPolicy:
    """How many files are cached (n0) and on how many nodes each is replicated.

    t[i] is the number of edge nodes holding every bit of the i-th most
    popular file; each of its C(K, t[i]) equal subfiles lives on a distinct
    t[i]-subset of nodes.  Canonical form keeps t nonincreasing, mirroring
    the nonincreasing popularity order.
    """

    n0: int
    t: tuple[int, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", tuple(int(x) for x in self.t))
        if self.n0 != len(self.t):
            raise ConfigError(f"n0={self.n0} does not match len(t)={len(self.t)}")
        if any(x < 1 for x in self.t):
            raise ConfigError(f"replication degrees must be >= 1, got {self.t}")
        if any(a < b for a, b in zip(self.t, self.t[1:])):
            raise ConfigError(f"t must be nonincreasing, got {self.t}")

    def validate(self, config: SystemConfig) -> None:
        """Check feasibility against a configuration (budget and bounds)."""
        if self.n0 > config.n_files:
            raise ConfigError(f"n0={self.n0} exceeds library size N={config.n_files}")
        if any(x > config.k_ens for x in self.t):
            raise ConfigError(f"replication degree exceeds K={config.k_ens} in {self.t}")
        if sum(self.t) > config.cache_size * config.k_ens:
            raise ConfigError(
                f"cache budget violated: sum(t)={sum(self.t)} > M*K="
                f"{config.cache_size * config.k_ens}"
            )

    def is_feasible(self, config: SystemConfig) -> bool:
        try:
            self.validate(config)
        except ConfigError:
            return False
        return True

    def t_vector_str(self) -> str:
        """Semicolon-joined replication degrees, e.g. '5;3;2'."""
        return ";".join(str(x) for x in self.t)

    @classmethod
    def from_t_vector_str(cls, text: str) -> "PlacementPolicy":
        """Parse the semicolon-joined form back into a policy."""
        text = text.strip()
        if not text or text == "0":
            return cls(n0=0, t=())
        parts = [int(x) for x in text.split(";") if x != ""]
        parts = [x for x in parts if x != 0]  # table layouts pad with zeros
        return cls(n0=len(parts), t=tuple(parts))
