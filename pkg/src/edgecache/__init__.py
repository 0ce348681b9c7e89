"""Outage analysis and cache-placement optimization for partition-based
multi-cell edge caching.

Each file in an N-file library can be split into equal subfiles replicated
on t of the K cache-equipped edge nodes; a cached request is served
cooperatively and is in outage when the worst subfile rate misses the
target, a miss counts as outage outright.  The package provides the
closed-form outage probability of this scheme, Monte Carlo oracles for it,
the integer placement optimizer trading content diversity against
transmission diversity, and a CLI that emits the resulting tables, curves,
and figures.
"""

from .analysis import (
    CancellationError,
    OutageQuery,
    OutageReport,
    SeriesOutage,
    SeriesConvergenceError,
    PartitionCoefficients,
    diversity_fit,
    divided_difference,
    gamma_sum_cdf,
    hit_diversity,
    hypoexp_cdf,
    outage_closed_form,
    outage_report,
    outage_series,
    partition_coefficients,
    series_coefficient,
    series_coefficient_exact,
    system_diversity,
    system_outage,
    weighted_system_outage,
)
from .config import ConfigError, PlacementPolicy, SystemConfig, db_to_linear, linear_to_db
from .montecarlo import (
    ChannelDraw,
    McEstimate,
    mc_outage,
    mc_outage_subsets,
    mc_system_outage,
    outage_indicators,
    sample_channel,
    sample_ordered_renyi,
    subset_outage_indicators,
)
from .optimizer import (
    OptimizationResult,
    baseline_policies,
    enumerate_policies,
    full_cooperation_baseline,
    optimize_baseline,
    optimize_placement,
    optimize_sweep,
    uniform_demand_hit_diversity,
)
from .popularity import Popularity, miss_mass, zipf_popularity

__version__ = "0.1.0"
