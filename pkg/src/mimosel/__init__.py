"""Receive-antenna selection and transmit-covariance design for multiuser
MIMO uplinks, driven purely by channel statistics.

The library models an uplink whose base station has more antennas than RF
chains and must switch a subset of antennas to the chains. Designs (which
antennas to keep, how each terminal spreads its power) are optimized against
closed-form approximations of the ergodic sum-rate that depend only on the
channels' second-order statistics, and validated against Monte-Carlo
averages over channel realizations.

Modules
-------
config      system dimensions, budgets, solver controls
channel     channel statistics synthesis, sampling, persistence
rates       instantaneous and Monte-Carlo sum-rates
detequiv    fixed-point rate approximations for both decoding models
optjoint    water-filling + greedy selection under joint decoding
optindep    covariance ascent + selection under independent decoding
oracles     brute-force and closed-form validation references
validation  cross-check suites pairing fast paths with oracles
cli         batch command-line front end
"""

from .channel import ChannelStats, generate_stats, load_stats, sample_channel, save_stats
from .config import SystemConfig
from .detequiv import de_rate_indep, de_rate_joint, solve_fp_indep, solve_fp_joint
from .errors import ConfigError, ConvergenceError, MimoselError, StatsFormatError
from .optindep import (
    ao_optimize_indep,
    greedy_select_indep,
    mm_linearize,
    mm_objective,
    solve_relaxed,
)
from .optjoint import ao_optimize_joint, greedy_select, rank1_update, waterfill
from .rates import (
    instant_rate_indep,
    instant_rate_joint,
    instant_rate_without_k,
    mc_sum_rate,
)
from .structures import DesignResult, RateEstimate, Selection

__version__ = "0.1.0"

__all__ = [
    "ChannelStats",
    "ConfigError",
    "ConvergenceError",
    "DesignResult",
    "MimoselError",
    "RateEstimate",
    "Selection",
    "StatsFormatError",
    "SystemConfig",
    "ao_optimize_indep",
    "ao_optimize_joint",
    "de_rate_indep",
    "de_rate_joint",
    "generate_stats",
    "greedy_select",
    "greedy_select_indep",
    "instant_rate_indep",
    "instant_rate_joint",
    "instant_rate_without_k",
    "load_stats",
    "mc_sum_rate",
    "mm_linearize",
    "mm_objective",
    "rank1_update",
    "solve_relaxed",
    "sample_channel",
    "save_stats",
    "solve_fp_indep",
    "solve_fp_joint",
    "waterfill",
]
