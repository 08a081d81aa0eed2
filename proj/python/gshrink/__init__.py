"""Generalized shrinkage spectral estimation for multi-trial time series.

Trial data are float arrays of shape (trials, channels, samples). Spectral
matrices are complex arrays of shape (frequencies, channels, channels) on the
half grid 0..floor(T/2).
"""

from ._gshrink import (
    ConditioningError,
    ConfigError,
    DegenerateChannelError,
    DimensionError,
    DomainError,
    FormatError,
    GshrinkError,
    InsufficientDataError,
    RankDeficiencyError,
    StabilityError,
    bh_fdr,
    coherence,
    compare_conditions,
    decode_trials,
    encode_trials,
    estimate,
    fisher_z,
    fit_var,
    frequencies,
    mean_periodogram,
    multitaper,
    partial_coherence,
    read_trials,
    shrinkage_weight,
    simulate,
    smoothed,
    true_spectrum,
    var_spectrum,
    welch_t,
    write_trials,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
