"""Reconstruction of g2(tau) photon-correlation signals from few-photon histograms.

The heavy lifting lives in the compiled extension; this package re-exports
its public names.
"""

from g2fit._core import (
    ConfigError,
    DelayGrid,
    FitResult,
    FormatError,
    Histogram,
    ModelSpec,
    RestartRecord,
    SyntheticSet,
    ValidationError,
    __version__,
    center_peak_ratio,
    default_truncation,
    evaluate,
    fit,
    nrmse,
    poisson_loglik,
    pulsed_model,
    read_histogram,
    sample_poisson,
    scale_signal,
    simulate,
    thermal_model,
    write_histogram,
)

__all__ = [
    "ConfigError",
    "DelayGrid",
    "FitResult",
    "FormatError",
    "Histogram",
    "ModelSpec",
    "RestartRecord",
    "SyntheticSet",
    "ValidationError",
    "__version__",
    "center_peak_ratio",
    "default_truncation",
    "evaluate",
    "fit",
    "nrmse",
    "poisson_loglik",
    "pulsed_model",
    "read_histogram",
    "sample_poisson",
    "scale_signal",
    "simulate",
    "thermal_model",
    "write_histogram",
]
