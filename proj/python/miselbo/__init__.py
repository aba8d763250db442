"""Ensembles of variational approximations with the MISELBO estimator family.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (
    BoundEstimate,
    ConfigError,
    Ensemble,
    EstimateConfig,
    FitDivergenceError,
    FitResult,
    GaussianApprox,
    HierarchicalApprox,
    RandomStream,
    SampleBatch,
    Target,
    UsageError,
    __version__,
    avg_elbo,
    avg_iwelbo,
    batch_from_tables,
    delta,
    derive_stream,
    draw_batch,
    elbo,
    estimate,
    fit_ensemble,
    fit_member,
    iwelbo,
    jsd,
    kl_bar,
    kl_mis,
    make_gaussian_mixture,
    make_setting,
    miselbo,
)

__all__ = [
    "BoundEstimate",
    "ConfigError",
    "Ensemble",
    "EstimateConfig",
    "FitDivergenceError",
    "FitResult",
    "GaussianApprox",
    "HierarchicalApprox",
    "RandomStream",
    "SampleBatch",
    "Target",
    "UsageError",
    "__version__",
    "avg_elbo",
    "avg_iwelbo",
    "batch_from_tables",
    "delta",
    "derive_stream",
    "draw_batch",
    "elbo",
    "estimate",
    "fit_ensemble",
    "fit_member",
    "iwelbo",
    "jsd",
    "kl_bar",
    "kl_mis",
    "make_gaussian_mixture",
    "make_setting",
    "miselbo",
]
