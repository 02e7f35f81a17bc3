"""Unsupervised flow labeling and attack detection toolkit."""

from ._core import (
    Mlp,
    __version__,
    alpha_grid,
    classification_report,
    classification_report_from_counts,
    clustering_report,
    confusion,
    cross_validate_alpha,
    ensemble_label,
    fcm,
    kmeans,
    lasso_fit,
    optics,
    optics_run,
    pearson_cof,
    pr_curve,
    roc_curve,
    scale,
    select_features,
    weighted_vote,
)

__all__ = [
    "Mlp",
    "__version__",
    "alpha_grid",
    "classification_report",
    "classification_report_from_counts",
    "clustering_report",
    "confusion",
    "cross_validate_alpha",
    "ensemble_label",
    "fcm",
    "kmeans",
    "lasso_fit",
    "optics",
    "optics_run",
    "pearson_cof",
    "pr_curve",
    "roc_curve",
    "scale",
    "select_features",
    "weighted_vote",
]
