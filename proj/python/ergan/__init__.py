"""Synthetic residential load patterns via clustered recurrent GANs."""

from ._core import (
    ClusterModel,
    DataError,
    Gan,
    NumericError,
    __version__,
    allocate,
    autocorrelation,
    boxplot_stats,
    dataset_acf,
    db_index,
    fixture_generate,
    histogram,
    hourly_profiles,
    kmeans,
    l1_distance,
    nearest_match,
    normalize,
    proportions,
    run_pipeline,
    select_k,
    split,
    synthesize,
    train_gan,
    wcss,
)

__all__ = [
    "ClusterModel",
    "DataError",
    "Gan",
    "NumericError",
    "__version__",
    "allocate",
    "autocorrelation",
    "boxplot_stats",
    "dataset_acf",
    "db_index",
    "fixture_generate",
    "histogram",
    "hourly_profiles",
    "kmeans",
    "l1_distance",
    "nearest_match",
    "normalize",
    "proportions",
    "run_pipeline",
    "select_k",
    "split",
    "synthesize",
    "train_gan",
    "wcss",
]
