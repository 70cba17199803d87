"""Wrapper feature selection by k-fold subsampled sequential backward elimination."""

from ._core import (
    AppearanceModel,
    Dataset,
    SbfeError,
    SelectionConfig,
    SelectionResult,
    StepRecord,
    TrainConfig,
    Validation,
    __version__,
    build_model,
    classic_sbe,
    counter_scores,
    discretize,
    entropy,
    generate_synth,
    kfold_uar,
    load_csv,
    load_libsvm,
    local_criterion,
    mutual_information,
    region_score,
    removal_count,
    run_selection,
    subset_size,
    uar,
)

__all__ = [
    "AppearanceModel",
    "Dataset",
    "SbfeError",
    "SelectionConfig",
    "SelectionResult",
    "StepRecord",
    "TrainConfig",
    "Validation",
    "__version__",
    "build_model",
    "classic_sbe",
    "counter_scores",
    "discretize",
    "entropy",
    "generate_synth",
    "kfold_uar",
    "load_csv",
    "load_libsvm",
    "local_criterion",
    "mutual_information",
    "region_score",
    "removal_count",
    "run_selection",
    "subset_size",
    "uar",
]
