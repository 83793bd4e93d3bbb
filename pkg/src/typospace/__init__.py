"""Feature selection, completion and distance evaluation for sparse binary
typological language-feature matrices."""

from .dataset import (
    ABSENT,
    MISSING,
    PRESENT,
    ClassLabels,
    ReferencePairs,
    TriStateMatrix,
    load_feature_csv,
    load_labels_csv,
    load_reference_csv,
    union_aggregate,
    write_feature_csv,
)
from .distance import DistanceMatrix, angular_distance, distance_matrix
from .errors import ConfigError, DataError, DegenerateInputError, UndefinedDistanceError
from .evaluation import (
    AlignmentResult,
    SweepCell,
    SweepGrid,
    align,
    export_vectors,
    run_sweep,
)
from .imputation import CompletedMatrix, ImputeParams, choose_lambda, soft_impute
from .selection import (
    FeatureRanking,
    FeatureSubset,
    cfs_select,
    laplacian_scores,
    pca_loading_scores,
    select_subset,
    top_k,
    variance_scores,
)
from .stats import mutual_information, phi, spearman

__version__ = "0.1.0"

__all__ = [
    "ABSENT",
    "MISSING",
    "PRESENT",
    "AlignmentResult",
    "ClassLabels",
    "CompletedMatrix",
    "ConfigError",
    "DataError",
    "DegenerateInputError",
    "DistanceMatrix",
    "FeatureRanking",
    "FeatureSubset",
    "ImputeParams",
    "ReferencePairs",
    "SweepCell",
    "SweepGrid",
    "TriStateMatrix",
    "UndefinedDistanceError",
    "align",
    "angular_distance",
    "cfs_select",
    "choose_lambda",
    "distance_matrix",
    "export_vectors",
    "laplacian_scores",
    "load_feature_csv",
    "load_labels_csv",
    "load_reference_csv",
    "pca_loading_scores",
    "run_sweep",
    "select_subset",
    "soft_impute",
    "spearman",
    "top_k",
    "union_aggregate",
    "variance_scores",
    "write_feature_csv",
    "mutual_information",
    "phi",
    "__version__",
]
