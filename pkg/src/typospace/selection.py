"""Feature scoring and subset selection over tri-state matrices.

Four methods: binary variance, principal-component loadings, Laplacian score
over a k-nearest-neighbour language graph, and greedy correlation-based
selection against family class labels. Filter scores are cut to a subset with
:func:`top_k`; the greedy method returns features in selection order.

Missing cells are handled per method: variance/MI/phi use observed(-overlap)
cells only, PCA and the Laplacian graph operate on per-feature mean-filled
data (imputation proper happens downstream, after selection).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .dataset import MISSING, PRESENT, ClassLabels, TriStateMatrix
from .errors import DataError
from .stats import ContingencyTable, mutual_information, phi

log = logging.getLogger(__name__)

DESCENDING = "descending"
ASCENDING = "ascending"

CFS_REDUNDANCY_FLOOR = 1e-6
_CONSTANT_FEATURE_SENTINEL = np.inf


@dataclass
class FeatureRanking:
    """Per-feature importance scores plus the direction of preference."""

    method: str
    scores: np.ndarray
    direction: str
    feature_names: list[str]

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=np.float64)
        if self.scores.shape != (len(self.feature_names),):
            raise DataError("one score per feature required")
        if np.isnan(self.scores).any():
            raise DataError("NaN score in ranking")
        if self.direction not in (DESCENDING, ASCENDING):
            raise DataError(f"unknown direction {self.direction!r}")


@dataclass
class FeatureSubset:
    """Ordered selection of feature indices with provenance."""

    method: str
    k: int
    indices: list[int]
    feature_names: list[str]

    def __post_init__(self):
        if len(self.indices) != self.k or len(self.feature_names) != self.k:
            raise DataError(f"subset size mismatch: k={self.k}, {len(self.indices)} indices")
        if len(set(self.indices)) != len(self.indices):
            raise DataError("duplicate indices in subset")


@dataclass
class CfsTrace:
    """Per-iteration merit diagnostics from the greedy search (testing/analysis aid)."""

    chosen: list[int] = field(default_factory=list)
    merits: list[np.ndarray] = field(default_factory=list)


def mean_fill(matrix: TriStateMatrix) -> np.ndarray:
    """Real-valued view with Missing cells replaced by the per-feature observed mean."""
    values = matrix.values
    observed = values != MISSING
    counts = observed.sum(axis=0)
    if (counts == 0).any():
        j = int(np.argmax(counts == 0))
        raise DataError(f"feature {matrix.features[j]!r} has no observed cells")
    filled = np.where(observed, values, 0).astype(np.float64)
    means = (filled * observed).sum(axis=0) / counts
    return np.where(observed, filled, means[np.newaxis, :])


def variance_scores(matrix: TriStateMatrix) -> FeatureRanking:
    """Score each feature by p(1-p), p being the Present fraction among observed cells.

    Scores lie in [0, 0.25]; higher means a more balanced, more informative
    feature. Direction descending.
    """
    observed = matrix.values != MISSING
    counts = observed.sum(axis=0)
    if (counts == 0).any():
        j = int(np.argmax(counts == 0))
        raise DataError(f"feature {matrix.features[j]!r} has no observed cells")
    present = (matrix.values == PRESENT).sum(axis=0)
    p = present / counts
    return FeatureRanking(
        method="variance",
        scores=p * (1.0 - p),
        direction=DESCENDING,
        feature_names=list(matrix.features),
    )


def pca_loading_scores(matrix: TriStateMatrix, variance_threshold: float = 0.95) -> FeatureRanking:
    """Score each feature by its maximum absolute loading on the leading PCs.

    Missing cells are mean-filled, columns centered, and principal components
    taken from the SVD of the centered matrix. Only the smallest set of
    leading components whose explained-variance ratios sum to at least
    ``variance_threshold`` contributes. Loadings are components of the
    unit-norm right singular vectors; direction descending.
    """
    if matrix.n_languages < 2 or matrix.n_features < 2:
        raise DataError("PCA scoring needs at least 2 languages and 2 features")
    X = mean_fill(matrix)
    Xc = X - X.mean(axis=0)
    _, sv, vt = np.linalg.svd(Xc, full_matrices=False)
    total = float(np.sum(sv**2))
    if total <= 0.0:
        raise DataError("zero total variance: all features constant after mean fill")
    cum = np.cumsum(sv**2) / total
    n_components = int(np.argmax(cum >= variance_threshold - 1e-12)) + 1
    scores = np.max(np.abs(vt[:n_components, :]), axis=0)
    return FeatureRanking(
        method="pca",
        scores=scores,
        direction=DESCENDING,
        feature_names=list(matrix.features),
    )


def laplacian_scores(matrix: TriStateMatrix, neighbors: int = 5) -> FeatureRanking:
    """Graph-smoothness score per feature; lower is better (direction ascending).

    A symmetric k-nearest-neighbour graph is built over mean-filled language
    rows (edge when either endpoint is among the other's ``neighbors``
    nearest by Euclidean distance; no self-loops). Rows tied with the k-th
    nearest are all included, which keeps the graph independent of row
    order. Edges carry heat-kernel weights exp(-d^2 / t) with bandwidth t
    set to the mean squared distance over retained edges. With weight
    matrix S, degree matrix D and L = D - S, a feature column f is centered
    against D and scored by the Rayleigh-style ratio of its edge
    disagreement to its weighted variance. Constant features have no local
    structure and get a +inf sentinel so they rank last.
    """
    n = matrix.n_languages
    if n < neighbors + 1:
        raise DataError(f"need at least {neighbors + 1} languages for {neighbors}-NN graph")
    X = mean_fill(matrix)

    d2 = squareform(pdist(X, metric="sqeuclidean"))
    np.fill_diagonal(d2, np.inf)
    thresholds = np.sort(d2, axis=1)[:, neighbors - 1]
    adjacency = d2 <= thresholds[:, np.newaxis]
    adjacency |= adjacency.T

    edge_d2 = d2[np.triu(adjacency, k=1)]
    t = float(edge_d2.mean())
    if t <= 0.0:
        t = 1.0  # all retained edges at distance 0; exp(0) = 1 either way
    weights = np.where(adjacency, np.exp(-d2 / t), 0.0)
    degrees = weights.sum(axis=1)

    deg_total = degrees.sum()
    centered = X - (degrees @ X) / deg_total
    weighted_var = np.einsum("i,ij,ij->j", degrees, centered, centered)
    smoothness = weighted_var - np.einsum("ij,ik,jk->k", weights, centered, centered)
    smoothness = np.maximum(smoothness, 0.0)  # L is PSD; clip fp dust

    scores = np.full(matrix.n_features, _CONSTANT_FEATURE_SENTINEL)
    defined = weighted_var > 1e-12
    scores[defined] = smoothness[defined] / weighted_var[defined]
    return FeatureRanking(
        method="laplacian",
        scores=scores,
        direction=ASCENDING,
        feature_names=list(matrix.features),
    )


def feature_class_mi(matrix: TriStateMatrix, labels: ClassLabels) -> np.ndarray:
    """Mutual information of each feature with the family class, in bits.

    Contingency tables are built from labeled languages where the feature is
    observed; a feature with no such rows carries no evidence and scores 0.
    """
    class_idx, family_names, unmatched = labels.family_indices(matrix.languages)
    if unmatched:
        log.warning("labels for %d languages not in the matrix: %s", len(unmatched), unmatched[:10])
    labeled = class_idx >= 0
    if not labeled.any():
        raise DataError("no labeled languages in the matrix")
    values = matrix.values[labeled]
    cls = class_idx[labeled]
    n_classes = len(family_names)

    mi = np.zeros(matrix.n_features)
    for j in range(matrix.n_features):
        col = values[:, j]
        obs = col != MISSING
        if not obs.any():
            continue
        counts = np.zeros((2, n_classes), dtype=np.int64)
        np.add.at(counts, (col[obs].astype(np.int64), cls[obs]), 1)
        mi[j] = mutual_information(ContingencyTable(counts))
    return mi


def cfs_select(
    matrix: TriStateMatrix,
    labels: ClassLabels,
    k: int,
    trace: CfsTrace | None = None,
) -> FeatureSubset:
    """Greedy correlation-based selection of ``k`` features.

    The first pick maximizes mutual information with the family class; each
    later iteration re-scores the remaining features by MI divided by the
    summed absolute phi correlation with the already-selected set (floored
    at 1e-6) and adds the best. Ties break toward the lower feature index,
    so the result is deterministic. Features come back in selection order.

    Parameters
    ----------
    matrix : TriStateMatrix
    labels : ClassLabels
        Family labels; languages without a label are excluded from the MI
        estimates.
    k : int
        Subset size, 1 <= k <= number of features.
    trace : CfsTrace, optional
        If given, filled with per-iteration merit vectors (NaN for already
        selected features).
    """
    m = matrix.n_features
    if not 1 <= k <= m:
        raise DataError(f"k={k} out of range for {m} features")
    mi = feature_class_mi(matrix, labels)

    columns = matrix.values
    selected: list[int] = []
    available = np.ones(m, dtype=bool)
    redundancy = np.zeros(m)

    for step in range(k):
        # empty selection: redundancy 0 floors to 1e-6, so step 0 is argmax MI
        merit = mi / np.maximum(redundancy, CFS_REDUNDANCY_FLOOR)
        merit[~available] = np.nan
        best = int(np.nanargmax(merit))  # first (lowest-index) argmax on ties
        if trace is not None:
            trace.chosen.append(best)
            trace.merits.append(merit.copy())
        selected.append(best)
        available[best] = False
        chosen_col = columns[:, best]
        for j in np.flatnonzero(available):
            redundancy[j] += abs(phi(columns[:, j], chosen_col))

    return FeatureSubset(
        method="cfs",
        k=k,
        indices=selected,
        feature_names=[matrix.features[i] for i in selected],
    )


METHODS = ("variance", "pca", "laplacian", "cfs")


def select_subset(
    matrix: TriStateMatrix,
    method: str,
    k: int,
    labels: ClassLabels | None = None,
    neighbors: int = 5,
) -> FeatureSubset:
    """Run one named selection method and return its top-``k`` subset."""
    if method == "variance":
        return top_k(variance_scores(matrix), k)
    if method == "pca":
        return top_k(pca_loading_scores(matrix), k)
    if method == "laplacian":
        return top_k(laplacian_scores(matrix, neighbors=neighbors), k)
    if method == "cfs":
        if labels is None:
            raise DataError("cfs selection requires class labels")
        return cfs_select(matrix, labels, k)
    raise DataError(f"unknown selection method: {method!r} (expected one of {METHODS})")


def top_k(ranking: FeatureRanking, k: int) -> FeatureSubset:
    """Best ``k`` features by score and direction, ties broken by lower index."""
    m = len(ranking.feature_names)
    if k <= 0:
        raise DataError(f"k must be positive, got {k}")
    if k > m:
        raise DataError(f"k={k} exceeds feature count {m}")
    key = -ranking.scores if ranking.direction == DESCENDING else ranking.scores
    order = np.argsort(key, kind="stable")  # stable: equal keys keep index order
    indices = [int(i) for i in order[:k]]
    return FeatureSubset(
        method=ranking.method,
        k=k,
        indices=indices,
        feature_names=[ranking.feature_names[i] for i in indices],
    )
