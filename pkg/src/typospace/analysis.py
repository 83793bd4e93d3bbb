"""Descriptive views of selected feature subsets.

Two lenses: what kinds of features a subset keeps (grouped by the name
prefix up to the first underscore, e.g. "S_" for syntax) versus the
type-agnostic expectation, and how sparsely observed the kept features are
compared to the full matrix.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from .dataset import MISSING, TriStateMatrix
from .errors import DataError
from .selection import FeatureSubset

log = logging.getLogger(__name__)

UNTYPED = "UNTYPED"


def feature_type(name: str) -> str:
    """Type prefix of a feature name: everything before the first underscore."""
    head, sep, _ = name.partition("_")
    return head if sep else UNTYPED


@dataclass
class TypeRow:
    """Retention of one feature type inside a subset."""

    type_name: str
    retained: int
    total: int
    retained_proportion: float
    expected_proportion: float


@dataclass
class TypeBreakdown:
    """Per-type retention table; expected proportion is k / total features for every type."""

    k: int
    n_features: int
    rows: list[TypeRow]

    def row(self, type_name: str) -> TypeRow:
        for r in self.rows:
            if r.type_name == type_name:
                return r
        raise DataError(f"no such feature type: {type_name!r}")


def type_breakdown(subset: FeatureSubset, all_features: list[str]) -> TypeBreakdown:
    """Group a subset by feature-type prefix and compare against type-agnostic retention.

    Features without an underscore fall into the UNTYPED bucket (with a
    warning) rather than being dropped.
    """
    universe = set(all_features)
    missing = [name for name in subset.feature_names if name not in universe]
    if missing:
        raise DataError(f"subset features not in the feature list: {missing[:10]}")

    untyped = [name for name in all_features if feature_type(name) == UNTYPED]
    if untyped:
        log.warning("%d features lack a type prefix, bucketed as UNTYPED: %s",
                    len(untyped), untyped[:10])

    total: dict[str, int] = {}
    for name in all_features:
        t = feature_type(name)
        total[t] = total.get(t, 0) + 1
    retained: dict[str, int] = {}
    for name in subset.feature_names:
        t = feature_type(name)
        retained[t] = retained.get(t, 0) + 1

    expected = subset.k / len(all_features)
    rows = [
        TypeRow(
            type_name=t,
            retained=retained.get(t, 0),
            total=total[t],
            retained_proportion=retained.get(t, 0) / total[t],
            expected_proportion=expected,
        )
        for t in sorted(total)
    ]
    return TypeBreakdown(k=subset.k, n_features=len(all_features), rows=rows)


@dataclass
class SparsityProfile:
    """Missing-value fractions for a subset, with the full-matrix mean for context."""

    feature_names: list[str]
    missing_fractions: np.ndarray
    subset_mean: float
    overall_mean: float


def sparsity_profile(matrix: TriStateMatrix, subset: FeatureSubset) -> SparsityProfile:
    """Per-feature and mean missing fractions of a subset, plus the all-features mean."""
    n = matrix.n_languages
    missing = matrix.values == MISSING
    for i in subset.indices:
        if not 0 <= i < matrix.n_features:
            raise DataError(f"subset index {i} out of range for {matrix.n_features} features")
    fractions = missing[:, subset.indices].sum(axis=0) / n
    return SparsityProfile(
        feature_names=list(subset.feature_names),
        missing_fractions=fractions.astype(np.float64),
        subset_mean=float(fractions.mean()),
        overall_mean=matrix.missing_fraction(),
    )


def full_subset(matrix: TriStateMatrix) -> FeatureSubset:
    """The subset containing every feature, in matrix order."""
    return FeatureSubset(
        method="all",
        k=matrix.n_features,
        indices=list(range(matrix.n_features)),
        feature_names=list(matrix.features),
    )


def write_type_breakdown_csv(path, breakdown: TypeBreakdown) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["type", "retained", "total", "retained_proportion", "expected_proportion"]
        )
        for r in breakdown.rows:
            writer.writerow(
                [
                    r.type_name,
                    r.retained,
                    r.total,
                    f"{r.retained_proportion:.6f}",
                    f"{r.expected_proportion:.6f}",
                ]
            )


def write_sparsity_csv(path, profile: SparsityProfile) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["feature", "missing_fraction"])
        for name, frac in sorted(zip(profile.feature_names, profile.missing_fractions)):
            writer.writerow([name, f"{frac:.6f}"])
        writer.writerow(["SUBSET_MEAN", f"{profile.subset_mean:.6f}"])
        writer.writerow(["OVERALL_MEAN", f"{profile.overall_mean:.6f}"])


def plot_type_breakdown(path, breakdown: TypeBreakdown) -> None:
    """Bar chart of retained proportion per type with the type-agnostic expectation line."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    names = [r.type_name for r in breakdown.rows]
    props = [r.retained_proportion for r in breakdown.rows]
    fig, ax = plt.subplots(figsize=(max(4, 0.8 * len(names)), 3.2))
    ax.bar(names, props, color="#4878d0")
    ax.axhline(breakdown.rows[0].expected_proportion if breakdown.rows else 0.0,
               color="#555555", linestyle=":", label="type-agnostic")
    ax.set_ylabel("retained proportion")
    ax.set_xlabel("feature type")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
