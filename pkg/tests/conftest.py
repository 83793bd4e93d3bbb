"""Shared test helpers: compact builders for the core data types."""

from __future__ import annotations

import numpy as np

from typospace import ClassLabels, ReferencePairs, TriStateMatrix


def matrix_from(values, languages=None, features=None) -> TriStateMatrix:
    """TriStateMatrix from a nested list / array with generated names."""
    values = np.asarray(values, dtype=np.int8)
    n_rows, n_cols = values.shape
    return TriStateMatrix(
        languages=languages or [f"l{i:03d}" for i in range(n_rows)],
        features=features or [f"F_{j:03d}" for j in range(n_cols)],
        values=values,
    )


def labels_from(matrix: TriStateMatrix, classes) -> ClassLabels:
    """ClassLabels mapping each matrix language to fam<class index>."""
    return ClassLabels(
        families={
            code: f"fam{int(c)}" for code, c in zip(matrix.languages, classes)
        }
    )


def reference_from(entries) -> ReferencePairs:
    return ReferencePairs(pairs=[(a, b, float(s)) for a, b, s in entries])
