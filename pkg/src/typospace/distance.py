"""Angular distances between language vectors.

The distance between two non-zero vectors is the arc length of the angle
between them, rescaled so orthogonal vectors sit at 1: d = (2/pi) acos(cos).
It is scale-invariant, which keeps languages with many recorded features
comparable to sparsely recorded ones.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DataError, UndefinedDistanceError

_ZERO_NORM = 1e-12


def angular_distance(x: np.ndarray, y: np.ndarray) -> float:
    """Angular distance in [0, 1] between two vectors of equal length.

    Raises UndefinedDistanceError when either vector has (numerically)
    zero norm, since the angle is then meaningless.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"vectors must be 1-d and equal length, got {x.shape} and {y.shape}")
    nx = float(np.linalg.norm(x))
    ny = float(np.linalg.norm(y))
    if nx < _ZERO_NORM or ny < _ZERO_NORM:
        raise UndefinedDistanceError("angular distance undefined for zero vectors")
    cos = float(np.clip(x @ y / (nx * ny), -1.0, 1.0))
    return float(2.0 / np.pi * np.arccos(cos))


@dataclass
class DistanceMatrix:
    """Symmetric pairwise distances with an explicit validity mask.

    ``defined[i, j]`` is False when either language had a zero vector, in
    which case ``values[i, j]`` is NaN. The diagonal of a defined language
    is exactly 0.
    """

    languages: list[str]
    values: np.ndarray
    defined: np.ndarray

    def __post_init__(self) -> None:
        n = len(self.languages)
        if self.values.shape != (n, n) or self.defined.shape != (n, n):
            raise DataError(
                f"distance matrix shape {self.values.shape} does not match {n} languages"
            )

    @property
    def n_languages(self) -> int:
        return len(self.languages)

    def lookup(self, a: str, b: str) -> float:
        """Distance between two languages by name; NaN when undefined."""
        idx = {name: i for i, name in enumerate(self.languages)}
        try:
            i, j = idx[a], idx[b]
        except KeyError as exc:
            raise DataError(f"unknown language: {exc.args[0]!r}") from None
        return float(self.values[i, j])


def distance_matrix(vectors: np.ndarray, languages: list[str]) -> DistanceMatrix:
    """All-pairs angular distances over the rows of ``vectors``.

    Zero-vector rows do not abort the computation; their pairs are marked
    undefined instead so callers can report how many comparisons were
    skipped.
    """
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] != len(languages):
        raise DataError(
            f"expected one row per language, got {vectors.shape} for {len(languages)} languages"
        )
    norms = np.linalg.norm(vectors, axis=1)
    ok = norms >= _ZERO_NORM
    safe = np.where(ok, norms, 1.0)
    unit = vectors / safe[:, None]
    cos = np.clip(unit @ unit.T, -1.0, 1.0)
    values = 2.0 / np.pi * np.arccos(cos)
    np.fill_diagonal(values, 0.0)
    values = (values + values.T) / 2.0

    defined = np.logical_and.outer(ok, ok)
    values[~defined] = np.nan
    return DistanceMatrix(languages=list(languages), values=values, defined=defined)


def write_distance_square_csv(path, dm: DistanceMatrix) -> None:
    """Square layout: header row of languages, one row per language; undefined cells empty."""
    order = np.argsort(np.asarray(dm.languages, dtype=object))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["language"] + [dm.languages[i] for i in order])
        for i in order:
            row = [dm.languages[i]]
            for j in order:
                row.append("" if not dm.defined[i, j] else f"{dm.values[i, j]:.12g}")
            writer.writerow(row)


def write_distance_long_csv(path, dm: DistanceMatrix) -> None:
    """Long layout: language_a,language_b,distance for each defined unordered pair (a < b)."""
    order = np.argsort(np.asarray(dm.languages, dtype=object))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["language_a", "language_b", "distance"])
        for a_pos, i in enumerate(order):
            for j in order[a_pos + 1 :]:
                if dm.defined[i, j]:
                    writer.writerow(
                        [dm.languages[i], dm.languages[j], f"{dm.values[i, j]:.12g}"]
                    )
