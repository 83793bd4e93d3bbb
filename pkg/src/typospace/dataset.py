"""Ingestion and union aggregation of tri-state language-feature tables.

A cell of the grid is Present (1), Absent (0) or Missing (-1). Multiple source
tables covering overlapping language/feature sets are merged by union
aggregation: a value is taken from any source that observes one, with Present
winning over Absent on conflict.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

log = logging.getLogger(__name__)

PRESENT = 1
ABSENT = 0
MISSING = -1

_CELL_VALUES = {"1": PRESENT, "0": ABSENT, "-1": MISSING, "": MISSING}


@dataclass
class TriStateMatrix:
    """Languages x features grid of {Present, Absent, Missing} cells.

    Parameters
    ----------
    languages : list of str
        Row labels (language codes), unique.
    features : list of str
        Column labels (feature names), unique.
    values : ndarray of int8, shape (n_languages, n_features)
        Cell values in {1, 0, -1}.
    """

    languages: list[str]
    features: list[str]
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int8)
        if self.values.shape != (len(self.languages), len(self.features)):
            raise DataError(
                f"grid shape {self.values.shape} does not match "
                f"{len(self.languages)} languages x {len(self.features)} features"
            )
        dup = _first_duplicate(self.languages)
        if dup is not None:
            raise DataError(f"duplicate language code: {dup!r}")
        dup = _first_duplicate(self.features)
        if dup is not None:
            raise DataError(f"duplicate feature name: {dup!r}")
        bad = set(np.unique(self.values)) - {PRESENT, ABSENT, MISSING}
        if bad:
            raise DataError(f"invalid cell values: {sorted(bad)}")

    @property
    def n_languages(self) -> int:
        return len(self.languages)

    @property
    def n_features(self) -> int:
        return len(self.features)

    @property
    def observed(self) -> np.ndarray:
        """Boolean mask of non-Missing cells."""
        return self.values != MISSING

    def missing_fraction(self) -> float:
        """Overall proportion of Missing cells."""
        return float(np.mean(self.values == MISSING))

    def language_index(self, code: str) -> int:
        try:
            return self.languages.index(code)
        except ValueError:
            raise DataError(f"unknown language code: {code!r}") from None

    def select_features(self, indices: Sequence[int]) -> "TriStateMatrix":
        """Column slice preserving language order."""
        idx = list(indices)
        if any(i < 0 or i >= self.n_features for i in idx):
            raise DataError(f"feature index out of range for {self.n_features} features")
        return TriStateMatrix(
            languages=list(self.languages),
            features=[self.features[i] for i in idx],
            values=self.values[:, idx],
        )

    def restrict_languages(self, codes: Sequence[str]) -> "TriStateMatrix":
        """Row slice in the order given by ``codes``; unknown codes are rejected."""
        unknown = [c for c in codes if c not in set(self.languages)]
        if unknown:
            raise DataError(f"unknown language codes: {unknown}")
        pos = {code: i for i, code in enumerate(self.languages)}
        rows = [pos[c] for c in codes]
        return TriStateMatrix(
            languages=list(codes),
            features=list(self.features),
            values=self.values[rows, :],
        )

    def sorted(self) -> "TriStateMatrix":
        """Canonical form: rows and columns in lexicographic order."""
        row_order = np.argsort(self.languages, kind="stable")
        col_order = np.argsort(self.features, kind="stable")
        return TriStateMatrix(
            languages=[self.languages[i] for i in row_order],
            features=[self.features[j] for j in col_order],
            values=self.values[np.ix_(row_order, col_order)],
        )


@dataclass
class ClassLabels:
    """Language code -> top-level family name, used as the class variable."""

    families: dict[str, str]

    def family_indices(self, languages: Sequence[str]) -> tuple[np.ndarray, list[str], list[str]]:
        """Join labels against a language list.

        Returns
        -------
        class_idx : ndarray of int, shape (len(languages),)
            Dense family index per language, -1 where unlabeled.
        family_names : list of str
            Sorted family names; index i corresponds to class i.
        unmatched : list of str
            Label keys that do not occur in ``languages`` (reported, not dropped silently).
        """
        present = [code for code in languages if code in self.families]
        family_names = sorted({self.families[code] for code in present})
        name_pos = {name: i for i, name in enumerate(family_names)}
        class_idx = np.full(len(languages), -1, dtype=np.int64)
        for row, code in enumerate(languages):
            fam = self.families.get(code)
            if fam is not None:
                class_idx[row] = name_pos[fam]
        unmatched = sorted(set(self.families) - set(languages))
        return class_idx, family_names, unmatched


@dataclass
class ReferencePairs:
    """External similarity/distance scores between language pairs (alignment ground truth)."""

    pairs: list[tuple[str, str, float]] = field(default_factory=list)

    def __post_init__(self):
        seen: set[frozenset] = set()
        for a, b, _ in self.pairs:
            if a == b:
                raise DataError(f"self-pair not allowed: ({a!r}, {b!r})")
            key = frozenset((a, b))
            if key in seen:
                raise DataError(f"duplicate language pair: ({a!r}, {b!r})")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.pairs)

    def languages(self) -> list[str]:
        """Sorted set of all languages occurring in any pair."""
        return sorted({code for a, b, _ in self.pairs for code in (a, b)})


def union_aggregate(sources: Iterable[TriStateMatrix]) -> TriStateMatrix:
    """Merge source tables into one matrix by union over observations.

    A cell is Present if any source observes Present, else Absent if any
    source observes Absent, else Missing. Present wins on Present/Absent
    conflicts; conflicts are counted per feature and logged. The output
    covers the union of language and feature sets, rows and columns in
    lexicographic order. Languages or features left entirely Missing are
    dropped with a warning.

    Parameters
    ----------
    sources : iterable of TriStateMatrix

    Returns
    -------
    TriStateMatrix
    """
    sources = list(sources)
    if not sources:
        raise DataError("union_aggregate requires at least one source")

    languages = sorted({code for m in sources for code in m.languages})
    features = sorted({name for m in sources for name in m.features})
    lang_pos = {code: i for i, code in enumerate(languages)}
    feat_pos = {name: j for j, name in enumerate(features)}

    shape = (len(languages), len(features))
    any_present = np.zeros(shape, dtype=bool)
    any_absent = np.zeros(shape, dtype=bool)
    for m in sources:
        rows = np.array([lang_pos[code] for code in m.languages], dtype=np.intp)
        cols = np.array([feat_pos[name] for name in m.features], dtype=np.intp)
        grid = np.ix_(rows, cols)
        any_present[grid] |= m.values == PRESENT
        any_absent[grid] |= m.values == ABSENT

    conflicts = any_present & any_absent
    if conflicts.any():
        per_feature = conflicts.sum(axis=0)
        worst = np.argsort(-per_feature, kind="stable")[:5]
        log.info(
            "union aggregation: %d Present/Absent conflicts resolved to Present; "
            "most affected features: %s",
            int(conflicts.sum()),
            ", ".join(f"{features[j]}={int(per_feature[j])}" for j in worst if per_feature[j]),
        )

    values = np.where(any_present, PRESENT, np.where(any_absent, ABSENT, MISSING)).astype(np.int8)

    observed = values != MISSING
    keep_rows = observed.any(axis=1)
    keep_cols = observed.any(axis=0)
    if not keep_rows.all():
        dropped = [languages[i] for i in np.flatnonzero(~keep_rows)]
        log.warning("dropping %d all-Missing languages: %s", len(dropped), dropped[:10])
    if not keep_cols.all():
        dropped = [features[j] for j in np.flatnonzero(~keep_cols)]
        log.warning("dropping %d all-Missing features: %s", len(dropped), dropped[:10])

    return TriStateMatrix(
        languages=[c for c, k in zip(languages, keep_rows) if k],
        features=[f for f, k in zip(features, keep_cols) if k],
        values=values[np.ix_(keep_rows, keep_cols)],
    )


def load_feature_csv(path: str | Path) -> TriStateMatrix:
    """Read a feature table: header of feature names, first column language codes.

    Cells must be "1" (Present), "0" (Absent), "-1" or "" (Missing).
    Non-rectangular rows and unparseable cells are rejected with their
    row/column location.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: empty file, expected a header row") from None
        features = header[1:]
        languages: list[str] = []
        rows: list[list[int]] = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise DataError(
                    f"{path}: row {lineno} has {len(row)} columns, expected {len(header)}"
                )
            languages.append(row[0])
            parsed = []
            for col, cell in enumerate(row[1:], start=1):
                try:
                    parsed.append(_CELL_VALUES[cell.strip()])
                except KeyError:
                    raise DataError(
                        f"{path}: unparseable cell {cell!r} at row {lineno}, "
                        f"column {header[col]!r}"
                    ) from None
            rows.append(parsed)
    values = np.array(rows, dtype=np.int8) if rows else np.zeros((0, len(features)), dtype=np.int8)
    return TriStateMatrix(languages=languages, features=features, values=values)


def write_feature_csv(matrix: TriStateMatrix, path: str | Path) -> None:
    """Write a feature table (UTF-8, LF, rows/columns sorted lexicographically)."""
    m = matrix.sorted()
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["language"] + m.features)
        for i, code in enumerate(m.languages):
            writer.writerow([code] + [str(int(v)) for v in m.values[i]])


def load_labels_csv(path: str | Path) -> ClassLabels:
    """Read (language, family) pairs; header row skipped; duplicate keys rejected."""
    path = Path(path)
    families: dict[str, str] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1 or not row:
                continue  # header / blank line
            if len(row) != 2:
                raise DataError(f"{path}: row {lineno} has {len(row)} columns, expected 2")
            code, family = row[0].strip(), row[1].strip()
            if code in families:
                raise DataError(f"{path}: duplicate language code {code!r} at row {lineno}")
            families[code] = family
    return ClassLabels(families=families)


def load_reference_csv(path: str | Path) -> ReferencePairs:
    """Read (lang_a, lang_b, score) triples; header row skipped; duplicate unordered pairs rejected."""
    path = Path(path)
    pairs: list[tuple[str, str, float]] = []
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if lineno == 1 or not row:
                continue
            if len(row) != 3:
                raise DataError(f"{path}: row {lineno} has {len(row)} columns, expected 3")
            a, b = row[0].strip(), row[1].strip()
            try:
                score = float(row[2])
            except ValueError:
                raise DataError(
                    f"{path}: unparseable score {row[2]!r} at row {lineno}"
                ) from None
            pairs.append((a, b, score))
    try:
        return ReferencePairs(pairs=pairs)
    except DataError as exc:
        raise DataError(f"{path}: {exc}") from None


def _first_duplicate(items: Sequence[str]) -> str | None:
    seen: set[str] = set()
    for x in items:
        if x in seen:
            return x
        seen.add(x)
    return None
