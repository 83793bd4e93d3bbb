"""Alignment of derived language distances with external similarity scores.

The central experiment: for every (selection method, subset size) cell,
select features, complete the reduced matrix independently, compute angular
distances over the languages the reference scores mention, and report the
Spearman correlation against those scores. A baseline over the full feature
set anchors the grid.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import ClassLabels, ReferencePairs, TriStateMatrix
from .distance import DistanceMatrix, distance_matrix
from .errors import DataError, DegenerateInputError
from .imputation import CompletedMatrix, ImputeParams, impute_with_params
from .selection import METHODS, FeatureSubset, select_subset
from .stats import spearman

DEFAULT_KS = (100, 200, 300, 400, 500, 600, 700)
BASELINE_METHOD = "baseline"


@dataclass
class AlignmentResult:
    """Spearman correlation between derived distances and reference scores."""

    method: str
    k: int
    rho: float
    p_value: float
    n_pairs: int
    n_excluded: int


@dataclass
class SweepCell:
    """One grid entry; either a result or an error record, never both."""

    method: str
    k: int
    result: AlignmentResult | None = None
    error: str | None = None
    lam: float = float("nan")
    feature_names: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.result is not None


@dataclass
class SweepGrid:
    """Method x subset-size grid of alignment results plus the full-feature baseline."""

    methods: list[str]
    ks: list[int]
    cells: list[SweepCell]
    baseline: AlignmentResult
    baseline_lam: float
    seed: int

    def cell(self, method: str, k: int) -> SweepCell:
        for c in self.cells:
            if c.method == method and c.k == k:
                return c
        raise DataError(f"no grid cell for ({method!r}, {k})")

    def best(self) -> SweepCell:
        """Cell with the highest rho; earlier method/k order wins ties. Fails if nothing succeeded."""
        ok_cells = [c for c in self.cells if c.ok]
        if not ok_cells:
            raise DataError("sweep produced no successful cells")
        return max(ok_cells, key=lambda c: c.result.rho)


def align(dm: DistanceMatrix, ref: ReferencePairs, method: str = "", k: int = 0) -> AlignmentResult:
    """Correlate a distance matrix against reference pair scores.

    Pairs whose languages are missing from the matrix, and pairs marked
    undefined, are excluded and counted. Needs at least 3 usable pairs.
    """
    idx = {name: i for i, name in enumerate(dm.languages)}
    dists: list[float] = []
    scores: list[float] = []
    excluded = 0
    for a, b, score in ref.pairs:
        i = idx.get(a)
        j = idx.get(b)
        if i is None or j is None or not dm.defined[i, j]:
            excluded += 1
            continue
        dists.append(float(dm.values[i, j]))
        scores.append(score)
    if len(dists) < 3:
        raise DegenerateInputError(
            f"only {len(dists)} usable reference pairs after {excluded} exclusions; need at least 3"
        )
    rho, p_value = spearman(np.asarray(dists), np.asarray(scores))
    return AlignmentResult(
        method=method,
        k=k,
        rho=rho,
        p_value=p_value,
        n_pairs=len(dists),
        n_excluded=excluded,
    )


def language_vectors(
    completed: CompletedMatrix,
    languages: list[str],
    continuous: bool = False,
) -> np.ndarray:
    """Rows of the completed matrix for ``languages``, binary by default."""
    pos = {name: i for i, name in enumerate(completed.languages)}
    unknown = [name for name in languages if name not in pos]
    if unknown:
        raise DataError(f"languages absent from completion: {unknown}")
    rows = [pos[name] for name in languages]
    source = completed.continuous if continuous else completed.binary.astype(np.float64)
    return source[rows, :]


def _evaluate_subset(
    subset_matrix: TriStateMatrix,
    ref: ReferencePairs,
    eval_languages: list[str],
    params: ImputeParams,
    impute_seed: int,
    continuous: bool,
    method: str,
    k: int,
) -> tuple[AlignmentResult, float]:
    completed = impute_with_params(subset_matrix, params, seed=impute_seed)
    vectors = language_vectors(completed, eval_languages, continuous=continuous)
    dm = distance_matrix(vectors, eval_languages)
    return align(dm, ref, method=method, k=k), completed.lam


def run_sweep(
    matrix: TriStateMatrix,
    labels: ClassLabels | None,
    ref: ReferencePairs,
    methods: list[str] | None = None,
    ks: list[int] | None = None,
    params: ImputeParams | None = None,
    seed: int = 0,
    continuous: bool = False,
    jobs: int = 1,
    neighbors: int = 5,
) -> SweepGrid:
    """Evaluate every (method, k) cell plus the full-feature baseline.

    Each cell selects its subset on the raw matrix, completes the reduced
    matrix on its own, derives distances over the languages named by the
    reference pairs, and correlates them with the reference scores. Reduced
    matrices keep the original column order, so two methods choosing the
    same feature set produce identical cells, and a cell holding every
    feature reproduces the baseline exactly. Cells that fail (degenerate
    correlations, impossible k) are recorded in the grid rather than
    aborting the sweep. With ``jobs`` > 1 cells run in a thread pool;
    outputs are identical to the serial run.
    """
    methods = list(METHODS) if methods is None else list(methods)
    ks = list(DEFAULT_KS) if ks is None else list(ks)
    params = params or ImputeParams()
    if not methods:
        raise DataError("methods list must be non-empty")
    if not ks:
        raise DataError("ks list must be non-empty")
    for method in methods:
        if method not in METHODS:
            raise DataError(f"unknown selection method: {method!r} (expected one of {METHODS})")
    if "cfs" in methods and labels is None:
        raise DataError("cfs selection requires class labels")
    if any(k < 1 for k in ks):
        raise DataError(f"subset sizes must be positive, got {ks}")
    if len(set(ks)) != len(ks):
        raise DataError(f"duplicate subset sizes: {ks}")

    present = set(matrix.languages)
    eval_languages = [code for code in ref.languages() if code in present]
    if len(eval_languages) < 3:
        raise DataError(
            f"only {len(eval_languages)} reference languages present in the matrix; need at least 3"
        )

    baseline, baseline_lam = _evaluate_subset(
        matrix,
        ref,
        eval_languages,
        params,
        seed,
        continuous,
        BASELINE_METHOD,
        matrix.n_features,
    )

    def run_cell(method: str, k: int) -> SweepCell:
        try:
            subset = select_subset(matrix, method, k, labels=labels, neighbors=neighbors)
            result, lam = _evaluate_subset(
                matrix.select_features(sorted(subset.indices)),
                ref,
                eval_languages,
                params,
                seed,
                continuous,
                method,
                k,
            )
            return SweepCell(
                method=method,
                k=k,
                result=result,
                lam=lam,
                feature_names=list(subset.feature_names),
            )
        except (DataError, DegenerateInputError, FloatingPointError) as exc:
            return SweepCell(method=method, k=k, error=str(exc))

    tasks = [(method, k) for method in methods for k in ks]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cells = list(pool.map(lambda mk: run_cell(*mk), tasks))
    else:
        cells = [run_cell(method, k) for method, k in tasks]

    return SweepGrid(
        methods=methods,
        ks=ks,
        cells=cells,
        baseline=baseline,
        baseline_lam=baseline_lam,
        seed=seed,
    )


@dataclass
class VectorTable:
    """Per-language vectors over a selected feature subset, ready for downstream consumers."""

    languages: list[str]
    features: list[str]
    values: np.ndarray


def export_vectors(
    completed: CompletedMatrix,
    subset: FeatureSubset,
    prefix_filter: str | None = None,
    continuous: bool = False,
) -> VectorTable:
    """Vectors over the subset's features, optionally restricted to one name prefix."""
    names = list(subset.feature_names)
    if prefix_filter is not None:
        names = [name for name in names if name.startswith(prefix_filter)]
        if not names:
            raise DataError(f"prefix {prefix_filter!r} matches no feature in the subset")
    cols = [completed.column_for(name) for name in names]
    source = completed.continuous if continuous else completed.binary.astype(np.float64)
    return VectorTable(
        languages=list(completed.languages),
        features=names,
        values=source[:, cols],
    )


def write_vector_csv(path, table: VectorTable) -> None:
    """One row per language (lexicographic), one column per feature, values as written."""
    order = np.argsort(np.asarray(table.languages, dtype=object))
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["language"] + table.features)
        for i in order:
            writer.writerow(
                [table.languages[i]] + [f"{v:.12g}" for v in table.values[i, :]]
            )


def plot_grid(path, grid: SweepGrid) -> None:
    """Heatmap of grid correlations, baseline on the first row; failed cells blank."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = [BASELINE_METHOD] + grid.methods
    data = np.full((len(rows), len(grid.ks)), np.nan)
    data[0, :] = grid.baseline.rho
    for r, method in enumerate(grid.methods, start=1):
        for c, k in enumerate(grid.ks):
            cell = grid.cell(method, k)
            if cell.ok:
                data[r, c] = cell.result.rho

    fig, ax = plt.subplots(figsize=(max(4, 1.1 * len(grid.ks)), 0.6 * len(rows) + 1.5))
    masked = np.ma.masked_invalid(data)
    im = ax.imshow(masked, aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(grid.ks)), [str(k) for k in grid.ks])
    ax.set_yticks(range(len(rows)), rows)
    ax.set_xlabel("subset size k")
    for r in range(len(rows)):
        for c in range(len(grid.ks)):
            if not masked.mask[r, c]:
                ax.text(c, r, f"{data[r, c]:.3f}", ha="center", va="center", fontsize=8)
    fig.colorbar(im, ax=ax, label="Spearman rho")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _format_cell(value: float) -> str:
    return "" if math.isnan(value) else f"{value:.6f}"


def write_grid_csv(path, grid: SweepGrid) -> None:
    """Wide layout: one row per method plus the baseline, one column per subset size."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["method"] + [str(k) for k in grid.ks])
        writer.writerow(
            [BASELINE_METHOD] + [_format_cell(grid.baseline.rho)] * len(grid.ks)
        )
        for method in grid.methods:
            row = [method]
            for k in grid.ks:
                c = grid.cell(method, k)
                row.append(_format_cell(c.result.rho) if c.ok else "")
            writer.writerow(row)


def write_grid_long_csv(path, grid: SweepGrid) -> None:
    """Long layout: one row per cell with correlation, sample counts, lambda, and any error."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["method", "k", "rho", "p_value", "n_pairs", "n_excluded", "lambda", "error"]
        )
        b = grid.baseline
        writer.writerow(
            [
                b.method,
                b.k,
                _format_cell(b.rho),
                _format_cell(b.p_value),
                b.n_pairs,
                b.n_excluded,
                f"{grid.baseline_lam:.6g}",
                "",
            ]
        )
        for method in grid.methods:
            for k in grid.ks:
                c = grid.cell(method, k)
                if c.ok:
                    r = c.result
                    writer.writerow(
                        [
                            method,
                            k,
                            _format_cell(r.rho),
                            _format_cell(r.p_value),
                            r.n_pairs,
                            r.n_excluded,
                            f"{c.lam:.6g}",
                            "",
                        ]
                    )
                else:
                    writer.writerow([method, k, "", "", "", "", "", c.error])
