"""Low-rank completion of incomplete matrices.

Iterative SVD soft-thresholding: missing cells start at the per-column
observed mean, each sweep replaces them with the current low-rank estimate,
and singular values are shrunk by lambda (optionally truncated to a maximum
rank) until the estimate stops moving. The array-level engine works on any
real matrix with NaN holes; the tri-state wrapper restores observed cells
afterwards and adds a binarized view, so typological facts are never
overwritten.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import MISSING, TriStateMatrix
from .errors import DataError
from .seeding import derive_rng

DEFAULT_LAMBDA_GRID = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)


@dataclass
class ArrayCompletion:
    """Raw output of the completion engine on one array."""

    low_rank: np.ndarray
    iterations: int
    objective: float
    objective_trace: list[float]


@dataclass
class CompletedMatrix:
    """Completion of a tri-state matrix.

    ``continuous`` has observed cells restored from the input and estimates
    clamped to [0, 1]; ``binary`` thresholds it at 0.5. ``low_rank`` is the
    raw converged estimate (before restore/clamp), the object the rank and
    nuclear-norm guarantees apply to.
    """

    languages: list[str]
    features: list[str]
    continuous: np.ndarray
    binary: np.ndarray
    low_rank: np.ndarray
    lam: float
    max_rank: int
    iterations: int
    objective: float
    objective_trace: list[float] = field(default_factory=list)

    def column_for(self, feature_name: str) -> int:
        try:
            return self.features.index(feature_name)
        except ValueError:
            raise DataError(f"unknown feature name: {feature_name!r}") from None


def column_mean_fill(X: np.ndarray) -> np.ndarray:
    """Copy of ``X`` with NaN cells replaced by their column's observed mean."""
    observed = ~np.isnan(X)
    counts = observed.sum(axis=0)
    if (counts == 0).any():
        j = int(np.argmax(counts == 0))
        raise DataError(f"column {j} has no observed cells")
    means = np.where(observed, X, 0.0).sum(axis=0) / counts
    return np.where(observed, X, means[np.newaxis, :])


def complete_array(
    X: np.ndarray,
    lam: float,
    max_rank: int | None = None,
    tol: float = 1e-5,
    max_iter: int = 200,
) -> ArrayCompletion:
    """Complete a real matrix with NaN holes by soft-thresholded SVD iteration.

    Parameters
    ----------
    X : ndarray
        Observed values with NaN where missing; at least one observed cell
        per column (needed for the initial mean fill).
    lam : float
        Singular-value shrinkage, >= 0.
    max_rank : int, optional
        Truncate the estimate to this rank each sweep; default full rank.
    tol : float
        Stop when the relative Frobenius change of the estimate drops
        below this.
    max_iter : int
        Iteration cap.

    Returns
    -------
    ArrayCompletion
        The low-rank estimate, iteration count, and per-iteration values
        of the objective 0.5 * ||observed residual||_F^2 + lam * ||Z||_*.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.size == 0:
        raise DataError(f"expected a non-empty 2-d array, got shape {X.shape}")
    if lam < 0:
        raise DataError(f"lambda must be non-negative, got {lam}")
    if tol <= 0:
        raise DataError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise DataError(f"max_iter must be at least 1, got {max_iter}")
    observed = ~np.isnan(X)
    if not observed.any():
        raise DataError("matrix has no observed cells")
    full_rank = min(X.shape)
    rank_cap = full_rank if max_rank is None else min(max_rank, full_rank)
    if rank_cap < 1:
        raise DataError(f"max_rank must be at least 1, got {max_rank}")

    Z = column_mean_fill(X)
    objective_trace: list[float] = []
    iterations = 0
    for iterations in range(1, max_iter + 1):
        W = np.where(observed, X, Z)
        u, sv, vt = np.linalg.svd(W, full_matrices=False)
        shrunk = np.maximum(sv - lam, 0.0)
        shrunk[rank_cap:] = 0.0
        Z_new = (u * shrunk) @ vt
        if not np.isfinite(Z_new).all():
            raise FloatingPointError(
                f"completion diverged at iteration {iterations} "
                f"(lam={lam}, max singular value {sv.max():.3e})"
            )
        residual = X[observed] - Z_new[observed]
        objective_trace.append(0.5 * float(residual @ residual) + lam * float(shrunk.sum()))
        denom = max(float(np.linalg.norm(Z)), 1e-12)
        delta = float(np.linalg.norm(Z_new - Z)) / denom
        Z = Z_new
        if delta < tol:
            break

    return ArrayCompletion(
        low_rank=Z,
        iterations=iterations,
        objective=objective_trace[-1],
        objective_trace=objective_trace,
    )


def _matrix_as_nan_array(matrix: TriStateMatrix) -> np.ndarray:
    X = matrix.values.astype(np.float64)
    X[matrix.values == MISSING] = np.nan
    return X


def soft_impute(
    matrix: TriStateMatrix,
    lam: float,
    max_rank: int | None = None,
    tol: float = 1e-5,
    max_iter: int = 200,
) -> CompletedMatrix:
    """Complete a tri-state matrix; observed cells win over the estimate.

    Runs the array engine on the 0/1 values, then restores every observed
    cell, clamps estimates into [0, 1], and thresholds at 0.5 for the
    binary view.
    """
    X = _matrix_as_nan_array(matrix)
    result = complete_array(X, lam, max_rank=max_rank, tol=tol, max_iter=max_iter)
    observed = matrix.values != MISSING
    continuous = np.clip(np.where(observed, X, result.low_rank), 0.0, 1.0)
    full_rank = min(matrix.n_languages, matrix.n_features)
    return CompletedMatrix(
        languages=list(matrix.languages),
        features=list(matrix.features),
        continuous=continuous,
        binary=(continuous >= 0.5).astype(np.int8),
        low_rank=result.low_rank,
        lam=float(lam),
        max_rank=full_rank if max_rank is None else min(max_rank, full_rank),
        iterations=result.iterations,
        objective=result.objective,
        objective_trace=result.objective_trace,
    )


def holdout_mask(observed: np.ndarray, fraction: float, rng: np.random.Generator) -> np.ndarray:
    """Mask selecting a random holdout among observed cells.

    One observed cell per column is protected so the remaining training
    matrix still supports a mean fill.
    """
    cells = np.argwhere(observed)
    n_cols = observed.shape[1]
    n_hold = int(round(fraction * len(cells)))
    if n_hold < 1 or len(cells) - n_hold < n_cols:
        raise DataError(
            f"too few observed cells ({len(cells)}) to hold out {fraction:.0%}"
        )
    protected = np.zeros(len(cells), dtype=bool)
    by_col: dict[int, list[int]] = {}
    for pos, (_, j) in enumerate(cells):
        by_col.setdefault(int(j), []).append(pos)
    for j in sorted(by_col):
        positions = by_col[j]
        protected[positions[rng.integers(len(positions))]] = True

    eligible = np.flatnonzero(~protected)
    drawn = rng.permutation(eligible)[:n_hold]
    mask = np.zeros(observed.shape, dtype=bool)
    mask[cells[drawn, 0], cells[drawn, 1]] = True
    return mask


def choose_lambda_array(
    X: np.ndarray,
    grid,
    holdout_fraction: float = 0.1,
    seed: int = 0,
    max_rank: int | None = None,
    tol: float = 1e-5,
    max_iter: int = 200,
) -> float:
    """Grid lambda minimizing squared error on a seeded holdout of observed cells."""
    grid = list(grid)
    if not grid:
        raise DataError("lambda grid must be non-empty")
    if not 0.0 < holdout_fraction < 0.5:
        raise DataError(f"holdout_fraction must be in (0, 0.5), got {holdout_fraction}")
    if len(grid) == 1:
        return float(grid[0])

    X = np.asarray(X, dtype=np.float64)
    observed = ~np.isnan(X)
    rng = derive_rng(seed, "holdout", X.shape[0], X.shape[1])
    mask = holdout_mask(observed, holdout_fraction, rng)
    masked = X.copy()
    masked[mask] = np.nan

    truth = X[mask]
    best_lam, best_err = None, np.inf
    for lam in grid:
        result = complete_array(masked, lam, max_rank=max_rank, tol=tol, max_iter=max_iter)
        err = float(np.sum((result.low_rank[mask] - truth) ** 2))
        if err < best_err:
            best_lam, best_err = float(lam), err
    return best_lam


def choose_lambda(
    matrix: TriStateMatrix,
    grid,
    holdout_fraction: float = 0.1,
    seed: int = 0,
    max_rank: int | None = None,
    tol: float = 1e-5,
    max_iter: int = 200,
) -> float:
    """Tri-state wrapper over choose_lambda_array."""
    return choose_lambda_array(
        _matrix_as_nan_array(matrix),
        grid,
        holdout_fraction=holdout_fraction,
        seed=seed,
        max_rank=max_rank,
        tol=tol,
        max_iter=max_iter,
    )


@dataclass
class ImputeParams:
    """Completion hyperparameters; lambda is selected on a holdout when the grid has several values."""

    lambda_grid: tuple[float, ...] = DEFAULT_LAMBDA_GRID
    max_rank: int | None = None
    tol: float = 1e-5
    max_iter: int = 200
    holdout_fraction: float = 0.1


def impute_with_params(matrix: TriStateMatrix, params: ImputeParams, seed: int = 0) -> CompletedMatrix:
    """Select lambda per ``params`` (if the grid has several values) and complete the matrix."""
    lam = choose_lambda(
        matrix,
        params.lambda_grid,
        holdout_fraction=params.holdout_fraction,
        seed=seed,
        max_rank=params.max_rank,
        tol=params.tol,
        max_iter=params.max_iter,
    )
    return soft_impute(
        matrix, lam, max_rank=params.max_rank, tol=params.tol, max_iter=params.max_iter
    )
