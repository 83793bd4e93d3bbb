"""Shared statistical kernel: entropy, mutual information, phi, Spearman rank correlation.

All information quantities use log base 2 (bits). Probabilities are plug-in
(maximum likelihood) estimates without smoothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats as sps

from .errors import DataError, DegenerateInputError

_MI_CLAMP = 1e-12


@dataclass
class ContingencyTable:
    """Joint counts of a binary feature value against a categorical class.

    ``counts[v, c]`` is the number of rows with feature value v in {0, 1} and
    class index c. Built only from rows where the feature is observed.
    """

    counts: np.ndarray

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.ndim != 2 or self.counts.shape[0] != 2:
            raise DataError(f"contingency table must be 2 x n_classes, got {self.counts.shape}")
        if (self.counts < 0).any():
            raise DataError("contingency table counts must be non-negative")

    @property
    def n(self) -> int:
        return int(self.counts.sum())


def entropy(distribution) -> float:
    """Shannon entropy in bits of a probability distribution.

    Probabilities must be non-negative and sum to 1 within 1e-9;
    0 * log 0 is taken as 0.
    """
    p = np.asarray(distribution, dtype=np.float64)
    if (p < 0).any():
        raise DataError("negative probability in distribution")
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise DataError(f"probabilities sum to {total}, expected 1")
    nz = p[p > 0]
    return float(-np.sum(nz * np.log2(nz)))


def mutual_information(table: ContingencyTable) -> float:
    """I(f; c) = H(f) + H(c) - H(f, c) in bits, from plug-in probabilities.

    Tiny negative values from floating-point cancellation are clamped to 0.
    """
    n = table.n
    if n < 1:
        raise DataError("empty contingency table")
    joint = table.counts / n
    h_f = entropy(joint.sum(axis=1))
    h_c = entropy(joint.sum(axis=0))
    h_fc = entropy(joint.ravel())
    mi = h_f + h_c - h_fc
    if mi < -_MI_CLAMP:
        raise AssertionError(f"mutual information {mi} below clamp threshold")
    return max(mi, 0.0)


def phi(x, y) -> float:
    """Phi correlation of two binary columns, over jointly observed rows only.

    ``x`` and ``y`` are arrays with values in {1, 0, -1}; -1 marks Missing.
    Degenerate cases (any zero marginal, or fewer than 2 jointly observed
    rows) return 0 so downstream redundancy sums treat them as no evidence.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    both = (x != -1) & (y != -1)
    if both.sum() < 2:
        return 0.0
    xv = x[both].astype(np.int64)
    yv = y[both].astype(np.int64)
    n11 = int(np.sum((xv == 1) & (yv == 1)))
    n10 = int(np.sum((xv == 1) & (yv == 0)))
    n01 = int(np.sum((xv == 0) & (yv == 1)))
    n00 = int(np.sum((xv == 0) & (yv == 0)))
    n1_, n0_ = n11 + n10, n01 + n00
    n_1, n_0 = n11 + n01, n10 + n00
    denom_sq = float(n1_) * n0_ * n_1 * n_0
    if denom_sq <= 0:
        return 0.0
    value = (n11 * n00 - n10 * n01) / np.sqrt(denom_sq)
    return float(np.clip(value, -1.0, 1.0))


def average_ranks(x) -> np.ndarray:
    """Ranks 1..n with ties assigned the average of their span."""
    x = np.asarray(x, dtype=np.float64)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(len(x), dtype=np.float64)
    i = 0
    while i < len(x):
        j = i
        while j + 1 < len(x) and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_p_value(rho: float, n: int) -> float:
    """Two-sided p-value for a Spearman rho via the t approximation with n-2 df."""
    if n < 3:
        raise DataError(f"need at least 3 observations, got {n}")
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    return float(2.0 * sps.t.sf(abs(t), df=n - 2))


def spearman(x, y) -> tuple[float, float]:
    """Spearman rank correlation with two-sided p-value.

    Ranks use average-rank tie handling; rho is the Pearson correlation of
    the rank vectors. Constant input is rejected as degenerate rather than
    propagating NaN.

    Returns
    -------
    (rho, p) : tuple of float
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise DataError(f"mismatched input shapes {x.shape} vs {y.shape}")
    n = len(x)
    if n < 3:
        raise DataError(f"need at least 3 observations, got {n}")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateInputError("rank correlation undefined for constant input")
    rx = average_ranks(x)
    ry = average_ranks(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    rho = float(np.dot(rx, ry) / np.sqrt(np.dot(rx, rx) * np.dot(ry, ry)))
    rho = float(np.clip(rho, -1.0, 1.0))
    return rho, spearman_p_value(rho, n)
