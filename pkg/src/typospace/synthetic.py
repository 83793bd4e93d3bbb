"""Seeded synthetic datasets with planted structure.

Languages fall into a handful of families; a block of discriminative
features follows family-conditional Bernoulli draws with a wide
probability gap, some features are exact copies of discriminative ones,
and the rest is family-independent noise. The generator keeps the fully
observed truth around so reference scores can be computed before any
masking, and selection or completion quality can be judged against it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .dataset import MISSING, ClassLabels, ReferencePairs, TriStateMatrix
from .distance import angular_distance
from .errors import DataError
from .seeding import derive_rng


@dataclass
class PlantedDataset:
    """A generated matrix plus everything needed to check recovery against it."""

    matrix: TriStateMatrix
    labels: ClassLabels
    truth: np.ndarray
    discriminative: list[str]
    duplicates: dict[str, str] = field(default_factory=dict)


def _proper_subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for size in range(1, n):
        out.extend(combinations(range(n), size))
    return out


def planted_family_matrix(
    seed: int,
    n_languages: int = 200,
    n_families: int = 4,
    n_features: int = 50,
    n_discriminative: int = 10,
    n_duplicates: int = 5,
    p_high: tuple[float, float] = (0.88, 0.95),
    p_low: tuple[float, float] = (0.05, 0.12),
    p_high_dup: tuple[float, float] = (0.8, 0.85),
    p_low_dup: tuple[float, float] = (0.15, 0.2),
    missing_fraction: float = 0.0,
) -> PlantedDataset:
    """Generate a family-structured tri-state matrix.

    Discriminative features (named ``S_dNN``) draw from ``p_high`` for a
    feature-specific subset of families and from ``p_low`` for the rest;
    the subsets are distinct across features, so only the declared copies
    (``S_xNN``) are exactly collinear. The last ``n_duplicates``
    discriminative features use the narrower ``*_dup`` windows and are the
    ones copied, keeping copies less attractive than any fresh feature.
    Noise features (``P_nNN``, ``INV_nNN``, ``M_nNN``) ignore the family.
    When ``missing_fraction`` is positive, cells are masked uniformly at
    random while keeping at least one observed cell per language and per
    feature.
    """
    if n_duplicates > n_discriminative:
        raise DataError("cannot have more duplicates than discriminative features")
    n_noise = n_features - n_discriminative - n_duplicates
    if n_noise < 0:
        raise DataError("n_features too small for the requested planted blocks")
    subsets = _proper_subsets(n_families)
    if n_discriminative > len(subsets):
        raise DataError(
            f"at most {len(subsets)} distinct discriminative features for {n_families} families"
        )
    if not 0.0 <= missing_fraction < 1.0:
        raise DataError(f"missing_fraction must be in [0, 1), got {missing_fraction}")

    rng = derive_rng(seed, "planted", n_languages, n_features)
    languages = [f"lang{i:03d}" for i in range(n_languages)]
    family_names = [f"fam{i}" for i in range(n_families)]
    assignment = rng.permutation(n_languages) % n_families
    labels = ClassLabels(
        families={languages[i]: family_names[assignment[i]] for i in range(n_languages)}
    )

    chosen = rng.choice(len(subsets), size=n_discriminative, replace=False)
    truth = np.zeros((n_languages, n_features), dtype=np.int8)
    disc_names = [f"S_d{i:02d}" for i in range(n_discriminative)]
    n_strong = n_discriminative - n_duplicates
    for col, pick in enumerate(chosen):
        high_families = set(subsets[int(pick)])
        hi = rng.uniform(*(p_high if col < n_strong else p_high_dup))
        lo = rng.uniform(*(p_low if col < n_strong else p_low_dup))
        prob = np.where(np.isin(assignment, list(high_families)), hi, lo)
        truth[:, col] = (rng.random(n_languages) < prob).astype(np.int8)

    dup_names = [f"S_x{i:02d}" for i in range(n_duplicates)]
    duplicates: dict[str, str] = {}
    for i in range(n_duplicates):
        original = n_strong + i
        truth[:, n_discriminative + i] = truth[:, original]
        duplicates[dup_names[i]] = disc_names[original]

    noise_names = []
    for i in range(n_noise):
        prefix = ("P", "INV", "M")[i % 3]
        noise_names.append(f"{prefix}_n{i:02d}")
        p = rng.uniform(0.2, 0.8)
        truth[:, n_discriminative + n_duplicates + i] = (
            rng.random(n_languages) < p
        ).astype(np.int8)

    values = truth.copy()
    if missing_fraction > 0.0:
        mask = rng.random(values.shape) < missing_fraction
        # keep one observed cell per row and per column
        for i in range(n_languages):
            mask[i, rng.integers(n_features)] = False
        for j in range(n_features):
            mask[rng.integers(n_languages), j] = False
        values[mask] = MISSING

    matrix = TriStateMatrix(
        languages=languages,
        features=disc_names + dup_names + noise_names,
        values=values,
    )
    return PlantedDataset(
        matrix=matrix,
        labels=labels,
        truth=truth,
        discriminative=disc_names,
        duplicates=duplicates,
    )


def reference_from_subset(
    dataset: PlantedDataset,
    feature_names: list[str],
    n_reference_languages: int = 12,
    noise: float = 0.0,
    seed: int = 0,
) -> ReferencePairs:
    """Reference scores = true angular distances over the named features.

    Draws a seeded sample of languages, skips any whose true vector is
    zero over the chosen features, and emits one scored pair for each
    remaining combination. ``noise`` adds clipped Gaussian jitter.
    """
    pos = {name: j for j, name in enumerate(dataset.matrix.features)}
    unknown = [n for n in feature_names if n not in pos]
    if unknown:
        raise DataError(f"unknown feature names: {unknown}")
    cols = [pos[n] for n in feature_names]

    rng = derive_rng(seed, "reference", len(feature_names))
    order = rng.permutation(dataset.matrix.n_languages)
    rows: list[int] = []
    for i in order:
        if dataset.truth[i, cols].any():
            rows.append(int(i))
        if len(rows) == n_reference_languages:
            break
    if len(rows) < 3:
        raise DataError("too few non-zero languages for a reference set")

    vectors = dataset.truth[np.ix_(rows, cols)].astype(np.float64)
    pairs: list[tuple[str, str, float]] = []
    for a, b in combinations(range(len(rows)), 2):
        d = angular_distance(vectors[a], vectors[b])
        if noise > 0.0:
            d = max(0.0, d + float(rng.normal(0.0, noise)))
        pairs.append(
            (dataset.matrix.languages[rows[a]], dataset.matrix.languages[rows[b]], d)
        )
    return ReferencePairs(pairs=pairs)


def planted_low_rank(
    seed: int,
    n_rows: int = 100,
    n_cols: int = 40,
    rank: int = 2,
    observed_fraction: float = 0.5,
) -> tuple[np.ndarray, np.ndarray]:
    """Low-rank truth in [0, 1] plus a seeded observation mask.

    Returns (truth, observed) where ``observed`` keeps roughly the given
    fraction of cells with every row and column observed at least once.
    """
    rng = derive_rng(seed, "low-rank", n_rows, n_cols, rank)
    left = rng.random((n_rows, rank))
    right = rng.random((rank, n_cols))
    truth = left @ right
    truth /= truth.max()

    observed = rng.random((n_rows, n_cols)) < observed_fraction
    for i in range(n_rows):
        observed[i, rng.integers(n_cols)] = True
    for j in range(n_cols):
        observed[rng.integers(n_rows), j] = True
    return truth, observed
