"""Run the full alignment study on one dataset.

Selects feature subsets with every configured method, completes each
reduced matrix, correlates the derived language distances with the
reference scores, prints the resulting grid, and writes descriptive
analyses (type composition, sparsity) of the best-scoring subset.

Usage:
    python3 scripts/run_alignment_sweep.py --config data/synthetic/typospace.cfg
    python3 scripts/run_alignment_sweep.py --config my.cfg --set ks=100,300 --jobs 4
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from typospace.analysis import (
    plot_type_breakdown,
    sparsity_profile,
    type_breakdown,
    write_sparsity_csv,
    write_type_breakdown_csv,
)
from typospace.config import load_config, set_key
from typospace.dataset import load_feature_csv, load_labels_csv, load_reference_csv, union_aggregate
from typospace.errors import ConfigError, DataError, DegenerateInputError
from typospace.evaluation import plot_grid, run_sweep, write_grid_csv, write_grid_long_csv
from typospace.selection import select_subset


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default="data/synthetic/typospace.cfg",
                        help="key=value config naming the input files")
    parser.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    parser.add_argument("--jobs", type=int, default=None, help="parallel sweep workers")
    parser.add_argument("--output-dir", default=None, help="override the output directory")
    return parser.parse_args()


def print_grid(grid) -> None:
    width = max(10, *(len(m) for m in grid.methods))
    header = " " * width + "".join(f"{k:>10}" for k in grid.ks)
    print(header)
    print(f"{'baseline':<{width}}" + f"{grid.baseline.rho:>10.4f}" * len(grid.ks))
    for method in grid.methods:
        row = f"{method:<{width}}"
        for k in grid.ks:
            cell = grid.cell(method, k)
            row += f"{cell.result.rho:>10.4f}" if cell.ok else f"{'x':>10}"
        print(row)


def main() -> int:
    args = parse_args()
    config = load_config(args.config)
    for item in args.set:
        key, _, raw = item.partition("=")
        set_key(config, key.strip(), raw.strip())
    if args.jobs is not None:
        config.jobs = args.jobs
    if args.output_dir is not None:
        config.output_dir = args.output_dir

    sources = [load_feature_csv(path) for path in config.features]
    matrix = sources[0].sorted() if len(sources) == 1 else union_aggregate(sources)
    labels = load_labels_csv(config.labels) if config.labels else None
    if config.reference is None:
        raise ConfigError("reference pairs file required (key: reference)")
    ref = load_reference_csv(config.reference)
    print(f"matrix: {matrix.n_languages} languages x {matrix.n_features} features, "
          f"{matrix.missing_fraction():.1%} missing; {len(ref.pairs)} reference pairs")

    grid = run_sweep(
        matrix,
        labels,
        ref,
        methods=config.methods,
        ks=config.ks,
        params=config.impute_params(),
        seed=config.seed,
        continuous=config.continuous,
        jobs=config.jobs,
        neighbors=config.neighbors,
    )
    print_grid(grid)

    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_grid_csv(out / "grid.csv", grid)
    write_grid_long_csv(out / "grid_long.csv", grid)
    plot_grid(out / "grid.png", grid)

    best = grid.best()
    print(f"\nbest cell: {best.method} k={best.k} rho={best.result.rho:.4f} "
          f"(p={best.result.p_value:.4f}, n={best.result.n_pairs}) "
          f"vs baseline rho={grid.baseline.rho:.4f}")

    subset = select_subset(matrix, best.method, best.k, labels=labels,
                           neighbors=config.neighbors)
    breakdown = type_breakdown(subset, matrix.features)
    profile = sparsity_profile(matrix, subset)
    tag = f"{best.method}_k{best.k}"
    write_type_breakdown_csv(out / f"types_{tag}.csv", breakdown)
    write_sparsity_csv(out / f"sparsity_{tag}.csv", profile)
    plot_type_breakdown(out / f"types_{tag}.png", breakdown)
    for row in breakdown.rows:
        print(f"  type {row.type_name:<8} kept {row.retained}/{row.total} "
              f"({row.retained_proportion:.2f} vs expected {row.expected_proportion:.2f})")
    print(f"  subset mean missing {profile.subset_mean:.3f} "
          f"vs overall {profile.overall_mean:.3f}")
    print(f"artifacts under {out}/")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except (ConfigError, DataError, DegenerateInputError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        sys.exit(1)
