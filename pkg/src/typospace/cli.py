"""Command-line pipeline.

Subcommands wrap one library operation each: select features, impute a
matrix, derive distances, align against reference scores, sweep the full
method x k grid, analyze a subset, or export vectors. Configuration comes
from an optional key=value file plus command-line overrides; every run
writes a manifest recording the config hash, seed, and tool version so
outputs can be reproduced byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import (
    full_subset,
    plot_type_breakdown,
    sparsity_profile,
    type_breakdown,
    write_sparsity_csv,
    write_type_breakdown_csv,
)
from .config import PipelineConfig, config_hash, load_config, set_key
from .dataset import (
    TriStateMatrix,
    load_feature_csv,
    load_labels_csv,
    load_reference_csv,
    union_aggregate,
    write_feature_csv,
)
from .distance import distance_matrix, write_distance_long_csv, write_distance_square_csv
from .errors import ConfigError, DataError, DegenerateInputError, UndefinedDistanceError
from .evaluation import (
    VectorTable,
    align,
    export_vectors,
    language_vectors,
    plot_grid,
    run_sweep,
    write_grid_csv,
    write_grid_long_csv,
    write_vector_csv,
)
from .imputation import impute_with_params
from .seeding import GENERATOR_VERSION
from .selection import (
    METHODS,
    laplacian_scores,
    pca_loading_scores,
    select_subset,
    variance_scores,
)


def _build_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config) if args.config else PipelineConfig()
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        set_key(config, key.strip(), raw.strip())
    if args.seed is not None:
        config.seed = args.seed
    if args.output_dir is not None:
        config.output_dir = args.output_dir
    if args.jobs is not None:
        config.jobs = args.jobs
    if getattr(args, "continuous", False):
        config.continuous = True
    return config


def _load_matrix(config: PipelineConfig) -> TriStateMatrix:
    if not config.features:
        raise ConfigError("no feature CSVs configured (key: features)")
    sources = [load_feature_csv(path) for path in config.features]
    if len(sources) == 1:
        return sources[0].sorted()
    return union_aggregate(sources)


def _load_labels(config: PipelineConfig, required: bool):
    if config.labels is None:
        if required:
            raise ConfigError("labels file required (key: labels)")
        return None
    return load_labels_csv(config.labels)


def _load_reference(config: PipelineConfig):
    if config.reference is None:
        raise ConfigError("reference pairs file required (key: reference)")
    return load_reference_csv(config.reference)


def _out_dir(config: PipelineConfig) -> Path:
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(out: Path, command: str, config: PipelineConfig, extras: dict) -> None:
    manifest = {
        "command": command,
        "config_hash": config_hash(config),
        "seed": config.seed,
        "generator_version": GENERATOR_VERSION,
        "version": __version__,
    }
    manifest.update(extras)
    with open(out / "manifest.json", "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _method_and_k(args: argparse.Namespace, config: PipelineConfig) -> tuple[str, int]:
    method = args.method or (config.methods[0] if config.methods else METHODS[0])
    k = args.k if args.k is not None else (config.ks[0] if config.ks else 10)
    return method, k


def _write_subset_csv(path: Path, subset) -> None:
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["rank", "feature_index", "feature_name"])
        for rank, (index, name) in enumerate(
            zip(subset.indices, subset.feature_names), start=1
        ):
            writer.writerow([rank, index, name])


def cmd_select(args: argparse.Namespace, config: PipelineConfig) -> dict:
    matrix = _load_matrix(config)
    method, k = _method_and_k(args, config)
    labels = _load_labels(config, required=method == "cfs")
    subset = select_subset(matrix, method, k, labels=labels, neighbors=config.neighbors)
    out = _out_dir(config)
    _write_subset_csv(out / f"subset_{method}_k{k}.csv", subset)

    scorers = {
        "variance": variance_scores,
        "pca": pca_loading_scores,
        "laplacian": lambda m: laplacian_scores(m, neighbors=config.neighbors),
    }
    if method in scorers:
        ranking = scorers[method](matrix)
        with open(out / f"scores_{method}.csv", "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["feature_index", "feature_name", "score"])
            for index, (name, score) in enumerate(
                zip(ranking.feature_names, ranking.scores)
            ):
                writer.writerow([index, name, f"{score:.12g}"])
    print(f"wrote {out / f'subset_{method}_k{k}.csv'}")
    return {"method": method, "k": k}


def cmd_impute(args: argparse.Namespace, config: PipelineConfig) -> dict:
    matrix = _load_matrix(config)
    completed = impute_with_params(matrix, config.impute_params(), seed=config.seed)
    out = _out_dir(config)
    write_feature_csv(
        TriStateMatrix(
            languages=completed.languages,
            features=completed.features,
            values=completed.binary,
        ),
        out / "completed_binary.csv",
    )
    write_vector_csv(
        out / "completed_continuous.csv",
        VectorTable(
            languages=completed.languages,
            features=completed.features,
            values=completed.continuous,
        ),
    )
    with open(out / "completed_meta.txt", "w", encoding="utf-8") as handle:
        handle.write(f"lambda={completed.lam:g}\n")
        handle.write(f"max_rank={completed.max_rank}\n")
        handle.write(f"iterations={completed.iterations}\n")
        handle.write(f"objective={completed.objective:.12g}\n")
    print(f"wrote {out / 'completed_binary.csv'} (lambda={completed.lam:g}, "
          f"{completed.iterations} iterations)")
    return {
        "lambda": completed.lam,
        "iterations": completed.iterations,
        "objective": completed.objective,
    }


def cmd_distances(args: argparse.Namespace, config: PipelineConfig) -> dict:
    matrix = _load_matrix(config)
    completed = impute_with_params(matrix, config.impute_params(), seed=config.seed)
    vectors = language_vectors(completed, completed.languages, continuous=config.continuous)
    dm = distance_matrix(vectors, completed.languages)
    out = _out_dir(config)
    write_distance_square_csv(out / "distances_square.csv", dm)
    write_distance_long_csv(out / "distances_long.csv", dm)
    undefined = int((~dm.defined).sum() - (~dm.defined).trace())
    print(f"wrote {out / 'distances_long.csv'} ({dm.n_languages} languages)")
    return {"lambda": completed.lam, "n_languages": dm.n_languages,
            "undefined_pairs": undefined // 2}


def cmd_align(args: argparse.Namespace, config: PipelineConfig) -> dict:
    matrix = _load_matrix(config)
    ref = _load_reference(config)
    completed = impute_with_params(matrix, config.impute_params(), seed=config.seed)
    present = set(completed.languages)
    languages = [code for code in ref.languages() if code in present]
    vectors = language_vectors(completed, languages, continuous=config.continuous)
    dm = distance_matrix(vectors, languages)
    result = align(dm, ref, method="all-features", k=matrix.n_features)
    out = _out_dir(config)
    with open(out / "alignment.csv", "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["method", "k", "rho", "p_value", "n_pairs", "n_excluded"])
        writer.writerow(
            [result.method, result.k, f"{result.rho:.6f}", f"{result.p_value:.6f}",
             result.n_pairs, result.n_excluded]
        )
    print(f"rho={result.rho:.4f} p={result.p_value:.4f} "
          f"n_pairs={result.n_pairs} n_excluded={result.n_excluded}")
    return {"rho": result.rho, "p_value": result.p_value, "n_pairs": result.n_pairs}


def cmd_sweep(args: argparse.Namespace, config: PipelineConfig) -> dict:
    matrix = _load_matrix(config)
    ref = _load_reference(config)
    labels = _load_labels(config, required="cfs" in config.methods)
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
    out = _out_dir(config)
    write_grid_csv(out / "grid.csv", grid)
    write_grid_long_csv(out / "grid_long.csv", grid)
    plot_grid(out / "grid.png", grid)
    best = grid.best()
    print(f"baseline rho={grid.baseline.rho:.4f}; "
          f"best {best.method} k={best.k} rho={best.result.rho:.4f}")
    return {
        "baseline_rho": grid.baseline.rho,
        "best_method": best.method,
        "best_k": best.k,
        "best_rho": best.result.rho,
    }


def cmd_analyze(args: argparse.Namespace, config: PipelineConfig) -> dict:
    matrix = _load_matrix(config)
    method, k = _method_and_k(args, config)
    labels = _load_labels(config, required=method == "cfs")
    subset = select_subset(matrix, method, k, labels=labels, neighbors=config.neighbors)
    breakdown = type_breakdown(subset, matrix.features)
    profile = sparsity_profile(matrix, subset)
    out = _out_dir(config)
    write_type_breakdown_csv(out / f"types_{method}_k{k}.csv", breakdown)
    write_sparsity_csv(out / f"sparsity_{method}_k{k}.csv", profile)
    plot_type_breakdown(out / f"types_{method}_k{k}.png", breakdown)
    print(f"subset mean missing {profile.subset_mean:.3f} "
          f"vs overall {profile.overall_mean:.3f}")
    return {"method": method, "k": k, "subset_mean_missing": profile.subset_mean}


def cmd_export(args: argparse.Namespace, config: PipelineConfig) -> dict:
    matrix = _load_matrix(config)
    method, k = _method_and_k(args, config)
    labels = _load_labels(config, required=method == "cfs")
    subset = select_subset(matrix, method, k, labels=labels, neighbors=config.neighbors)
    reduced = matrix.select_features(sorted(subset.indices))
    completed = impute_with_params(reduced, config.impute_params(), seed=config.seed)
    prefix = args.prefix if args.prefix is not None else config.prefix_filter
    table = export_vectors(completed, subset, prefix_filter=prefix,
                           continuous=config.continuous)
    out = _out_dir(config)
    write_vector_csv(out / f"vectors_{method}_k{k}.csv", table)
    print(f"wrote {out / f'vectors_{method}_k{k}.csv'} "
          f"({len(table.features)} features)")
    return {"method": method, "k": k, "n_features": len(table.features),
            "prefix_filter": prefix}


_COMMANDS = {
    "select": cmd_select,
    "impute": cmd_impute,
    "distances": cmd_distances,
    "align": cmd_align,
    "sweep": cmd_sweep,
    "analyze": cmd_analyze,
    "export": cmd_export,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value config file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one config key (repeatable)")
    common.add_argument("--seed", type=int, help="override the config seed")
    common.add_argument("--output-dir", help="override the output directory")
    common.add_argument("--jobs", type=int, help="parallel workers for sweep cells")
    common.add_argument("--continuous", action="store_true",
                        help="use continuous completions instead of binarized ones")

    parser = argparse.ArgumentParser(
        prog="typospace",
        description="Feature selection, completion and distance evaluation "
                    "for sparse binary typological matrices",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("impute", parents=[common], help="complete the matrix")
    sub.add_parser("distances", parents=[common], help="pairwise angular distances")
    sub.add_parser("align", parents=[common],
                   help="correlate full-matrix distances with reference scores")
    sub.add_parser("sweep", parents=[common], help="method x k alignment grid")

    for name, text in (
        ("select", "rank features and emit a top-k subset"),
        ("analyze", "type breakdown and sparsity of a subset"),
        ("export", "per-language vectors over a subset"),
    ):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--method", choices=METHODS, help="selection method")
        p.add_argument("--k", type=int, help="subset size")
        if name == "export":
            p.add_argument("--prefix", help="keep only features with this name prefix")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _build_config(args)
        extras = _COMMANDS[args.command](args, config)
        _write_manifest(_out_dir(config), args.command, config, extras)
    except (ConfigError, DataError, DegenerateInputError, UndefinedDistanceError,
            FloatingPointError, OSError) as exc:
        message = str(exc).replace("\n", "; ")
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
