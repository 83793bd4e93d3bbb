"""Generate the bundled synthetic dataset.

Emits two source CSVs whose union reproduces a planted family-structured
matrix, family labels, reference pair scores derived from the true
discriminative-feature distances, and a ready-to-run config file.
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

from typospace.dataset import MISSING, TriStateMatrix, write_feature_csv
from typospace.seeding import derive_rng
from typospace.synthetic import planted_family_matrix, reference_from_subset


def split_sources(matrix: TriStateMatrix, seed: int) -> tuple[TriStateMatrix, TriStateMatrix]:
    """Two overlapping views of the matrix whose union restores it exactly."""
    rng = derive_rng(seed, "source-split")
    u = rng.random(matrix.values.shape)
    observed = matrix.values != MISSING
    keep_a = observed & (u < 0.65)
    keep_b = observed & (u >= 0.35)

    def view(keep):
        values = matrix.values.copy()
        values[~keep] = MISSING
        return TriStateMatrix(
            languages=list(matrix.languages),
            features=list(matrix.features),
            values=values,
        )

    return view(keep_a), view(keep_b)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/synthetic", help="output directory")
    parser.add_argument("--seed", type=int, default=2024)
    parser.add_argument("--languages", type=int, default=80)
    parser.add_argument("--features", type=int, default=30)
    parser.add_argument("--discriminative", type=int, default=8)
    parser.add_argument("--duplicates", type=int, default=3)
    parser.add_argument("--missing", type=float, default=0.35)
    parser.add_argument("--reference-languages", type=int, default=12)
    parser.add_argument("--reference-noise", type=float, default=0.02)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    ds = planted_family_matrix(
        seed=args.seed,
        n_languages=args.languages,
        n_features=args.features,
        n_discriminative=args.discriminative,
        n_duplicates=args.duplicates,
        missing_fraction=args.missing,
    )
    source_a, source_b = split_sources(ds.matrix, args.seed)
    write_feature_csv(source_a, out / "source_a.csv")
    write_feature_csv(source_b, out / "source_b.csv")

    with open(out / "families.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["language", "family"])
        for code in sorted(ds.labels.families):
            writer.writerow([code, ds.labels.families[code]])

    ref = reference_from_subset(
        ds,
        ds.discriminative,
        n_reference_languages=args.reference_languages,
        noise=args.reference_noise,
        seed=args.seed,
    )
    with open(out / "reference.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["language_a", "language_b", "score"])
        for a, b, score in ref.pairs:
            writer.writerow([a, b, f"{score:.6f}"])

    config = "\n".join(
        [
            f"features={out / 'source_a.csv'},{out / 'source_b.csv'}",
            f"labels={out / 'families.csv'}",
            f"reference={out / 'reference.csv'}",
            "methods=variance,pca,laplacian,cfs",
            "ks=5,10,15",
            f"seed={args.seed}",
            "output_dir=out/synthetic",
        ]
    )
    (out / "typospace.cfg").write_text(config + "\n", encoding="utf-8")

    print(f"wrote {out}/ ({ds.matrix.n_languages} languages x "
          f"{ds.matrix.n_features} features, {len(ref)} reference pairs)")


if __name__ == "__main__":
    main()
