"""Write the 600 x 32 labeled synthetic fixture used by the CLI end-to-end test."""

import argparse
from pathlib import Path

from scq.io import write_features, write_labels
from scq.synthetic import labeled_clusters


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default=str(Path(__file__).resolve().parents[1] / "tests" / "fixtures"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    X, y = labeled_clusters(600, 32, classes=10, seed=args.seed, noise=3.0)
    # first 500 rows form the database, last 100 the queries
    write_features(out / "db.scqf", X[:500])
    write_labels(out / "db_labels.txt", y[:500])
    write_features(out / "query.scqf", X[500:])
    write_labels(out / "query_labels.txt", y[500:])
    print(f"wrote fixture to {out}")


if __name__ == "__main__":
    main()
