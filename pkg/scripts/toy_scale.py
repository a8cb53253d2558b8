"""Two-cluster 2-D toy: how the learned projection moves away from the top PCA axis as the scale grows.

Prints one row per multiple of s_max_var and optionally writes the points
and projection directions to CSV for plotting elsewhere.
"""

import argparse
import csv

import numpy as np

from scq.codes import compute_B, quantization_loss
from scq.linalg import gram_eigendecomposition, pca_from_eigensystem, zero_center
from scq.one import TrainConfig, train_one
from scq.scale import compute_s_max_var, retained_variance_fraction
from scq.synthetic import two_clusters_2d


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--multiples", type=float, nargs="+", default=[1, 2, 4, 8, 12])
    ap.add_argument("--csv", default=None, help="write per-scale directions here")
    args = ap.parse_args()

    X, _ = zero_center(two_clusters_2d(n=args.n, seed=args.seed))
    top, gram_desc = pca_from_eigensystem(gram_eigendecomposition(X), 1)
    smv = compute_s_max_var(X)
    print(f"s_max_var = {smv:.5f}")
    print(f"{'mult':>5} {'|cos(v,pc1)|':>13} {'loss/bit':>9} {'retained':>9} {'iters':>6}")
    rows = []
    for m in args.multiples:
        Xs = X.scaled(m * smv)
        V, trace = train_one(Xs, TrainConfig(L=1, seed=args.seed))
        v = V.data[:, 0]
        cos = abs(float(v @ top[:, 0]))
        loss = quantization_loss(compute_B(Xs, V), Xs, V, per_bit=True)
        ret = retained_variance_fraction(X, V, gram_desc, 1)
        print(f"{m:5g} {cos:13.4f} {loss:9.4f} {ret:9.4f} {len(trace):6d}")
        rows.append([m, v[0], v[1], cos, loss, ret])
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["multiple", "v0", "v1", "abs_cos_pc1", "loss_per_bit", "retained_variance"])
            w.writerows(rows)


if __name__ == "__main__":
    main()
