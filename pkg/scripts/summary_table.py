"""Per-bit quantization loss and retained variance for OnE, OgE and ITQ on anisotropic synthetic data.

All three methods see the same centered data at the eigenvalue-formula scale.
"""

import argparse
import time

import numpy as np

from scq.codes import compute_B, quantization_loss
from scq.itq import fit_itq
from scq.oge import train_oge
from scq.one import TrainConfig, train_one
from scq.pipeline import prepare
from scq.scale import compute_scale, retained_variance_fraction
from scq.synthetic import anisotropic_gaussian


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--d", type=int, default=64)
    ap.add_argument("--bits", type=int, default=16)
    ap.add_argument("--seeds", type=int, default=5)
    args = ap.parse_args()

    stats = {m: {"loss": [], "ret": [], "time": []} for m in ("OnE", "OgE", "ITQ")}
    for seed in range(args.seeds):
        prep = prepare(anisotropic_gaussian(args.n, args.d, seed=seed))
        s = compute_scale(prep.variances_desc, args.bits)
        Xs = prep.X.scaled(s)
        gram_desc = prep.variances_desc * args.n * s * s
        cfg = TrainConfig(L=args.bits, seed=seed)
        for name, fit in (("OnE", lambda: train_one(Xs, cfg)), ("OgE", lambda: train_oge(Xs, cfg)),
                          ("ITQ", lambda: fit_itq(Xs, args.bits, 50, seed))):
            t0 = time.perf_counter()
            V, _ = fit()
            stats[name]["time"].append(time.perf_counter() - t0)
            stats[name]["loss"].append(quantization_loss(compute_B(Xs, V), Xs, V, per_bit=True))
            if name != "OgE":
                stats[name]["ret"].append(retained_variance_fraction(Xs, V, gram_desc, args.bits))

    print(f"n={args.n} d={args.d} L={args.bits}, mean over {args.seeds} seeds")
    print(f"{'method':>6} {'loss/bit':>9} {'retained':>9} {'seconds':>8}")
    for name, st in stats.items():
        ret = f"{100 * np.mean(st['ret']):8.1f}%" if st["ret"] else f"{'n/a':>9}"
        print(f"{name:>6} {np.mean(st['loss']):9.4f} {ret} {np.mean(st['time']):8.3f}")


if __name__ == "__main__":
    main()
