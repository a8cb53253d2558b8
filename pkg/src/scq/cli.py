"""Command-line entry point: train, encode, eval, analyze-scale."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

import numpy as np

from . import io as fio
from .errors import FormatError, InvalidConfig, InvalidData, InvalidInput, NumericalFailure
from .linalg import FeatureMatrix
from .model import atomic_write, load_model, save_model
from .one import TrainConfig
from .pipeline import DEFAULT_PCA_DIM, fit_model, prepare
from .retrieval import encode, evaluate
from .scale import compute_scale, default_grid, sweep_scale

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
SEED_ENV = "SCQ_SEED"

log = logging.getLogger("scq")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError as exc:
        raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from exc


def _pca_dim(args):
    return None if args.no_pca else args.pca_dim


def cmd_train(args) -> int:
    raw = fio.read_features(args.features)
    cfg = TrainConfig(L=args.bits, max_iter=args.max_iter, eps=args.eps, eps_b=args.eps, eps_u=args.eps,
                      mu=args.mu, scale_override=args.scale, seed=_seed(args))
    model = fit_model(raw, args.method, cfg, pca_dim=_pca_dim(args))
    save_model(model, args.out)
    log.info("trained %s: L=%d scale=%.6g iterations=%s", model.method, model.L, model.scale,
             model.hyperparams.get("iterations"))
    return EXIT_OK


def cmd_encode(args) -> int:
    model = load_model(args.model)
    codes = encode(fio.read_features(args.features), model)
    fio.write_codes(args.out, codes)
    return EXIT_OK


def cmd_eval(args) -> int:
    db = fio.read_codes(args.db_codes)
    q = fio.read_codes(args.query_codes)
    if db.L != q.L:
        raise InvalidInput(f"database codes have L={db.L}, query codes have L={q.L}")
    res = evaluate(db, fio.read_labels(args.db_labels), q, fio.read_labels(args.query_labels),
                   k=args.k, zero_relevant=args.zero_relevant)
    if args.json:
        print(json.dumps({"map": res.map, "prec_at_r2": res.prec_at_r2, "prec_at_k": res.prec_at_k, "k": res.k}))
    else:
        print(f"mAP: {100 * res.map:.2f}")
        print(f"prec@r2: {100 * res.prec_at_r2:.2f}")
        print(f"prec@{res.k}: {100 * res.prec_at_k:.2f}")
    return EXIT_OK


def cmd_analyze_scale(args) -> int:
    prep = prepare(fio.read_features(args.features), _pca_dim(args))
    s_formula = compute_scale(prep.variances_desc, args.bits)
    grid = default_grid(s_formula, args.points)
    if args.grid_lo is not None or args.grid_hi is not None:
        lo = args.grid_lo if args.grid_lo is not None else s_formula / 8
        hi = args.grid_hi if args.grid_hi is not None else s_formula * 8
        if not 0 < lo <= hi:
            raise UsageError(f"need 0 < grid-lo <= grid-hi, got {lo}, {hi}")
        grid = np.geomspace(lo, hi, args.points)
    cfg = TrainConfig(L=args.bits, max_iter=args.max_iter, seed=_seed(args))
    rows = sweep_scale(FeatureMatrix(prep.X.data, centered=True), args.bits, grid, cfg, workers=args.workers)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s", "s_over_formula", "loss_per_bit", "retained_variance", "mean_abs_gap", "iterations", "error"])
    for r in rows:
        w.writerow([repr(r.s), repr(r.s / s_formula), repr(r.loss_per_bit), repr(r.retained_variance),
                    repr(r.mean_abs_gap), r.iterations, r.error])
    atomic_write(args.out, buf.getvalue())
    return EXIT_OK


def _add_pca(p):
    p.add_argument("--pca-dim", type=int, default=DEFAULT_PCA_DIM,
                   help="reduce to this many dimensions when the input is wider (default 512)")
    p.add_argument("--no-pca", action="store_true", help="never apply the PCA pre-reduction")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scq", description="Binary hashing by quantization-loss minimization.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="fit a hash model")
    p.add_argument("--method", required=True, type=str.lower, choices=["one", "oge", "itq"])
    p.add_argument("--features", required=True)
    p.add_argument("--bits", required=True, type=int)
    _add_pca(p)
    p.add_argument("--scale", type=float, default=None, help="use this scale instead of the eigenvalue formula")
    p.add_argument("--mu", type=float, default=0.02)
    p.add_argument("--eps", type=float, default=1e-4)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help=f"RNG seed (falls back to ${SEED_ENV}, then 0)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("encode", help="encode features with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("eval", help="Hamming-ranking retrieval metrics")
    p.add_argument("--db-codes", required=True)
    p.add_argument("--db-labels", required=True)
    p.add_argument("--query-codes", required=True)
    p.add_argument("--query-labels", required=True)
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--zero-relevant", choices=["zero", "exclude"], default="zero",
                   help="how queries without relevant items enter mAP")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("analyze-scale", help="sweep the data scale and tabulate loss and retained variance")
    p.add_argument("--features", required=True)
    p.add_argument("--bits", required=True, type=int)
    p.add_argument("--grid-lo", type=float, default=None)
    p.add_argument("--grid-hi", type=float, default=None)
    p.add_argument("--points", type=int, default=16)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1)
    _add_pca(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze_scale)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidConfig) as exc:
        print(f"scq {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, InvalidData, InvalidInput, OSError) as exc:
        print(f"scq {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalFailure as exc:
        print(f"scq {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
