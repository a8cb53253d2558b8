"""Hamming ranking over packed codes, the three retrieval metrics, and model encoding."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codes import BinaryCodes, sign_pm1
from .errors import InvalidInput
from .model import HashModel

ZERO = "zero"
EXCLUDE = "exclude"


def _tail_mask(L: int) -> np.ndarray:
    nbytes = (L + 7) // 8
    mask = np.full(nbytes, 0xFF, dtype=np.uint8)
    if L % 8:
        mask[-1] = (1 << (L % 8)) - 1
    return mask


def _packed(c) -> np.ndarray:
    return c.packed if isinstance(c, BinaryCodes) else np.asarray(c, dtype=np.uint8)


def hamming_distance(a, b, L: int) -> int:
    """Number of differing bits among the first L bits of two packed codes."""
    a = np.asarray(a, dtype=np.uint8).ravel()
    b = np.asarray(b, dtype=np.uint8).ravel()
    nbytes = (L + 7) // 8
    if a.shape != b.shape or a.shape[0] != nbytes:
        raise InvalidInput(f"packed lengths {a.shape[0]} and {b.shape[0]} do not match L={L}")
    return int(np.bitwise_count((a ^ b) & _tail_mask(L)).sum())


def hamming_to_all(query_packed: np.ndarray, db_packed: np.ndarray, L: int) -> np.ndarray:
    """Distances from one packed code to every row of ``db_packed``."""
    x = np.bitwise_and(np.bitwise_xor(db_packed, query_packed), _tail_mask(L))
    return np.bitwise_count(x).sum(axis=1, dtype=np.int64)


def _check(db_codes, db_labels, query_codes, query_labels):
    db = _packed(db_codes)
    q = _packed(query_codes)
    db_labels = np.asarray(db_labels)
    query_labels = np.asarray(query_labels)
    if db.ndim != 2 or db.shape[0] == 0:
        raise InvalidInput("database is empty")
    if q.ndim != 2 or q.shape[1] != db.shape[1]:
        raise InvalidInput(f"query code width {q.shape} does not match database {db.shape}")
    if db_labels.shape != (db.shape[0],) or query_labels.shape != (q.shape[0],):
        raise InvalidInput("label vectors must match the number of codes")
    return db, q, db_labels, query_labels


def _L_of(codes, width: int) -> int:
    return codes.L if isinstance(codes, BinaryCodes) else 8 * width


@dataclass(frozen=True)
class EvalResult:
    map: float
    prec_at_r2: float
    prec_at_k: float
    k: int
    per_query_ap: np.ndarray | None = None
    per_query_r2: np.ndarray | None = None
    per_query_k: np.ndarray | None = None


def _per_query(db, q, db_labels, query_labels, L, k, radius=2):
    nq = q.shape[0]
    ap = np.zeros(nq)
    r2 = np.zeros(nq)
    pk = np.zeros(nq)
    has_rel = np.zeros(nq, dtype=bool)
    kk = min(k, db.shape[0])
    for i in range(nq):
        dist = hamming_to_all(q[i], db, L)
        # ties at equal distance keep ascending database index
        order = np.argsort(dist, kind="stable")
        rel = db_labels[order] == query_labels[i]
        nrel = int(rel.sum())
        has_rel[i] = nrel > 0
        if nrel:
            hits = np.flatnonzero(rel).astype(np.longdouble)
            # extended-precision accumulation, rounded once to float64
            ap[i] = float(np.mean(np.arange(1, nrel + 1, dtype=np.longdouble) / (hits + 1)))
        within = dist <= radius
        if within.any():
            r2[i] = np.mean(db_labels[within] == query_labels[i])
        pk[i] = rel[:kk].mean()
    return ap, r2, pk, has_rel


def _mean(vals, has_rel, policy):
    if policy == EXCLUDE:
        vals = vals[has_rel]
    return float(vals.mean()) if vals.size else 0.0


def evaluate(db_codes, db_labels, query_codes, query_labels, k: int = 1000, L: int | None = None,
             zero_relevant: str = ZERO, keep_per_query: bool = False) -> EvalResult:
    if k < 1:
        raise InvalidInput(f"k must be >= 1, got {k}")
    db, q, dl, ql = _check(db_codes, db_labels, query_codes, query_labels)
    L = _L_of(db_codes, db.shape[1]) if L is None else L
    ap, r2, pk, has_rel = _per_query(db, q, dl, ql, L, k)
    return EvalResult(
        map=_mean(ap, has_rel, zero_relevant),
        prec_at_r2=float(r2.mean()),
        prec_at_k=float(pk.mean()),
        k=k,
        per_query_ap=ap if keep_per_query else None,
        per_query_r2=r2 if keep_per_query else None,
        per_query_k=pk if keep_per_query else None,
    )


def mean_average_precision(db_codes, db_labels, query_codes, query_labels, L: int | None = None,
                           zero_relevant: str = ZERO) -> float:
    return evaluate(db_codes, db_labels, query_codes, query_labels, L=L, zero_relevant=zero_relevant).map


def precision_at_radius2(db_codes, db_labels, query_codes, query_labels, L: int | None = None) -> float:
    """Precision within Hamming radius 2; a query with nothing in range scores 0."""
    return evaluate(db_codes, db_labels, query_codes, query_labels, L=L).prec_at_r2


def precision_at_k(db_codes, db_labels, query_codes, query_labels, k: int = 1000, L: int | None = None) -> float:
    return evaluate(db_codes, db_labels, query_codes, query_labels, k=k, L=L).prec_at_k


def encode(X_raw, model: HashModel) -> BinaryCodes:
    """sign(x W - offset) with mean, PCA, scale and V folded into one affine map."""
    X = np.asarray(X_raw, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.d_in:
        raise InvalidInput(f"features have shape {X.shape}, model expects d_in={model.d_in}")
    W, offset = model.folded
    return BinaryCodes.from_codes(sign_pm1(X @ W - offset))


def encode_staged(X_raw, model: HashModel) -> tuple[BinaryCodes, np.ndarray]:
    """Center, reduce, scale, project, one stage at a time; also returns the pre-sign values."""
    X = np.asarray(X_raw, dtype=np.float64) - model.mean
    if model.pca is not None:
        X = X @ model.pca
    U = (X * model.scale) @ model.V
    return BinaryCodes.from_codes(sign_pm1(U)), U
