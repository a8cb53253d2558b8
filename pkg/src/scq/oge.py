"""Orthogonal encoder: ridge-penalized columns that are only required to be mutually orthogonal."""

from __future__ import annotations

import logging

import numpy as np

from .codes import quantization_loss
from .dual import ColumnSystem, _as_columns, solve_phi
from .errors import DegenerateColumn, InvalidConfig
from .linalg import ORTHOGONAL, EigenSystem, FeatureMatrix, ProjectionMatrix, gram_eigendecomposition
from .one import LossTrace, TrainConfig, alternate, init_V, random_orthogonal_column

log = logging.getLogger(__name__)


def inverse_spectrum(es: EigenSystem, mu: float) -> np.ndarray:
    """Diagonal of (X^T X + n mu I)^{-1} in the eigenbasis: the factorized fixed inverse Z."""
    return 1.0 / es.shifted(mu)


class IncrementalSystem:
    """Grows A_k = (n/2) V^T Z V one row and column per accepted column.

    Vectors are stored in eigenbasis coordinates, where Z is the diagonal ``z``.
    """

    def __init__(self, z: np.ndarray, n: int):
        self.z = z
        self.n = n
        self.cols: list[np.ndarray] = []
        self.A = np.zeros((0, 0))

    @property
    def W(self) -> np.ndarray:
        return np.column_stack(self.cols) if self.cols else np.zeros((self.z.shape[0], 0))

    def append(self, v: np.ndarray) -> None:
        zv = self.z * v
        k = len(self.cols)
        A = np.empty((k + 1, k + 1))
        A[:k, :k] = self.A
        if k:
            row = 0.5 * self.n * (self.W.T @ zv)
            A[k, :k] = row
            A[:k, k] = row
        A[k, k] = 0.5 * self.n * float(v @ zv)
        self.A = A
        self.cols.append(v)

    def system(self, w: np.ndarray) -> ColumnSystem:
        c = self.W.T @ (self.z * w)
        return ColumnSystem(self.A, c)


def _v1_rot(z, w):
    return z * w


def _vk_rot(z, w, cache: IncrementalSystem):
    sys = cache.system(w)
    phi = solve_phi(sys)
    r = w - 0.5 * cache.n * (cache.W @ phi) if phi.size else w
    v = z * r
    if not np.any(v):
        raise DegenerateColumn(f"column {len(cache.cols) + 1}: constrained right-hand side vanished")
    return v, phi, sys


def solve_v1_oge(es: EigenSystem, Xt_b1, n: int | None = None, mu: float = 0.02) -> np.ndarray:
    if not mu > 0:
        raise InvalidConfig(f"mu must be positive, got {mu}")
    z = inverse_spectrum(es, mu)
    return es.unrotate(_v1_rot(z, es.rotate(np.asarray(Xt_b1, dtype=np.float64))))


def solve_vk_oge(es: EigenSystem, Xt_bk, prev_cols, n: int | None = None, mu: float = 0.02,
                 cache: IncrementalSystem | None = None) -> np.ndarray:
    """v_k = Z (X^T b_k - (n/2) sum_i phi_i v_i) with Phi = A_k^{-1} c_k.

    With ``cache`` the previous columns are taken from it; otherwise it is
    rebuilt from ``prev_cols``.
    """
    n = es.n if n is None else n
    if cache is None:
        cache = IncrementalSystem(inverse_spectrum(es, mu), n)
        for p in _as_columns(prev_cols, es.d).T:
            cache.append(es.rotate(p))
    v, _, _ = _vk_rot(cache.z, es.rotate(np.asarray(Xt_bk, dtype=np.float64)), cache)
    return es.unrotate(v)


def train_oge(X: FeatureMatrix, cfg: TrainConfig) -> tuple[ProjectionMatrix, LossTrace]:
    """Learn a column-orthogonal projection for (1/n)||B - XV||_F^2 + mu * sum ||v_i||^2."""
    if cfg.L > X.d:
        raise InvalidConfig(f"L={cfg.L} exceeds feature dimension d={X.d}")
    if not cfg.mu > 0:
        raise InvalidConfig(f"OgE needs mu > 0, got {cfg.mu}")
    es = gram_eigendecomposition(X)
    n = X.n
    z = inverse_spectrum(es, cfg.mu)
    Xr = X.data @ es.eigenvectors
    rng = np.random.default_rng([cfg.seed, 2])
    trace = LossTrace()

    def sweep(B, V):
        XtB = Xr.T @ B
        cache = IncrementalSystem(z, n)
        for k in range(cfg.L):
            w = XtB[:, k]
            try:
                if k == 0:
                    v = _v1_rot(z, w)
                    if not np.any(v):
                        raise DegenerateColumn("column 1: X^T b vanished")
                else:
                    v, _, _ = _vk_rot(z, w, cache)
            except DegenerateColumn:
                trace.reseeded += 1
                W = cache.W
                scale = float(np.mean(np.linalg.norm(W, axis=0))) if k else 1.0
                v = scale * random_orthogonal_column(rng, W)
            cache.append(v)
        return cache.W

    def objective(B, V):
        return quantization_loss(B, Xr, V) + cfg.mu * float(np.sum(V * V))

    V0 = es.rotate(init_V(X.d, cfg.L, cfg.seed).data)
    Vr = alternate(X, cfg, sweep, objective, trace, Xw=Xr, V0=V0)
    return ProjectionMatrix(es.unrotate(Vr), ORTHOGONAL), trace
