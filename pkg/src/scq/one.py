"""Orthonormal encoder: alternate the sign step with a column-by-column unit-norm sweep."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import dual
from .codes import BinaryCodes, compute_B, quantization_loss, sign_pm1
from .errors import ConvergenceFailure, DegenerateColumn, InvalidConfig
from .linalg import ORTHONORMAL, FeatureMatrix, ProjectionMatrix, gram_eigendecomposition

log = logging.getLogger(__name__)

CONVERGED = "converged"
MAX_ITER = "max_iter"


@dataclass(frozen=True)
class TrainConfig:
    L: int
    max_iter: int = 100
    eps: float = 1e-4
    eps_b: float = 1e-4
    eps_u: float = 1e-4
    mu: float = 0.02
    scale_override: float | None = None
    seed: int = 0
    max_inner: int = 10
    # if a sweep would raise the recorded loss, keep the previous V and stop
    monotone_guard: bool = True

    def __post_init__(self):
        if self.L < 1:
            raise InvalidConfig(f"L must be >= 1, got {self.L}")
        if self.max_iter < 1 or self.max_inner < 1:
            raise InvalidConfig("max_iter and max_inner must be >= 1")
        if not min(self.eps, self.eps_b, self.eps_u) > 0:
            raise InvalidConfig("tolerances must be positive")
        if self.mu < 0:
            raise InvalidConfig(f"mu must be >= 0, got {self.mu}")
        if self.scale_override is not None and not self.scale_override > 0:
            raise InvalidConfig(f"scale_override must be positive, got {self.scale_override}")


@dataclass
class LossTrace:
    values: list[float] = field(default_factory=list)
    stop_reason: str = MAX_ITER
    # columns that needed the restricted fallback / re-randomization, per sweep
    fallbacks: int = 0
    reseeded: int = 0

    def __len__(self):
        return len(self.values)

    def is_monotone(self, slack: float = 1e-10) -> bool:
        v = self.values
        return all(v[i + 1] <= v[i] + slack for i in range(len(v) - 1))


def init_V(d: int, L: int, seed: int) -> ProjectionMatrix:
    if not 1 <= L <= d:
        raise InvalidConfig(f"need 1 <= L <= d, got L={L}, d={d}")
    rng = np.random.default_rng(seed)
    Q, R = np.linalg.qr(rng.standard_normal((d, L)))
    # fix column signs so the draw is a deterministic function of the seed
    Q = Q * np.where(np.diag(R) < 0, -1.0, 1.0)
    return ProjectionMatrix(Q, ORTHONORMAL)


def random_orthogonal_column(rng: np.random.Generator, P: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to the (orthogonal) columns of ``P``."""
    d = P.shape[0]
    for _ in range(100):
        x = rng.standard_normal(d)
        for p in P.T:
            x -= p * (p @ x) / (p @ p)
        nx = np.linalg.norm(x)
        if nx > 1e-8:
            return x / nx
    raise DegenerateColumn("could not draw a column orthogonal to the previous ones")


def alternate(
    X: FeatureMatrix,
    cfg: TrainConfig,
    v_step: Callable[[np.ndarray, np.ndarray], np.ndarray],
    objective: Callable[[np.ndarray, np.ndarray], float],
    trace: LossTrace,
    Xw: np.ndarray | None = None,
    V0: np.ndarray | None = None,
) -> np.ndarray:
    """Shared B-step / V-step loop with the relative-reduction stopping rule.

    ``Xw`` is the matrix the codes are computed from (defaults to X.data);
    trainers that work in a rotated basis pass the rotated data and ``V0``.
    """
    Xw = X.data if Xw is None else Xw
    V = init_V(X.d, cfg.L, cfg.seed).data if V0 is None else V0
    prev = None
    for t in range(cfg.max_iter):
        B = sign_pm1(Xw @ V).astype(np.float64)
        V_new = v_step(B, V)
        q = objective(B, V_new)
        if cfg.monotone_guard and prev is not None and q > prev:
            # the column sweep is greedy, not a joint minimizer; the old V with
            # the fresh codes is never worse than the previous record
            log.info("iteration %d: sweep raised the loss (%.6g > %.6g); keeping previous V", t + 1, q, prev)
            trace.values.append(objective(B, V))
            trace.stop_reason = CONVERGED
            break
        V = V_new
        trace.values.append(q)
        # relative reduction below eps; written without division so q = 0 stops cleanly
        if (prev is not None and prev - q < cfg.eps * q) or q == 0.0:
            trace.stop_reason = CONVERGED
            break
        prev = q
    return V


def train_one(X: FeatureMatrix, cfg: TrainConfig,
              V0: np.ndarray | None = None) -> tuple[ProjectionMatrix, LossTrace]:
    """Learn a column-orthonormal d x L projection minimizing (1/n)||B - XV||_F^2.

    ``V0`` replaces the seeded random initialization when given.
    """
    if cfg.L > X.d:
        raise InvalidConfig(f"L={cfg.L} exceeds feature dimension d={X.d}")
    es = gram_eigendecomposition(X)
    lam, n = es.eigenvalues, X.n
    # all sweeps run in the eigenbasis, where (X^T X + n nu I)^{-1} is diagonal
    Xr = X.data @ es.eigenvectors
    rng = np.random.default_rng([cfg.seed, 1])
    trace = LossTrace()

    def sweep(B, V):
        XtB = Xr.T @ B
        cols = np.zeros_like(V)
        for k in range(cfg.L):
            Wp = cols[:, :k]
            w = XtB[:, k]
            try:
                if k == 0:
                    v, _ = dual.solve_column_one_rot(lam, n, w, cfg.eps_b)
                else:
                    v, _ = dual.solve_column_k_rot(lam, n, w, Wp, cfg.eps_b, cfg.eps_u, cfg.max_inner)
            except ConvergenceFailure as exc:
                if abs(exc.v @ exc.v - 1.0) < 10 * cfg.eps_u:
                    v = exc.v
                else:
                    trace.fallbacks += 1
                    v, _ = dual.solve_column_restricted_rot(lam, n, w, Wp, cfg.eps_b)
            except DegenerateColumn:
                log.info("column %d degenerate; drawing a random orthogonal column", k + 1)
                trace.reseeded += 1
                v = random_orthogonal_column(rng, Wp)
            cols[:, k] = v / np.linalg.norm(v)
        return cols

    def objective(B, V):
        return quantization_loss(B, Xr, V)

    V0 = init_V(X.d, cfg.L, cfg.seed).data if V0 is None else ProjectionMatrix(V0, ORTHONORMAL).data
    Vr = alternate(X, cfg, sweep, objective, trace, Xw=Xr, V0=es.rotate(V0))
    return ProjectionMatrix(es.unrotate(Vr), ORTHONORMAL), trace


def final_codes(X: FeatureMatrix, V: ProjectionMatrix) -> BinaryCodes:
    return compute_B(X, V)
