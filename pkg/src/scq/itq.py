"""Iterative quantization baseline: PCA to L dimensions, then an L x L Procrustes rotation."""

from __future__ import annotations

import numpy as np

from .codes import quantization_loss, sign_pm1
from .errors import InvalidConfig, NumericalFailure
from .linalg import ORTHONORMAL, FeatureMatrix, ProjectionMatrix, pca_fit
from .model import HashModel
from .one import CONVERGED, MAX_ITER, LossTrace


def procrustes_rotation(B, P) -> np.ndarray:
    """Orthogonal R minimizing ||B - P R||_F."""
    B = np.asarray(B, dtype=np.float64)
    P = np.asarray(P, dtype=np.float64)
    if B.shape != P.shape:
        raise InvalidConfig(f"B {B.shape} and P {P.shape} must have equal shapes")
    try:
        S, _, Sh = np.linalg.svd(P.T @ B)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD failed: {exc}") from exc
    return S @ Sh


def fit_itq(X: FeatureMatrix, L: int, iters: int = 50, seed: int = 0) -> tuple[ProjectionMatrix, LossTrace]:
    if not 1 <= L <= X.d:
        raise InvalidConfig(f"need 1 <= L <= d, got L={L}, d={X.d}")
    pc, _ = pca_fit(X, L)
    P = X.data @ pc
    rng = np.random.default_rng(seed)
    R, _ = np.linalg.qr(rng.standard_normal((L, L)))
    trace = LossTrace()
    for _ in range(iters):
        B = sign_pm1(P @ R).astype(np.float64)
        R = procrustes_rotation(B, P)
        trace.values.append(quantization_loss(B, P, R))
    trace.stop_reason = MAX_ITER if iters else CONVERGED
    return ProjectionMatrix(pc @ R, ORTHONORMAL), trace


def train_itq(X: FeatureMatrix, L: int, iters: int = 50, seed: int = 0,
              mean: np.ndarray | None = None) -> HashModel:
    """Fit ITQ on centered ``X`` and wrap it as a model (identity pre-transform, scale of X)."""
    V, trace = fit_itq(X, L, iters, seed)
    mean = np.zeros(X.d) if mean is None else np.asarray(mean, dtype=np.float64)
    return HashModel(
        method="ITQ", L=L, d_in=X.d, mean=mean, scale=X.applied_scale, V=V.data,
        hyperparams={"iters": iters, "seed": seed, "final_loss": trace.values[-1] if trace.values else None},
    )
