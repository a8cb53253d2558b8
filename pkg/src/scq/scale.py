"""Global data scale: the eigenvalue formula, the unit-ball scale, and scale sweeps."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .codes import compute_B, quantization_loss
from .errors import DegenerateData, DegenerateSpectrum, InvalidConfig, SCQError
from .linalg import FeatureMatrix, ProjectionMatrix, gram_eigendecomposition, pca_from_eigensystem
from .one import TrainConfig, train_one

FORMULA = "formula"
MAX_VAR = "max_var"
OVERRIDE = "override"


@dataclass(frozen=True)
class ScaleParams:
    s: float
    s_max_var: float
    source: str = FORMULA

    def __post_init__(self):
        if not (self.s > 0 and self.s_max_var > 0):
            raise InvalidConfig("scales must be positive")


def compute_scale(eigvals_desc, L: int) -> float:
    """sqrt(L / sum of the top-L variances).

    ``eigvals_desc`` are per-sample variances of the principal components
    (Gram eigenvalues divided by n), so a unit-variance code bit is matched
    by one unit of input variance.
    """
    lam = np.asarray(eigvals_desc, dtype=np.float64)
    if L < 1 or L > lam.shape[0]:
        raise InvalidConfig(f"L={L} out of range for {lam.shape[0]} eigenvalues")
    total = float(np.sum(lam[:L]))
    if not total > 0:
        raise DegenerateSpectrum(f"top-{L} eigenvalues sum to {total}")
    return float(np.sqrt(L / total))


def compute_s_max_var(X) -> float:
    """Reciprocal of the largest row norm: puts every sample inside the unit ball."""
    Xd = X.data if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)
    r = float(np.sqrt(np.max(np.einsum("ij,ij->i", Xd, Xd))))
    if r == 0:
        raise DegenerateData("all samples are zero")
    return 1.0 / r


def retained_variance_fraction(X, V, eigvals_desc, L: int) -> float:
    """||XV||_F^2 over the top-L Gram eigenvalue sum (1.0 for the PCA basis)."""
    Xd = X.data if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)
    Vd = V.data if isinstance(V, ProjectionMatrix) else np.asarray(V, dtype=np.float64)
    U = Xd @ Vd
    return float(np.sum(U * U) / np.sum(np.asarray(eigvals_desc, dtype=np.float64)[:L]))


def mean_abs_gap(Xs, V) -> float:
    """|mean(|Xs V|) - 1| on scaled data ``Xs``; reported as a diagnostic only."""
    Xd = Xs.data if isinstance(Xs, FeatureMatrix) else np.asarray(Xs, dtype=np.float64)
    Vd = V.data if isinstance(V, ProjectionMatrix) else np.asarray(V, dtype=np.float64)
    return float(abs(np.mean(np.abs(Xd @ Vd)) - 1.0))


@dataclass
class SweepRow:
    s: float
    loss_per_bit: float = float("nan")
    retained_variance: float = float("nan")
    mean_abs_gap: float = float("nan")
    iterations: int = 0
    error: str = ""


def default_grid(s_formula: float, points: int = 16) -> np.ndarray:
    return np.geomspace(s_formula / 8.0, s_formula * 8.0, points)


def _sweep_point(X: FeatureMatrix, gram_desc: np.ndarray, L: int, s: float, cfg: TrainConfig) -> SweepRow:
    row = SweepRow(s=float(s))
    try:
        Xs = X.scaled(s)
        V, trace = train_one(Xs, cfg)
        B = compute_B(Xs, V)
        row.loss_per_bit = quantization_loss(B, Xs, V, per_bit=True)
        row.retained_variance = retained_variance_fraction(X, V, gram_desc, L)
        row.mean_abs_gap = mean_abs_gap(Xs, V)
        row.iterations = len(trace)
    except SCQError as exc:
        row.error = f"{type(exc).__name__}: {exc}"
    return row


def sweep_scale(X: FeatureMatrix, L: int, scale_grid, cfg: TrainConfig | None = None,
                workers: int = 1) -> list[SweepRow]:
    """Train the orthonormal encoder at each scale; rows come back in descending s."""
    grid = np.asarray(scale_grid, dtype=np.float64)
    if grid.size == 0 or np.any(grid <= 0):
        raise InvalidConfig("scale grid values must be positive")
    cfg = TrainConfig(L=L) if cfg is None else replace(cfg, L=L)
    _, gram_desc = pca_from_eigensystem(gram_eigendecomposition(X), L)
    grid = np.sort(grid)[::-1]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda s: _sweep_point(X, gram_desc, L, s, cfg), grid))
    return [_sweep_point(X, gram_desc, L, s, cfg) for s in grid]
