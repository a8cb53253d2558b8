"""Dense linear algebra substrate: centering, Gram eigensystem, PCA, regularized inverse."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig, InvalidData, NumericalFailure, SingularRegularization

# relative threshold below which Gram eigenvalues are treated as exact zeros
EIG_CLAMP = 1e-8


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FeatureMatrix:
    """Row-per-sample feature matrix plus the preprocessing already applied to it."""

    data: np.ndarray
    centered: bool = False
    applied_scale: float = 1.0

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise InvalidData(f"expected a non-empty 2-D matrix, got shape {data.shape}")
        if not np.all(np.isfinite(data)):
            raise InvalidData("feature matrix contains non-finite entries")
        if not self.applied_scale > 0:
            raise InvalidData(f"applied_scale must be positive, got {self.applied_scale}")
        object.__setattr__(self, "data", _frozen(data))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def scaled(self, s: float) -> "FeatureMatrix":
        return FeatureMatrix(self.data * s, centered=self.centered, applied_scale=self.applied_scale * s)


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of X^T X, eigenvalues ascending, with the sample count that built it."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    n: int

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors))

    @property
    def d(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def rotate(self, y: np.ndarray) -> np.ndarray:
        """Coordinates of ``y`` (vector or column stack) in the eigenbasis."""
        return self.eigenvectors.T @ y

    def unrotate(self, y: np.ndarray) -> np.ndarray:
        return self.eigenvectors @ y

    def shifted(self, nu: float) -> np.ndarray:
        """Denominators lambda_j + n*nu; raises if any is not strictly positive."""
        den = self.eigenvalues + self.n * nu
        if not np.all(den > 0):
            raise SingularRegularization(
                f"lambda_min + n*nu = {den.min():.3e} <= 0 (nu={nu!r}, n={self.n})"
            )
        return den


ORTHONORMAL = "orthonormal"
ORTHOGONAL = "orthogonal"


@dataclass(frozen=True)
class ProjectionMatrix:
    """d x L projection whose columns are orthonormal or merely mutually orthogonal."""

    data: np.ndarray
    kind: str = ORTHONORMAL
    tol: float = 1e-6

    def __post_init__(self):
        if self.kind not in (ORTHONORMAL, ORTHOGONAL):
            raise InvalidConfig(f"unknown projection kind {self.kind!r}")
        V = np.asarray(self.data, dtype=np.float64)
        if V.ndim != 2:
            raise InvalidData(f"projection must be 2-D, got shape {V.shape}")
        err = check_projection(V, self.kind)
        if err > self.tol:
            raise InvalidData(f"{self.kind} invariant violated by {err:.3e}")
        object.__setattr__(self, "data", _frozen(V))

    @property
    def d(self) -> int:
        return self.data.shape[0]

    @property
    def L(self) -> int:
        return self.data.shape[1]


def check_projection(V: np.ndarray, kind: str) -> float:
    """Worst violation of the column invariant for ``kind`` (0 when exact)."""
    G = V.T @ V
    if kind == ORTHONORMAL:
        return float(np.abs(G - np.eye(G.shape[0])).max(initial=0.0))
    off = G - np.diag(np.diag(G))
    worst = float(np.abs(off).max(initial=0.0))
    if np.any(np.diag(G) <= 0):
        return float("inf")
    return worst


def zero_center(X) -> tuple[FeatureMatrix, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 1:
        raise InvalidData(f"expected a non-empty 2-D matrix, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise InvalidData("input contains non-finite entries")
    mean = X.mean(axis=0)
    return FeatureMatrix(X - mean, centered=True), mean


def gram_eigendecomposition(X: FeatureMatrix) -> EigenSystem:
    G = X.data.T @ X.data
    G = 0.5 * (G + G.T)
    try:
        lam, U = np.linalg.eigh(G)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed: {exc}") from exc
    order = np.argsort(lam, kind="stable")
    lam, U = lam[order], U[:, order]
    top = max(float(lam[-1]), 0.0)
    lam = np.where(lam < EIG_CLAMP * top, 0.0, lam)
    return EigenSystem(lam, U, X.n)


def regularized_inverse(es: EigenSystem, nu: float) -> np.ndarray:
    """Dense (X^T X + n*nu*I)^{-1} assembled from the eigensystem."""
    den = es.shifted(nu)
    U = es.eigenvectors
    return (U / den) @ U.T


def apply_regularized_inverse(es: EigenSystem, nu: float, y) -> np.ndarray:
    den = es.shifted(nu)
    y = np.asarray(y, dtype=np.float64)
    w = es.rotate(y)
    w = w / den if w.ndim == 1 else w / den[:, None]
    return es.unrotate(w)


def pca_fit(X: FeatureMatrix, target_dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Top ``target_dim`` principal directions (columns) and their eigenvalues, descending."""
    if not 1 <= target_dim <= X.d:
        raise InvalidConfig(f"target_dim must be in [1, {X.d}], got {target_dim}")
    es = gram_eigendecomposition(X)
    return pca_from_eigensystem(es, target_dim)


def pca_from_eigensystem(es: EigenSystem, target_dim: int) -> tuple[np.ndarray, np.ndarray]:
    if not 1 <= target_dim <= es.d:
        raise InvalidConfig(f"target_dim must be in [1, {es.d}], got {target_dim}")
    idx = np.arange(es.d - 1, es.d - 1 - target_dim, -1)
    return np.array(es.eigenvectors[:, idx]), np.array(es.eigenvalues[idx])
