"""Synthetic datasets used by the tests, the scripts and the CLI fixture."""

from __future__ import annotations

import numpy as np


def anisotropic_gaussian(n: int, d: int, seed: int = 0, decay: float = 1.0) -> np.ndarray:
    """Gaussian rows whose covariance eigenvalues fall off as 1/i**decay, in a random basis."""
    rng = np.random.default_rng(seed)
    lam = 1.0 / np.arange(1, d + 1) ** decay
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    return (rng.standard_normal((n, d)) * np.sqrt(lam)) @ Q.T


def two_clusters_2d(n: int = 200, seed: int = 0, spread=(2.0, 0.03), separation: float = 0.35,
                    angle: float = 0.3) -> np.ndarray:
    """Two long parallel Gaussian clusters, offset by +/- ``separation`` along the minor axis.

    The major axis carries almost all the variance, while the minor axis
    carries the two-cluster structure, so the top principal direction and
    the low-quantization-loss direction differ.
    """
    rng = np.random.default_rng(seed)
    side = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    pts = rng.standard_normal((n, 2)) * np.asarray(spread, dtype=np.float64)
    pts[:, 1] += side * separation
    c, s = np.cos(angle), np.sin(angle)
    return pts @ np.array([[c, s], [-s, c]])


def labeled_clusters(n: int, d: int, classes: int = 10, seed: int = 0,
                     noise: float = 1.0, center_scale: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
    """Class-conditional Gaussians around random centers; returns (features, integer labels)."""
    rng = np.random.default_rng(seed)
    centers = rng.standard_normal((classes, d)) * center_scale / np.sqrt(d) * np.sqrt(
        1.0 / np.arange(1, d + 1) * d / np.sum(1.0 / np.arange(1, d + 1)))
    labels = rng.integers(0, classes, size=n)
    X = centers[labels] + noise * rng.standard_normal((n, d)) / np.sqrt(d)
    return X, labels
