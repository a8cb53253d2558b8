import numpy as np
import pytest
from hypothesis import given, strategies as st

from scq.itq import fit_itq, procrustes_rotation, train_itq
from scq.linalg import zero_center


def rot(t):
    return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])


def test_identity_optimum(rng):
    B = np.sign(rng.standard_normal((30, 3)))
    P = B + 0.1 * rng.standard_normal((30, 3))
    R = procrustes_rotation(B, P)
    best = np.linalg.norm(P @ R - B)
    for _ in range(1000):
        Rp, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        assert best <= np.linalg.norm(P @ Rp - B) + 1e-12


def test_recovers_rotation(rng):
    B = np.sign(rng.standard_normal((20, 2)))
    P = B @ rot(np.pi / 2)
    R = procrustes_rotation(B, P)
    np.testing.assert_allclose(R, rot(-np.pi / 2), atol=1e-8)
    np.testing.assert_allclose(R.T @ R, np.eye(2), atol=1e-8)


@given(st.integers(0, 2**31 - 1))
def test_monotone_and_orthonormal(seed):
    X, _ = zero_center(np.random.default_rng(seed).standard_normal((150, 12)) * np.linspace(2, 0.3, 12))
    V, trace = fit_itq(X, 6, iters=30, seed=seed)
    assert trace.is_monotone(1e-10)
    assert np.abs(V.data.T @ V.data - np.eye(6)).max() <= 1e-6


def test_train_itq_model(rng):
    X, mean = zero_center(rng.standard_normal((100, 8)))
    m = train_itq(X, 4, iters=10, seed=1, mean=mean)
    assert m.method == "ITQ" and m.V.shape == (8, 4) and m.scale == 1.0
    m.validate()
