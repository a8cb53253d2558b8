import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from scq import oge
from scq.dual import build_column_system
from scq.errors import InvalidConfig
from scq.linalg import FeatureMatrix, gram_eigendecomposition, zero_center
from scq.one import TrainConfig


def es_of(X):
    return gram_eigendecomposition(FeatureMatrix(np.asarray(X, dtype=float), centered=True))


def test_v1_example():
    es = es_of(np.eye(2))
    v = oge.solve_v1_oge(es, np.eye(2).T @ np.array([1.0, 1.0]), mu=0.02)
    np.testing.assert_allclose(v, [1 / 1.04] * 2, rtol=1e-12)
    assert v[0] == pytest.approx(0.96154, abs=1e-5)
    with pytest.raises(InvalidConfig):
        oge.solve_v1_oge(es, [1.0, 1.0], mu=0.0)


def test_v1_dense_and_shrinkage(rng):
    X = rng.standard_normal((30, 6))
    b = np.sign(rng.standard_normal(30))
    es = es_of(X)
    dense = np.linalg.solve(X.T @ X + 30 * 0.02 * np.eye(6), X.T @ b)
    got = oge.solve_v1_oge(es, X.T @ b, mu=0.02)
    assert np.linalg.norm(got - dense) <= 1e-8 * np.linalg.norm(dense)
    norms = [np.linalg.norm(oge.solve_v1_oge(es, X.T @ b, mu=m)) for m in (0.01, 0.1, 1, 10, 100)]
    assert all(a > b for a, b in zip(norms, norms[1:]))


def test_vk_orthogonal_two_dims(rng):
    X = rng.standard_normal((20, 2))
    es = es_of(X)
    b1, b2 = np.sign(rng.standard_normal((2, 20)))
    v1 = oge.solve_v1_oge(es, X.T @ b1)
    v2 = oge.solve_vk_oge(es, X.T @ b2, [v1])
    assert abs(v1 @ v2) <= 1e-10 * np.linalg.norm(v1) * np.linalg.norm(v2) + 1e-14


@given(st.integers(0, 2**31 - 1))
def test_incremental_cache_matches_rebuild(seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((50, 8))
    es = es_of(X)
    mu = 0.02
    cache = oge.IncrementalSystem(oge.inverse_spectrum(es, mu), 50)
    cols = []
    B = np.sign(rng.standard_normal((50, 4)))
    for k in range(4):
        w = X.T @ B[:, k]
        sys_inc = cache.system(es.rotate(w))
        sys_ref = build_column_system(es, mu, cols, w)
        np.testing.assert_allclose(sys_inc.A, sys_ref.A, atol=1e-12, rtol=1e-12)
        np.testing.assert_allclose(sys_inc.c, sys_ref.c, atol=1e-12, rtol=1e-12)
        v = oge.solve_vk_oge(es, w, cols, mu=mu) if k else oge.solve_v1_oge(es, w, mu=mu)
        if k:
            phi = np.linalg.solve(sys_ref.A, sys_ref.c)
            assert np.linalg.norm(sys_ref.A @ phi - sys_ref.c) <= 1e-8 * (np.linalg.norm(sys_ref.c) + 1)
            assert max(abs(v @ c) for c in cols) <= 1e-6
        cols.append(v)
        cache.append(es.rotate(v))
    G = np.column_stack(cols).T @ np.column_stack(cols)
    assert np.all(np.diag(G) > 0)
    assert not np.allclose(np.diag(G), 1.0)


def random_data(seed, n=200, d=16):
    X, _ = zero_center(np.random.default_rng(seed).standard_normal((n, d)) * np.linspace(2, 0.2, d))
    return X.scaled(0.8)


@given(st.integers(0, 2**31 - 1))
def test_train_monotone_and_orthogonal(seed):
    V, trace = oge.train_oge(random_data(seed), TrainConfig(L=8, seed=seed))
    assert trace.is_monotone(1e-10)
    G = V.data.T @ V.data
    assert np.abs(G - np.diag(np.diag(G))).max() <= 1e-6
    norms = np.sqrt(np.diag(G))
    assert np.all(np.isfinite(norms)) and np.all(norms > 0)


@pytest.mark.parametrize("mu", [0.02, 1e-9])
def test_representable_data_reaches_ridge_floor(mu):
    d = 4
    B0 = np.array(list(itertools.product([-1.0, 1.0], repeat=d)))
    Q, _ = np.linalg.qr(np.random.default_rng(0).standard_normal((d, d)))
    X = FeatureMatrix(B0 @ Q.T, centered=True)
    _, trace = oge.train_oge(X, TrainConfig(L=d, mu=mu))
    # with X^T X = nI the optimum per bit is mu/(1+mu): residual (mu/(1+mu))^2 plus penalty mu/(1+mu)^2
    assert min(trace.values[:3]) <= d * mu / (1 + mu) + 1e-6


def test_single_factorization(monkeypatch):
    calls = []
    real = oge.inverse_spectrum

    def counting(es, mu):
        calls.append(mu)
        return real(es, mu)

    monkeypatch.setattr(oge, "inverse_spectrum", counting)
    _, trace = oge.train_oge(random_data(2), TrainConfig(L=6))
    assert len(calls) == 1 and len(trace) >= 2


def test_requires_positive_mu():
    with pytest.raises(InvalidConfig):
        oge.train_oge(random_data(0), TrainConfig(L=3, mu=0.0))
