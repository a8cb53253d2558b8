"""Raw features to a fitted HashModel: center, optional PCA, scale, train."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfig
from .itq import fit_itq
from .linalg import FeatureMatrix, gram_eigendecomposition, pca_from_eigensystem, zero_center
from .model import HashModel
from .oge import train_oge
from .one import TrainConfig, train_one
from .scale import FORMULA, OVERRIDE, compute_scale

DEFAULT_PCA_DIM = 512
ITQ_ITERS = 50

_ALIASES = {"one": "OnE", "oge": "OgE", "itq": "ITQ"}


def canonical_method(method: str) -> str:
    m = _ALIASES.get(method.lower())
    if m is None:
        raise InvalidConfig(f"unknown method {method!r}; choose one of {sorted(_ALIASES)}")
    return m


@dataclass(frozen=True)
class Prepared:
    """Centered (and possibly reduced) training matrix before scaling."""

    X: FeatureMatrix
    mean: np.ndarray
    pca: np.ndarray | None
    variances_desc: np.ndarray


def prepare(raw, pca_dim: int | None = DEFAULT_PCA_DIM) -> Prepared:
    """Center, then reduce to ``pca_dim`` when the input is wider. ``None`` disables reduction."""
    Xc, mean = zero_center(raw)
    es = gram_eigendecomposition(Xc)
    pca = None
    if pca_dim is not None and Xc.d > pca_dim:
        if pca_dim < 1:
            raise InvalidConfig(f"pca_dim must be >= 1, got {pca_dim}")
        pca, _ = pca_from_eigensystem(es, pca_dim)
        Xc = FeatureMatrix(Xc.data @ pca, centered=True)
        es = gram_eigendecomposition(Xc)
    _, gram_desc = pca_from_eigensystem(es, es.d)
    return Prepared(Xc, mean, pca, gram_desc / Xc.n)


def fit_model(raw, method: str, cfg: TrainConfig, pca_dim: int | None = DEFAULT_PCA_DIM) -> HashModel:
    method = canonical_method(method)
    prep = prepare(raw, pca_dim)
    X = prep.X
    if cfg.L > X.d:
        raise InvalidConfig(f"L={cfg.L} exceeds the training dimension {X.d}")
    if cfg.scale_override is not None:
        s, source = cfg.scale_override, OVERRIDE
    elif method == "ITQ":
        # the rotation is invariant to a global scale, so ITQ keeps the data as is
        s, source = 1.0, FORMULA
    else:
        s, source = compute_scale(prep.variances_desc, cfg.L), FORMULA
    Xs = X.scaled(s)
    hp = {"seed": cfg.seed, "scale_source": source}
    if method == "OnE":
        V, trace = train_one(Xs, cfg)
        hp.update(eps=cfg.eps, eps_b=cfg.eps_b, eps_u=cfg.eps_u, max_iter=cfg.max_iter)
    elif method == "OgE":
        V, trace = train_oge(Xs, cfg)
        hp.update(mu=cfg.mu, eps=cfg.eps, max_iter=cfg.max_iter)
    else:
        V, trace = fit_itq(Xs, cfg.L, ITQ_ITERS, cfg.seed)
        hp.update(iters=ITQ_ITERS)
    hp.update(iterations=len(trace), stop_reason=trace.stop_reason,
              final_loss=float(trace.values[-1]).hex() if trace.values else None)
    model = HashModel(method=method, L=cfg.L, d_in=np.shape(raw)[1], mean=prep.mean, scale=s,
                      V=V.data, pca=prep.pca, hyperparams=hp)
    model.validate()
    return model
