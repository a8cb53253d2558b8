"""The persisted hash model and its lossless text container."""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import CorruptModel, FormatError, InvalidInput, UnsupportedVersion
from .linalg import ORTHOGONAL, ORTHONORMAL, check_projection

FORMAT_VERSION = 1
METHODS = {"OnE": ORTHONORMAL, "OgE": ORTHOGONAL, "ITQ": ORTHONORMAL}
KIND_TOL = 1e-6


@dataclass(frozen=True)
class HashModel:
    """mean -> optional PCA -> scale -> V, then sign."""

    method: str
    L: int
    d_in: int
    mean: np.ndarray
    scale: float
    V: np.ndarray
    pca: np.ndarray | None = None
    hyperparams: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidInput(f"unknown method {self.method!r}")
        for name in ("mean", "V", "pca"):
            a = getattr(self, name)
            if a is not None:
                a = np.array(a, dtype=np.float64)
                a.setflags(write=False)
                object.__setattr__(self, name, a)

    @property
    def kind(self) -> str:
        return METHODS[self.method]

    @cached_property
    def folded(self) -> tuple[np.ndarray, np.ndarray]:
        """(W, offset) with codes = sign(x @ W - offset)."""
        W = self.scale * self.V
        if self.pca is not None:
            W = self.pca @ W
        return W, self.mean @ W

    def validate(self) -> None:
        D = self.pca.shape[1] if self.pca is not None else self.d_in
        if self.mean.shape != (self.d_in,):
            raise CorruptModel(f"mean has shape {self.mean.shape}, expected ({self.d_in},)")
        if self.pca is not None and self.pca.shape[0] != self.d_in:
            raise CorruptModel(f"pca has shape {self.pca.shape}, expected ({self.d_in}, D)")
        if self.V.shape != (D, self.L):
            raise CorruptModel(f"V has shape {self.V.shape}, expected ({D}, {self.L})")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise CorruptModel(f"scale must be positive, got {self.scale}")
        err = check_projection(self.V, self.kind)
        if err > KIND_TOL:
            raise CorruptModel(f"V violates the {self.kind} invariant by {err:.3e}")


def _enc(a: np.ndarray | None):
    if a is None:
        return None
    a = np.asarray(a, dtype=np.float64)
    return {"shape": list(a.shape), "hex": [float(x).hex() for x in a.ravel()]}


def _dec(obj) -> np.ndarray | None:
    if obj is None:
        return None
    try:
        vals = [float.fromhex(h) for h in obj["hex"]]
        return np.array(vals, dtype=np.float64).reshape(obj["shape"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"bad array block: {exc}") from exc


def dumps_model(model: HashModel) -> str:
    doc = {
        "format": "scq-hash-model",
        "format_version": model.format_version,
        "method": model.method,
        "L": model.L,
        "d_in": model.d_in,
        "scale": float(model.scale).hex(),
        "hyperparams": model.hyperparams,
        "mean": _enc(model.mean),
        "pca": _enc(model.pca),
        "V": _enc(model.V),
    }
    return json.dumps(doc, indent=1, sort_keys=True) + "\n"


def loads_model(text: str) -> HashModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != "scq-hash-model":
        raise FormatError("not an scq hash model document")
    if doc.get("format_version") != FORMAT_VERSION:
        raise UnsupportedVersion(f"format_version {doc.get('format_version')!r} is not supported")
    try:
        model = HashModel(
            method=doc["method"],
            L=int(doc["L"]),
            d_in=int(doc["d_in"]),
            mean=_dec(doc["mean"]),
            scale=float.fromhex(doc["scale"]),
            V=_dec(doc["V"]),
            pca=_dec(doc.get("pca")),
            hyperparams=doc.get("hyperparams", {}),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"missing or malformed field: {exc}") from exc
    model.validate()
    return model


def atomic_write(path, data: bytes | str) -> None:
    path = os.fspath(path)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), prefix=".tmp-")
    try:
        with os.fdopen(fd, mode) as fh:
            fh.write(data)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_model(model: HashModel, path) -> None:
    model.validate()
    atomic_write(path, dumps_model(model))


def load_model(path) -> HashModel:
    with open(path, encoding="utf-8") as fh:
        return loads_model(fh.read())
