"""Binary codes: the sign step, the quantization loss, and LSB-first bit packing."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput


def sign_pm1(U: np.ndarray) -> np.ndarray:
    """Elementwise sign into {-1, +1} with sign(0) = +1."""
    return np.where(np.asarray(U) >= 0, 1, -1).astype(np.int8)


def pack_codes(codes: np.ndarray) -> np.ndarray:
    codes = np.asarray(codes)
    if codes.ndim != 2:
        raise InvalidInput(f"codes must be 2-D, got shape {codes.shape}")
    bits = (codes > 0).astype(np.uint8)
    return np.packbits(bits, axis=1, bitorder="little")


def unpack_codes(packed: np.ndarray, L: int) -> np.ndarray:
    packed = np.asarray(packed, dtype=np.uint8)
    if packed.ndim != 2 or packed.shape[1] != (L + 7) // 8:
        raise InvalidInput(f"packed array shape {packed.shape} does not fit L={L}")
    bits = np.unpackbits(packed, axis=1, count=L, bitorder="little")
    return (2 * bits.astype(np.int8) - 1).astype(np.int8)


@dataclass(frozen=True)
class BinaryCodes:
    """n x L codes over {-1, +1} with the matching packed bytes."""

    codes: np.ndarray
    packed: np.ndarray

    @classmethod
    def from_codes(cls, codes) -> "BinaryCodes":
        codes = np.asarray(codes)
        if codes.ndim != 2:
            raise InvalidInput(f"codes must be 2-D, got shape {codes.shape}")
        if codes.size and not np.all(np.abs(codes) == 1):
            raise InvalidInput("codes must be in {-1, +1}")
        codes = codes.astype(np.int8)
        codes.setflags(write=False)
        packed = pack_codes(codes)
        packed.setflags(write=False)
        return cls(codes, packed)

    @classmethod
    def from_packed(cls, packed, L: int) -> "BinaryCodes":
        packed = np.array(packed, dtype=np.uint8)
        codes = unpack_codes(packed, L)
        if not np.array_equal(pack_codes(codes), packed):
            raise InvalidInput("packed rows carry nonzero padding bits")
        codes.setflags(write=False)
        packed.setflags(write=False)
        return cls(codes, packed)

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def L(self) -> int:
        return self.codes.shape[1]


def _data(X):
    if isinstance(X, np.ndarray):
        return X
    return X.data if hasattr(X, "data") else np.asarray(X, dtype=np.float64)


def compute_B(X, V) -> BinaryCodes:
    Xd, Vd = _data(X), _data(V)
    if Xd.shape[1] != Vd.shape[0]:
        raise InvalidInput(f"X has {Xd.shape[1]} columns but V has {Vd.shape[0]} rows")
    return BinaryCodes.from_codes(sign_pm1(Xd @ Vd))


def quantization_loss(B, X, V, per_bit: bool = False) -> float:
    """(1/n) ||B - XV||_F^2, optionally divided by the code length."""
    Bd = B.codes if isinstance(B, BinaryCodes) else np.asarray(B)
    Xd, Vd = _data(X), _data(V)
    R = Bd - Xd @ Vd
    q = float(np.sum(R * R) / Xd.shape[0])
    return q / Bd.shape[1] if per_bit else q
