"""Feature, label and code files."""

from __future__ import annotations

import csv
import io as _io
import struct

import numpy as np

from .codes import BinaryCodes
from .errors import FormatError, InvalidInput
from .model import atomic_write

FEATURE_MAGIC = b"SCQF"
CODE_MAGIC = b"SCQB"
_HEADER = struct.Struct("<4sII")


def _read_bytes(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _header(raw: bytes, magic: bytes) -> tuple[int, int] | None:
    if raw[:4] != magic:
        return None
    if len(raw) < _HEADER.size:
        raise FormatError(f"header truncated at byte offset {len(raw)}: expected {_HEADER.size} bytes")
    _, a, b = _HEADER.unpack_from(raw)
    return a, b


def _features_from_csv(raw: bytes) -> np.ndarray:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FormatError(f"bad magic and not a text file (byte offset {exc.start})") from exc
    rows = []
    for lineno, row in enumerate(csv.reader(_io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            rows.append([float(c) for c in row])
        except ValueError as exc:
            raise FormatError(f"line {lineno}: {exc}") from exc
        if len(rows[-1]) != len(rows[0]):
            raise FormatError(f"line {lineno}: expected {len(rows[0])} fields, got {len(rows[-1])}")
    if not rows:
        raise FormatError("bad magic at byte offset 0 and no CSV rows")
    return np.array(rows, dtype=np.float64)


def read_features(path) -> np.ndarray:
    """SCQF binary (float32 payload) or, when the magic is absent, headerless CSV."""
    raw = _read_bytes(path)
    hdr = _header(raw, FEATURE_MAGIC)
    if hdr is None:
        return _features_from_csv(raw)
    n, d = hdr
    expected = _HEADER.size + 4 * n * d
    if len(raw) != expected:
        raise FormatError(
            f"feature payload length mismatch at byte offset {min(len(raw), expected)}: "
            f"expected {expected} bytes, got {len(raw)}")
    data = np.frombuffer(raw, dtype="<f4", offset=_HEADER.size, count=n * d)
    return data.reshape(n, d).astype(np.float64)


def write_features(path, X) -> None:
    X = np.asarray(X)
    if X.ndim != 2:
        raise InvalidInput(f"features must be 2-D, got shape {X.shape}")
    payload = np.ascontiguousarray(X, dtype="<f4").tobytes()
    atomic_write(path, _HEADER.pack(FEATURE_MAGIC, X.shape[0], X.shape[1]) + payload)


def read_labels(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise InvalidInput(f"label file {path} is empty")
    out = np.empty(len(lines), dtype=np.int64)
    for i, line in enumerate(lines):
        try:
            out[i] = int(line.strip())
        except ValueError as exc:
            raise FormatError(f"line {i + 1}: not an integer label: {line!r}") from exc
    return out


def write_labels(path, labels) -> None:
    labels = np.asarray(labels)
    if labels.ndim != 1 or not np.issubdtype(labels.dtype, np.integer):
        raise InvalidInput("labels must be a 1-D integer vector")
    atomic_write(path, "".join(f"{int(x)}\n" for x in labels))


def write_codes(path, codes: BinaryCodes) -> None:
    atomic_write(path, _HEADER.pack(CODE_MAGIC, codes.n, codes.L) + codes.packed.tobytes())


def read_codes(path) -> BinaryCodes:
    raw = _read_bytes(path)
    hdr = _header(raw, CODE_MAGIC)
    if hdr is None:
        raise FormatError(f"bad magic at byte offset 0: expected {CODE_MAGIC!r}, got {raw[:4]!r}")
    n, L = hdr
    if L < 1:
        raise FormatError(f"code length must be positive, got L={L} at byte offset 8")
    width = (L + 7) // 8
    expected = _HEADER.size + n * width
    if len(raw) != expected:
        raise FormatError(
            f"code payload length mismatch at byte offset {min(len(raw), expected)}: "
            f"expected {expected} bytes, got {len(raw)}")
    packed = np.frombuffer(raw, dtype=np.uint8, offset=_HEADER.size).reshape(n, width)
    try:
        return BinaryCodes.from_packed(packed, L)
    except InvalidInput as exc:
        raise FormatError(str(exc)) from exc
