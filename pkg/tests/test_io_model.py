import json
import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from scq.codes import BinaryCodes
from scq.errors import CorruptModel, FormatError, InvalidInput, UnsupportedVersion
from scq.io import read_codes, read_features, read_labels, write_codes, write_features, write_labels
from scq.model import HashModel, dumps_model, load_model, loads_model, save_model


def test_features_small(tmp_path):
    p = tmp_path / "f.scqf"
    p.write_bytes(b"SCQF" + struct.pack("<II", 2, 2) + struct.pack("<4f", 1, 2, 3, 4))
    np.testing.assert_array_equal(read_features(p), [[1, 2], [3, 4]])


def test_features_truncated(tmp_path):
    p = tmp_path / "f.scqf"
    p.write_bytes(b"SCQF" + struct.pack("<II", 2, 2) + struct.pack("<3f", 1, 2, 3))
    with pytest.raises(FormatError, match="expected 28 bytes, got 24"):
        read_features(p)
    p.write_bytes(b"SCQF\x01")
    with pytest.raises(FormatError, match="offset"):
        read_features(p)


def test_features_csv_fallback(tmp_path):
    p = tmp_path / "f.csv"
    p.write_text("1,2.5\n-3,4e-1\n")
    np.testing.assert_array_equal(read_features(p), [[1, 2.5], [-3, 0.4]])
    p.write_text("1,2\n3\n")
    with pytest.raises(FormatError, match="line 2"):
        read_features(p)
    p.write_bytes(b"\xff\xfe\x00garbage")
    with pytest.raises(FormatError):
        read_features(p)


@given(arrays(np.float32, st.tuples(st.integers(0, 12), st.integers(1, 9)),
              elements=st.floats(-1e6, 1e6, width=32)))
def test_features_round_trip(tmp_path_factory, X):
    p = tmp_path_factory.mktemp("rt") / "x.scqf"
    write_features(p, X)
    back = read_features(p)
    assert back.shape == X.shape
    np.testing.assert_array_equal(back.astype(np.float32), X)


def test_labels(tmp_path):
    p = tmp_path / "l.txt"
    p.write_text("0\n1\n1\n")
    np.testing.assert_array_equal(read_labels(p), [0, 1, 1])
    p.write_text("")
    with pytest.raises(InvalidInput):
        read_labels(p)
    p.write_text("3\nx\n")
    with pytest.raises(FormatError, match="line 2"):
        read_labels(p)
    y = np.array([5, -2, 0, 7])
    write_labels(p, y)
    np.testing.assert_array_equal(read_labels(p), y)


def test_codes_layout_and_round_trip(tmp_path, rng):
    p = tmp_path / "c.scqb"
    write_codes(p, BinaryCodes.from_codes(np.array([[1, -1, 1, 1]])))
    assert p.read_bytes() == b"SCQB" + struct.pack("<II", 1, 4) + b"\x0d"
    empty = BinaryCodes.from_codes(np.zeros((0, 12), dtype=np.int8))
    write_codes(p, empty)
    assert p.read_bytes() == b"SCQB" + struct.pack("<II", 0, 12)
    back = read_codes(p)
    assert back.n == 0 and back.L == 12
    c = BinaryCodes.from_codes(np.where(rng.standard_normal((33, 21)) >= 0, 1, -1))
    write_codes(p, c)
    raw = p.read_bytes()
    back = read_codes(p)
    np.testing.assert_array_equal(back.codes, c.codes)
    write_codes(p, back)
    assert p.read_bytes() == raw


def test_codes_errors(tmp_path):
    p = tmp_path / "c.scqb"
    p.write_bytes(b"SCQB" + struct.pack("<II", 1, 4) + b"\x1d")
    with pytest.raises(FormatError):
        read_codes(p)
    p.write_bytes(b"SCQB" + struct.pack("<II", 2, 4) + b"\x0d")
    with pytest.raises(FormatError, match="expected 14 bytes, got 13"):
        read_codes(p)
    p.write_bytes(b"NOPE")
    with pytest.raises(FormatError, match="magic"):
        read_codes(p)


def make_model(rng, method="OnE", pca=True):
    d_in, D, L = 7, 5, 3
    if method == "OgE":
        Q, _ = np.linalg.qr(rng.standard_normal((D, L)))
        V = Q * rng.uniform(0.2, 2.0, L)
    else:
        V, _ = np.linalg.qr(rng.standard_normal((D, L)))
    P = np.linalg.qr(rng.standard_normal((d_in, D)))[0] if pca else None
    if not pca:
        V, _ = np.linalg.qr(rng.standard_normal((d_in, L)))
    return HashModel(method, L, d_in, rng.standard_normal(d_in), float(rng.uniform(0.1, 3)), V, pca=P,
                     hyperparams={"seed": 3, "mu": 0.02})


@pytest.mark.parametrize("method", ["OnE", "OgE", "ITQ"])
def test_model_round_trip_bit_exact(tmp_path, rng, method):
    m = make_model(rng, method)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_model(m, p1)
    back = load_model(p1)
    for name in ("mean", "V", "pca"):
        np.testing.assert_array_equal(getattr(back, name), getattr(m, name))
    assert back.scale == m.scale and back.hyperparams == m.hyperparams
    save_model(back, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_model_without_pca(rng):
    m = make_model(rng, pca=False)
    back = loads_model(dumps_model(m))
    assert back.pca is None
    W, off = back.folded
    np.testing.assert_allclose(W, back.scale * back.V)


def test_model_tamper_and_version(rng):
    doc = json.loads(dumps_model(make_model(rng)))
    doc["V"]["hex"][0] = (float.fromhex(doc["V"]["hex"][0]) + 0.5).hex()
    with pytest.raises(CorruptModel):
        loads_model(json.dumps(doc))
    doc = json.loads(dumps_model(make_model(rng)))
    doc["format_version"] = 99
    with pytest.raises(UnsupportedVersion):
        loads_model(json.dumps(doc))
    with pytest.raises(FormatError):
        loads_model("{not json")
    doc = json.loads(dumps_model(make_model(rng)))
    del doc["mean"]
    with pytest.raises(CorruptModel):
        loads_model(json.dumps(doc))


def test_ogE_model_keeps_norms(rng):
    m = make_model(rng, "OgE")
    assert not np.allclose(np.linalg.norm(m.V, axis=0), 1.0)
    loads_model(dumps_model(m)).validate()
    with pytest.raises(CorruptModel):
        HashModel("OnE", m.L, m.d_in, m.mean, m.scale, m.V, pca=m.pca).validate()
