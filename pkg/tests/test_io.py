import json
import math

import numpy as np
import pytest

from convexsplit import io as cio
from convexsplit import testkit as tk


def test_operator_roundtrip(tmp_path, rng):
    r = tk.random_bipartite(2, 3, rng)
    p = tmp_path / "r.json"
    cio.write_json(p, cio.encode_operator(r, (2, 3)))
    back, dims = cio.load_operator(p)
    assert dims == (2, 3)
    assert np.allclose(back, r, atol=1e-15, rtol=0)


def test_plain_real_matrix_accepted():
    x, dims = cio.decode_operator({"kind": "density", "matrix": [[0.5, 0], [0, 0.5]]})
    assert np.allclose(x, np.eye(2) / 2) and dims == (2,)


@pytest.mark.parametrize("record", [
    {"kind": "density", "matrix": [[1.0, 0], [0, 1.0]]},
    {"kind": "hermitian", "matrix": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]},
    {"kind": "test", "matrix": [[2.0, 0], [0, 0]]},
    {"kind": "density", "dims": [3], "matrix": [[0.5, 0], [0, 0.5]]},
    {"kind": "bogus", "matrix": [[1.0]]},
    {"kind": "density"},
    {"kind": "density", "matrix": [[[1, 0, 0]]]},
])
def test_invalid_records(record):
    with pytest.raises(cio.InstanceError):
        cio.decode_operator(record)


def test_convex_split_roundtrip(tmp_path, rng):
    r, t = tk.random_bipartite(2, 2, rng), tk.random_density(2, seed=rng)
    p = tmp_path / "inst.json"
    cio.save_convex_split(p, r, t, (2, 2), M=3, name="demo")
    inst = cio.load_convex_split(p)
    assert inst["name"] == "demo" and inst["M"] == 3 and inst["dims"] == (2, 2)
    assert np.allclose(inst["rho_AB"], r, atol=1e-15, rtol=0)
    (tmp_path / "bad.json").write_text(json.dumps({"type": "protocol"}))
    with pytest.raises(cio.InstanceError):
        cio.load_convex_split(tmp_path / "bad.json")
    (tmp_path / "junk.json").write_text("{not json")
    with pytest.raises(cio.InstanceError):
        cio.load_convex_split(tmp_path / "junk.json")
    with pytest.raises(cio.InstanceError):
        cio.load_convex_split(tmp_path / "missing.json")


def test_cq_roundtrip():
    s = tk.random_cq(3, (2,), seed=2)
    back = cio.decode_cq(cio.encode_cq(s))
    assert np.allclose(back.to_dense(), s.to_dense())
    with pytest.raises(cio.InstanceError):
        cio.decode_cq({"type": "cq", "probs": [1.0]})


def test_bundle_loader(tmp_path):
    s = tk.random_cq(2, (2, 2), seed=0)
    obj = {"type": "protocol", "protocol": "wiretap", "states": {"rho_XBE": cio.encode_cq(s)},
           "rates": {"logM": 0.1}, "channel": {"kraus": [cio.encode_matrix(np.eye(2))]}}
    cio.write_json(tmp_path / "b.json", obj)
    b = cio.load_bundle(tmp_path / "b.json")
    assert b["protocol"] == "wiretap" and b["name"] == "b"
    assert isinstance(b["states"]["rho_XBE"], tk.CqState)
    assert np.allclose(b["channel"]["kraus"][0], np.eye(2))
    cio.write_json(tmp_path / "c.json", {"type": "protocol"})
    with pytest.raises(cio.InstanceError):
        cio.load_bundle(tmp_path / "c.json")


def test_format_value():
    assert cio.format_value(True) == "true"
    assert cio.format_value(np.bool_(False)) == "false"
    assert cio.format_value(np.int64(3)) == "3"
    assert cio.format_value(0.1) == "0.1"
    assert cio.format_value(math.inf) == "inf" and cio.format_value(-math.inf) == "-inf"
    assert cio.format_value(math.nan) == "nan"
    assert cio.format_value(None) == ""
    assert cio.csv_text(["a", "b"], [{"a": 1, "b": None}]) == "a,b\n1,\n"


def test_to_jsonable():
    out = cio.to_jsonable({"x": np.array([[1 + 2j, 0], [0, 1]]), "f": np.float64(math.inf), "b": np.bool_(True),
                           "v": np.array([1.0, 2.0]), "t": (np.int32(1),)})
    json.dumps(out)
    assert out["x"][0][0] == [1.0, 2.0] and out["f"] == "inf" and out["b"] is True and out["t"] == [1]


def test_manifest(tmp_path):
    f = tmp_path / "in.json"
    f.write_text("{}")
    m = cio.manifest("delta", {"M": "1:2"}, 0, [f], 0.0, 2, [tmp_path / "out.csv"])
    assert m["inputs"][str(f)] == cio.sha256_file(f)
    assert m["rows"] == 2 and m["seed"] == 0 and m["version"]
