import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from angular_spectra.errors import ConfigError
from angular_spectra.records import csv_text, dumps, loads, plain, read_orbit_csv, write_orbit_csv
from angular_spectra.spectra import AngularSpectrumSet

finite = st.floats(allow_nan=False, allow_infinity=False)
values = st.recursive(st.none() | st.booleans() | st.integers(-10 ** 12, 10 ** 12) | finite | st.text(max_size=5),
                      lambda c: st.lists(c, max_size=4) | st.dictionaries(st.text(max_size=4), c, max_size=4),
                      max_leaves=12)


@given(values)
def test_json_roundtrip_is_lossless(obj):
    assert loads(dumps(obj)) == obj
    assert json.loads(dumps(obj, indent=0)) == obj


@given(st.lists(finite, min_size=1, max_size=20))
def test_floats_survive_bitwise(xs):
    back = loads(dumps(np.array(xs)))
    assert [float(np.float64(x)) for x in xs] == back


def test_plain_handles_numpy_and_results():
    s = AngularSpectrumSet((0.1,), ((1.0, 1.2),))
    d = plain({"a": np.float32(1.5), "b": np.arange(3), "c": np.bool_(True), "s": s, 3: (1, 2)})
    assert d == {"a": 1.5, "b": [0, 1, 2], "c": True, "s": s.to_dict(), "3": [1, 2]}
    assert dumps(1.0) == "1.0" and dumps(float("inf")) == "Infinity"
    with pytest.raises(TypeError):
        dumps(object())


def test_csv_text():
    text = csv_text([{"a": 1, "b": 0.1}, {"a": 2, "c": [1, 2]}])
    lines = text.split("\n")
    assert lines[0] == "a,b,c"
    assert lines[1] == "1,0.10000000000000001,"
    assert lines[2] == '2,,"[1, 2]"'
    assert "\r" not in text


def test_orbit_csv_roundtrip(tmp_path, rng):
    X = rng.standard_normal((25, 3))
    p = tmp_path / "orbit.csv"
    write_orbit_csv(p, X, first=-12)
    raw = p.read_bytes()
    assert raw.startswith(b"n,x1,x2,x3\n-12,") and b"\r" not in raw
    first, Y = read_orbit_csv(p)
    assert first == -12
    np.testing.assert_array_equal(X, Y)


def test_orbit_csv_errors(tmp_path):
    with pytest.raises(ConfigError):
        write_orbit_csv(tmp_path / "x.csv", np.zeros((3, 2)))
    bad = tmp_path / "bad.csv"
    bad.write_text("i,x,y,z\n0,1,2,3\n")
    with pytest.raises(ConfigError):
        read_orbit_csv(bad)
    bad.write_text("n,x1,x2,x3\n0,1,2,3\n2,1,2,3\n")
    with pytest.raises(ConfigError):
        read_orbit_csv(bad)
    bad.write_text("n,x1,x2,x3\n")
    with pytest.raises(ConfigError):
        read_orbit_csv(bad)
