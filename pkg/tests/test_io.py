import csv
import io as stdio
import json

import pytest

from conftest import q
from pclab import io
from pclab.attractors import attractor_set
from pclab.errors import ValidationError
from pclab.orbits import coded_orbit, itinerary
from pclab.quasipartition import build_quasi_partition

S2_FILE = {
    "backend": "rational",
    "branches": [
        {"kind": "affine", "coefficients": ["3/10", "1/10"]},
        {"kind": "affine", "coefficients": ["0.3", 0.5]},
    ],
    "general_mode": False,
}


def test_system_round_trip(s2):
    s = io.system_from_dict(S2_FILE)
    assert s.branches == s2.branches
    again = io.system_from_dict(io.system_to_dict(s))
    assert again.branches == s.branches
    assert io.system_to_dict(s)["branches"][1]["coefficients"] == ["3/10", "1/2"]


def test_system_file_errors():
    with pytest.raises(ValidationError, match="branches"):
        io.system_from_dict({"backend": "rational"})
    with pytest.raises(ValidationError, match="unknown branch kind"):
        io.system_from_dict({"branches": [{"kind": "cubic", "coefficients": [0, 0, 0, 0]}]})
    with pytest.raises(ValidationError, match="2 coefficients"):
        io.system_from_dict({"branches": [{"kind": "affine", "coefficients": [0.3]}]})
    with pytest.raises(ValidationError, match="kind"):
        io.system_from_dict({"branches": [{}]})


def test_read_json_error(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{nope")
    with pytest.raises(ValidationError, match="not valid JSON"):
        io.read_json(p)


def test_contraction_from_dict():
    f = io.contraction_from_dict({**S2_FILE, "cuts": ["3/10"], "sides": ["left"]})
    assert f.cuts == (q("0.3"),) and f(q("0.3")) == q("0.19")
    with pytest.raises(ValidationError, match="no cuts"):
        io.contraction_from_dict(S2_FILE)


def test_orbit_records(f_right):
    pts, digits = coded_orbit(f_right, q(0), 2)
    assert io.orbit_records(pts, digits, f_right.backend) == [
        {"k": 0, "x_k": "0", "d_k": 1},
        {"k": 1, "x_k": "1/10", "d_k": 1},
        {"k": 2, "x_k": "13/100", "d_k": None},
    ]


def test_itinerary_record(f1):
    rec = io.itinerary_record(itinerary(f1, q("0.7"), 30))
    assert rec["word"] == "2(1)" and rec["preperiod"] == 1


def test_qp_record(f_right):
    rec = io.qp_record(build_quasi_partition(f_right))
    assert rec["H"] == ["3/10"]
    assert rec["components"][0] == {"index": 0, "lo": "0", "hi": "3/10", "eta": 1, "tau": 0}
    assert rec["q"] == 0 and rec["trails"][0]["trail"] == ["3/10"]
    json.dumps(rec)


def test_attractor_record(f_right, f1):
    rec = io.attractor_record(attractor_set(f_right, 10), f_right.backend)
    assert [o["points"] for o in rec["orbits"]] == [["1/7"], ["5/7"]]
    assert rec["basin_histogram"] == [{"orbit": 0, "count": 3}, {"orbit": 1, "count": 7}]
    rec = io.attractor_record(attractor_set(f1, 4), f1.backend)
    assert rec["phantoms"][0]["point"] == "1/2"
    assert rec["basin_histogram"] == [{"orbit": None, "count": 4}]


def test_csv_dump():
    text = io.dumps([{"a": 1, "b": [1, 2]}, {"a": 2, "c": "x"}], "csv")
    rows = list(csv.DictReader(stdio.StringIO(text)))
    assert rows[0] == {"a": "1", "b": "[1, 2]", "c": ""}
    assert rows[1]["c"] == "x"
    with pytest.raises(ValidationError):
        io.dumps({}, "xml")


def test_emit_to_file(tmp_path):
    p = tmp_path / "out.json"
    io.emit({"x": 1}, "json", p)
    assert json.loads(p.read_text()) == {"x": 1}
