import json
import math
import pathlib

import pytest

import svi_toolkit as svi

FIXTURES = pathlib.Path(__file__).resolve().parents[2] / "fixtures"


def spec(name):
    return svi.load_spec(FIXTURES / name)


def test_validate_counts():
    assert svi.validate(spec("shift.json")) == (1, 8)


def test_shift_certify_consistent():
    rep = svi.run(spec("shift.json"))
    assert not rep.violated
    assert rep["summary"]["violated"] == 0
    r31 = next(r for r in rep.result("cert_liplsc")["reports"] if r["theorem"] == "3.1")
    assert r31["verdict"] == "consistent"
    assert r31["bound"] == pytest.approx(1.0, rel=1e-6)


def test_adversarial_is_violated():
    assert svi.run(spec("adversarial.json")).violated


def test_dict_input_and_csv():
    doc = json.loads(spec("shift.json"))
    rep = svi.run(doc, command="analyze", only=["val_sweep"])
    lines = rep.csv("val_sweep").splitlines()
    assert lines[0] == "p,val"
    for row in lines[1:]:
        p, v = map(float, row.split(","))
        assert v == pytest.approx(p, abs=1e-7)


def test_reports_repeat_across_thread_counts():
    a = svi.run(spec("cubic.json"), command="sweep", jobs=1, seed=5)
    b = svi.run(spec("cubic.json"), command="sweep", jobs=3, seed=5)
    assert a.text == b.text


def test_malformed_input_raises():
    with pytest.raises(svi.InputError, match="line 11"):
        svi.run(spec("malformed.json"))
    with pytest.raises(ValueError):
        svi.validate("{}")


def test_geometry_helpers():
    assert svi.excess([[0.0, 0.0], [2.0, 0.0]], [[0.0, 0.0]]) == pytest.approx(2.0)
    assert svi.cov([[2.0, 0.0], [0.0, -0.5]]) == 0.5
    assert svi.fan_phi([[[1.0]]], [-3.0]) == pytest.approx(3.0)
    assert svi.fan_phi([[[1.0]]], [1.0], p_matrix=[[1.0]], p=[-2.0]) == pytest.approx(1.0)
    assert math.isclose(svi.fan_phi([[[1.0, 0.0], [0.0, 1.0]]], [-1.0, -1.0]), math.sqrt(2.0))


def test_input_hash():
    assert svi.input_hash("") == "cbf29ce484222325"
