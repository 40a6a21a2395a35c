import json
import subprocess
import sys

import numpy as np
import pytest

from ellipsoid_measures.cli import main
from ellipsoid_measures.serialize import dumps, format_float, rows_to_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_measures_json(capsys):
    code, out, _ = run(capsys, "measures", "--axes", "2,1")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1 and doc["command"] == "measures"
    assert doc["result"]["mean_curvatures"]["values"][0] == pytest.approx(9.688448220547675, rel=1e-10)


def test_nonpositive_axis_exit_code(capsys):
    code, out, err = run(capsys, "measures", "--axes", "1,0,2")
    assert code == 2
    assert "positiv" in err and out == ""


def test_dim_mismatch_and_missing_args(capsys):
    assert run(capsys, "measures", "--axes", "1,2", "--dim", "3")[0] == 2
    assert run(capsys, "tube", "--axes", "1,2")[0] == 2
    assert run(capsys, "john")[0] == 2


def test_lattice_disc(capsys):
    code, out, _ = run(capsys, "lattice", "--axes", "2,2", "--dim", "2")
    assert code == 0
    assert json.loads(out)["result"]["report"]["count"] == 13


def test_resource_exit_code(capsys):
    assert run(capsys, "lattice", "--axes", "1e5,1e5,1e5")[0] == 4


def test_bounds_and_tube(capsys):
    code, out, _ = run(capsys, "bounds", "--axes", "3,2,1")
    res = json.loads(out)["result"]
    for b, q in zip(res["bounds"], res["quadrature"]):
        assert b["lower"] <= q * (1 + 1e-9) and q <= b["upper"] * (1 + 1e-9)
    code, out, _ = run(capsys, "tube", "--axes", "1,2,3", "--rho", "0.5")
    res = json.loads(out)["result"]
    assert res["area_bounds"]["lower"] <= res["parallel_area"] <= res["area_bounds"]["upper"]


def test_grassmann(capsys):
    code, out, _ = run(capsys, "grassmann", "--axes", "1,1,2", "--trials", "20000", "--seed", "3")
    res = json.loads(out)["result"]
    assert abs(res["ratio"] - res["quadrature_ratio"]) < 4 * res["std_error"]


def test_john_from_csv(tmp_path, capsys):
    t = np.linspace(0, 2 * np.pi, 24, endpoint=False)
    path = tmp_path / "pts.csv"
    np.savetxt(path, np.c_[2 * np.cos(t), np.sin(t)], delimiter=",")
    code, out, _ = run(capsys, "john", "--points", str(path), "--symmetric")
    res = json.loads(out)["result"]
    assert code == 0
    assert res["mvee"]["ellipsoid"]["semi_axes"][0] == pytest.approx(2.0, rel=1e-6)


def test_sweep_writes_csv_and_figure(tmp_path, capsys):
    code, out, _ = run(capsys, "sweep", "--kind", "dilation", "--axes", "2,1", "--lambda-max", "5", "--out", str(tmp_path))
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("lambda,count")
    assert len(lines) == 6
    assert (tmp_path / "dilation_ratio.png").stat().st_size > 0
    assert (tmp_path / "sweep_dilation.csv").read_text() == out


def test_input_file(tmp_path, capsys):
    from ellipsoid_measures.core import make_ellipsoid

    p = tmp_path / "e.json"
    p.write_text(dumps(make_ellipsoid([2.0, 1.0]).to_dict()))
    code, out, _ = run(capsys, "measures", "--input", str(p))
    assert code == 0


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "ellipsoid_measures", "measures", "--axes", "1,-1"], capture_output=True, text=True
    )
    assert out.returncode == 2


def test_serialization_helpers():
    assert format_float(1.0) == "1.0"
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(np.pi)) == np.pi
    doc = json.loads(dumps({"a": np.arange(3.0), "b": np.float64(2.5), "c": [1, "x"]}))
    assert doc == {"a": [0.0, 1.0, 2.0], "b": 2.5, "c": [1, "x"]}
    csv = rows_to_csv([{"x": 1.0, "y": 2}], ("x", "y"))
    assert csv == "x,y\n1,2\n"
