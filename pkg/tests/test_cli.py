import json
import math
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

from homoshift.cli import main
from homoshift.report import SCHEMAS

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_RUNS = {
    "check_x2my2.json": ["check", "--poly", "x^2 - y^2"],
    "lift_xy.json": ["lift", "--poly", "x*y"],
    "recover_rotate.json": ["recover", "--poly", "x^2+y^2", "--map", "rotate:0.3", "--grid-n", "8"],
    "portrait_xy.svg": ["portrait", "--poly", "x*y", "--levels=-0.5,0,0.5", "--size", "240"],
}


def run(args, tmp_path, name="out.txt"):
    out = tmp_path / name
    code = main(args + ["--out", str(out)])
    return code, (out.read_bytes() if out.exists() else b"")


@pytest.mark.parametrize("name", sorted(GOLDEN_RUNS))
def test_golden_outputs(name, tmp_path):
    code, data = run(GOLDEN_RUNS[name], tmp_path)
    assert code == 0
    assert data == (GOLDEN / name).read_bytes()


@pytest.mark.parametrize("kind,name", [("check", "check_x2my2.json"), ("lift", "lift_xy.json"),
                                       ("recover", "recover_rotate.json")])
def test_golden_reports_validate(kind, name):
    jsonschema.validate(json.loads((GOLDEN / name).read_text()), SCHEMAS[kind])


def test_check_examples(tmp_path, capsys):
    doc = json.loads((GOLDEN / "check_x2my2.json").read_text())
    assert doc["star"]["holds"]
    assert [r["angle"] for r in doc["factors"]["roots"]] == pytest.approx([-math.pi / 4, math.pi / 4])
    code, data = run(["check", "--poly", "x^2*y"], tmp_path)
    assert code == 2 and json.loads(data)["star"]["holds"] is False
    assert main(["check", "--poly", "x^2 + x"]) == 1
    assert "parse error" in capsys.readouterr().err


def test_lift_examples(tmp_path):
    doc = json.loads((GOLDEN / "lift_xy.json").read_text())
    assert doc["f1_max_deviation"] <= 1e-8
    first = doc["roots"][0]
    assert first["angle"] == 0 and first["a"] == 1
    assert first["gamma2"] == pytest.approx(-1.0)
    code, data = run(["lift", "--poly", "x^2+y^2"], tmp_path)
    doc = json.loads(data)
    assert code == 0 and all(s["F1"] == pytest.approx(2.0) for s in doc["samples"])
    jsonschema.validate(doc, SCHEMAS["lift"])
    code, _ = run(["lift", "--poly", "x^2*y"], tmp_path)
    assert code == 2
    code, data = run(["lift", "--poly", "x^2*y", "--force"], tmp_path)
    assert code == 0 and json.loads(data)["star_holds"] is False


def test_flow_examples(tmp_path):
    code, data = run(["flow", "--poly", "x^2+y^2", "--z", "1,0", "--t", "pi/4"], tmp_path)
    rows = data.decode().splitlines()
    assert code == 0 and rows[0] == "t,x,y"
    t, x, y = map(float, rows[-1].split(","))
    assert t == pytest.approx(math.pi / 4) and abs(x) < 1e-7 and abs(y - 1) < 1e-7
    code, data = run(["flow", "--poly", "x^2+y^2", "--z", "1,0", "--t", "0"], tmp_path)
    assert data.decode().splitlines()[1:] == ["0.0,1.0,0.0"]
    code, data = run(["flow", "--poly", "x*y", "--z", "0,0", "--t", "1"], tmp_path)
    assert len(data.decode().splitlines()) == 2


def test_recover_examples(tmp_path):
    doc = json.loads((GOLDEN / "recover_rotate.json").read_text())
    assert doc["ok"] and all(abs(p["alpha"] - 0.15) <= 1e-9 for p in doc["points"])
    code, data = run(["recover", "--poly", "x^2+y^2", "--map", "shift:0.1*exp(-1/(x^2+y^2))",
                      "--grid-n", "32"], tmp_path)
    doc = json.loads(data)
    assert code == 0 and doc["alpha_error"] <= 1e-6
    jsonschema.validate(doc, SCHEMAS["recover"])
    code, data = run(["recover", "--poly", "x^2+y^2", "--map", "shift:0", "--grid-n", "8"], tmp_path)
    assert code == 0 and all(p["alpha"] == 0 for p in json.loads(data)["points"])


def test_recover_failures_exit_3(tmp_path):
    table = tmp_path / "h.csv"
    table.write_text("x,y,hx,hy\n0.5,0,0,0.5\n0.5,0.5,1,1\n")
    code, data = run(["recover", "--poly", "x^2+y^2", "--map", str(table)], tmp_path)
    doc = json.loads(data)
    assert code == 3 and len(doc["points"]) == 1 and len(doc["failures"]) == 1
    assert main(["recover", "--poly", "x^2+y^2", "--map", "nonsense"]) == 1


def test_portrait_examples(tmp_path):
    code, data = run(["portrait", "--poly", "x^2+y^2", "--levels", "0.25,1"], tmp_path)
    assert code == 0 and data.startswith(b"<?xml") and b"<svg" in data
    assert main(["portrait", "--poly", "x*y"]) == 1


def test_config_file_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# shared settings\npoly = x^2+y^2\nmap = rotate:0.3\ngrid_n = 4\n")
    code, data = run(["recover", "--config", str(cfg)], tmp_path)
    assert code == 0 and len(json.loads(data)["points"]) == 4
    code, data = run(["recover", "--config", str(cfg), "--grid-n", "6"], tmp_path)
    assert len(json.loads(data)["points"]) == 6
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = red\n")
    assert main(["check", "--config", str(bad)]) == 1


def test_bad_config_values():
    assert main(["check", "--poly", "x*y", "--grid-inner", "2"]) == 1
    assert main(["check", "--poly", "x*y", "--tol", "-1"]) == 1
    assert main(["check"]) == 1


def test_entry_point_runs():
    res = subprocess.run([sys.executable, "-m", "homoshift.cli", "check", "--poly", "x*y"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and json.loads(res.stdout)["degree"] == 2
