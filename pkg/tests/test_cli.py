import json
import math
import subprocess
import sys

import pytest

from illume.cli import main


@pytest.fixture
def square_json(tmp_path):
    p = tmp_path / "square.json"
    p.write_text(json.dumps({"kind": "polytope",
                             "vertices": [[-1, -1], [1, -1], [1, 1], [-1, 1]]}))
    return str(p)


def test_capvol_square_triangle_case(square_json, capsys):
    assert main(["capvol", "--body", square_json, "--weight", "uniform", "--z", "2,0"]) == 0
    assert capsys.readouterr().out.strip() == "1.0"


def test_capvol_methods_and_weights(square_json, capsys):
    assert main(["capvol", "--body", square_json, "--z", "2,0", "--method", "boundary"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(1.0)
    assert main(["capvol", "--body", square_json, "--z", "2,0", "--method", "monte-carlo",
                 "--samples", "20000", "--seed", "4"]) == 0
    val, _, err = capsys.readouterr().out.split()
    assert abs(float(val) - 1.0) <= 4 * float(err)


def test_malformed_json_is_input_error(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["body", "--body", str(p)]) == 1
    assert "line 1" in capsys.readouterr().err


def test_argument_errors_exit_1(capsys):
    assert main(["capvol"]) == 1
    assert main(["frobnicate"]) == 1
    assert main(["capvol", "--body", "x.json", "--z", "a,b"]) == 1


def test_body_command(square_json, capsys):
    assert main(["body", "--body", square_json]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["volume"] == pytest.approx(4.0) and d["origin_interior"]


def test_illuminate_writes_csv_and_svg(square_json, tmp_path, capsys):
    out = tmp_path / "p.csv"
    svg = tmp_path / "p.svg"
    assert main(["illuminate", "--body", square_json, "--delta", "0.1", "--resolution", "16",
                 "--out", str(out), "--svg", str(svg)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "u0,u1,rho,flag" and len(lines) == 17
    assert svg.read_text().lstrip().startswith("<svg")


def test_check_convexity_euclidean_square(square_json, capsys):
    assert main(["check-convexity", "--body", square_json, "--delta", "0.1",
                 "--resolution", "32"]) == 0
    assert json.loads(capsys.readouterr().out)["convex"] is True


def test_converge_is_deterministic(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"body": {"kind": "ball", "center": [0, 0], "radius": 1},
                               "delta_sequence": [1e-2, 1e-3], "directions": 8}))
    outs = []
    for k in range(2):
        o = tmp_path / f"r{k}.json"
        assert main(["converge", "--config", str(cfg), "--out", str(o)]) == 0
        outs.append(o.read_bytes())
    assert outs[0] == outs[1]
    d = json.loads(outs[0])
    assert d["schema_version"] == 1
    assert d["target"] == pytest.approx(math.pi * 3 ** (2 / 3))


def test_hilbert_command(capsys, tmp_path):
    dom = tmp_path / "disk.json"
    dom.write_text(json.dumps({"kind": "ball", "center": [0, 0], "radius": 1}))
    assert main(["hilbert", "--domain", str(dom), "--distance", "0,0", "0.5,0",
                 "--norm", "0.5,0", "1,0", "--density", "0,0"]) == 0
    d = json.loads(capsys.readouterr().out)
    assert d["distance"] == pytest.approx(math.atanh(0.5))
    assert d["norm"] == pytest.approx(4 / 3)
    assert d["density"] == pytest.approx(1.0)
    assert main(["hilbert", "--domain", str(dom)]) == 1


def test_numerical_failure_exit_2(monkeypatch, square_json):
    from illume import cli
    from illume.errors import NumericalFailure

    def boom(*a, **k):
        raise NumericalFailure("no bracket")
    monkeypatch.setattr(cli, "cap_volume", boom)
    assert main(["capvol", "--body", square_json, "--z", "2,0"]) == 2


def test_golden_json_schema(capsys):
    main(["golden", "--json"])
    d = json.loads(capsys.readouterr().out)
    assert d["schema_version"] == 1 and len(d["cases"]) >= 15


def test_golden_exit_code():
    # a correct build reports every appendix case as passing
    r = subprocess.run([sys.executable, "-m", "illume.cli", "golden"], capture_output=True,
                       text=True)
    assert r.returncode == 0, r.stdout
