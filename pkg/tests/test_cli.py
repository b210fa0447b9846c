import json
import math
from fractions import Fraction

import pytest

from cvgeom import bodies as bd
from cvgeom import cli
from cvgeom import polytope as pt
from cvgeom import suites
from cvgeom.suites import CaseResult


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, body in [("square", pt.cube(2)), ("ball2d", bd.Ball(1.0, 2)),
                       ("cap", bd.Piecewise2D.disc_section(-1, 0.5))]:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps(bd.body_to_json(body)))
        out[name] = str(path)
    return out


def run(capsys, *argv):
    code = cli.main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_compute_volume_exact(files, capsys):
    code, out, _ = run(capsys, "compute", "--spec", '{"c0":0,"c1":1,"c2":0}', files["square"])
    res = json.loads(out)["results"][0]
    assert code == 0
    assert res["value"] == {"value": "4/1", "provenance": "exact"}
    assert res["polar_volume"]["value"] == "2/1"


def test_compute_omega_on_disc(files, capsys):
    code, out, _ = run(capsys, "compute", "--phi", "power:p=1", files["ball2d"])
    res = json.loads(out)["results"][0]
    assert code == 0
    assert res["omega"]["value"] == pytest.approx(2 * math.pi, abs=1e-6)
    assert res["omega"]["provenance"] == "closed-form"


def test_compute_mahler(files, capsys):
    code, out, _ = run(capsys, "compute", "--spec", "mahler", files["square"])
    assert code == 0 and json.loads(out)["results"][0]["value"]["value"] == "8/1"


def test_compute_curved_reports_quadrature(files, capsys):
    code, out, _ = run(capsys, "compute", "--phi", "power:p=1", files["cap"])
    res = json.loads(out)["results"][0]
    assert code == 0
    assert res["polar_volume"]["provenance"] == "quadrature"
    assert res["polar_volume"]["value"] == pytest.approx(2 * math.pi / 3 + math.sqrt(3), rel=1e-9)
    assert res["omega"]["value"] == pytest.approx(2 * (math.pi - math.acos(0.5)), rel=1e-9)


def test_compute_csv(files, capsys, tmp_path):
    out = tmp_path / "r.csv"
    code, stdout, _ = run(capsys, "compute", "--spec", "mahler", "--format", "csv", "--out", str(out), files["square"])
    assert code == 0 and stdout == ""
    rows = out.read_text().splitlines()
    assert rows[0] == "input,quantity,value,provenance"
    assert f"{files['square']},value,8/1,exact" in rows


@pytest.mark.parametrize("argv", [
    ["compute", "missing.json"],
    ["compute", "--phi", "power:p=-1", "SQUARE"],
    ["compute", "--phi", "cubic:a=1", "SQUARE"],
    ["verify", "no-such-suite"],
    ["verify"],
])
def test_errors_exit_2(argv, files, capsys):
    argv = [files["square"] if a == "SQUARE" else a for a in argv]
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith("error: ")


def test_unknown_suite_is_typed(capsys):
    _, _, err = run(capsys, "verify", "--suite", "bogus")
    assert "UnknownSuite" in err


def test_verify_polar_involution(capsys):
    code, out, _ = run(capsys, "verify", "polar-involution", "--seed", "7", "--cases", "100")
    doc = json.loads(out)
    assert code == 0 and doc["passed"] and len(doc["cases"]) == 100
    assert all(c["residual"] == 0 for c in doc["cases"])


def test_verify_homogeneity(capsys):
    code, out, _ = run(capsys, "verify", "homogeneity", "--p", "1")
    doc = json.loads(out)
    case = next(c for c in doc["cases"] if c["name"].startswith("omega"))
    assert code == 0
    assert case["detail"]["q_hat"] == pytest.approx(2 / 3, abs=1e-4)


def test_verify_usc(capsys):
    code, out, _ = run(capsys, "verify", "usc-probe", "--sequence", "ngon", "--max", "512")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]


def test_verify_failure_exit_1(capsys, monkeypatch):
    def build(cfg):
        return [lambda: CaseResult("ok", True, 0), lambda: CaseResult("bad", False, 1)]

    monkeypatch.setitem(suites.SUITES, "always-fails", ("one failing case", build))
    code, out, _ = run(capsys, "verify", "always-fails")
    doc = json.loads(out)
    assert code == 1 and not doc["passed"]
    assert [c["passed"] for c in doc["cases"]] == [True, False]


def test_nonpositive_tolerance_rejected(capsys):
    code, _, err = run(capsys, "verify", "cauchy", "--tol", "0")
    assert code == 2 and "tol" in err


def test_decompose_exact(capsys):
    code, out, _ = run(capsys, "decompose", "--spec", '{"c0":2,"c1":3,"c2":5}')
    doc = json.loads(out)
    assert code == 0 and doc["exact"]
    assert (doc["c0"], doc["c1"], doc["c2"]) == ("2/1", "3/1", "5/1")


def test_decompose_phi_only(capsys):
    code, out, _ = run(capsys, "decompose", "--phi", "power:p=1")
    doc = json.loads(out)
    assert code == 0
    for s, v in doc["phi_samples"]:
        assert v == pytest.approx(s ** (1 / 3), abs=1e-6)


def test_decompose_full(capsys):
    code, out, _ = run(capsys, "decompose", "--spec", '{"c0":1,"c1":1,"c2":1}', "--phi", "power:p=2",
                       "--grid", "1/4,1/2,1,2,4")
    doc = json.loads(out)
    assert code == 0 and (doc["c0"], doc["c1"], doc["c2"]) == ("1/1", "1/1", "1/1")
    assert len(doc["phi_samples"]) == 5
    for s, v in doc["phi_samples"]:
        assert v == pytest.approx(s ** 0.5, abs=1e-6)
    assert doc["q_hat"] == pytest.approx(0.0, abs=1e-6)


def test_decompose_csv(capsys):
    code, out, _ = run(capsys, "decompose", "--spec", '{"c0":2,"c1":3,"c2":5}', "--format", "csv")
    assert code == 0 and "c0,2/1" in out.splitlines()


def test_parse_phi_forms():
    assert cli.parse_phi("power:p=1")(8.0) == pytest.approx(2.0)
    assert cli.parse_phi("capped:slope=2,cap=1")(3.0) == 1.0
    assert cli.parse_phi("table:1/2=1/4;1=1/2")(0.75) == pytest.approx(0.375)
    assert cli.parse_phi('{"type": "power", "p": 2}', 2)(4.0) == pytest.approx(2.0)
    assert cli.parse_phi(None) is None


def test_reports_are_deterministic(capsys, monkeypatch):
    argv = ("verify", "valuation-identity", "--seed", "3", "--cases", "20")
    _, first, _ = run(capsys, *argv)
    monkeypatch.setenv("CV_THREADS", "1")
    _, second, _ = run(capsys, *argv)
    _, third, _ = run(capsys, *argv[:2], "--seed", "4", *argv[4:])
    assert first == second
    assert first != third


def test_rational_encoding():
    assert cli.encode(Fraction(3, 6)) == "1/2"
    assert cli.encode(2) == 2 and cli.encode(0.5) == 0.5
