import json
import subprocess
import sys

import pytest

from hilali import cli
from hilali.fibration import Check, FibrationReport

HYPERBOLIC = "model hyp\ngen x 2\ngen x2 2\ngen y 3\nd y = x*x2\n"
BAD_D2 = "model bad\ngen x 2\ngen z 5\ngen w 6\ngen y 5\nd w = x*z\nd y = x^3 + w\n"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return write


def test_invariants_json(capsys):
    code, out, _ = run(capsys, "invariants", "catalog:cpn:3", "--json")
    doc = json.loads(out)
    assert code == 0
    assert (doc["dim_pi"], doc["dim_H"], doc["h"]) == (2, 4, {"num": "1", "den": "2"})


def test_invariants_of_non_elliptic_model_fails(capsys, files):
    code, _, err = run(capsys, "invariants", files("h.txt", HYPERBOLIC))
    assert code == 1 and "not elliptic" in err


def test_validate(capsys, files):
    assert run(capsys, "validate", "catalog:sphere:5")[0] == 0
    code, out, _ = run(capsys, "validate", files("bad.txt", BAD_D2), "--json")
    assert code == 1
    assert json.loads(out)["d_squared_zero"] is False
    code, out, _ = run(capsys, "validate", "catalog:cpn:3", "--cap", "3", "--json")
    assert code == 0 and json.loads(out)["ellipticity"] == "undecided at cap"
    code, out, _ = run(capsys, "validate", files("h.txt", HYPERBOLIC))
    assert code == 0 and "not elliptic" in out


def test_fibration_check_catalog(capsys):
    code, out, _ = run(capsys, "fibration-check", "catalog:hopf:s3-s7-s4", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["passed"]
    checks = {c["name"]: c for c in doc["checks"]}
    assert checks["homotopy_counts.summed"]["slack"] == {"num": "0", "den": "1"}
    assert checks["product_half_lower"]["status"] == checks["sum_quarter_upper"]["status"] == "pass"
    assert checks["base_doubling_diagnostic"]["status"] == "diagnostic violated"


def test_fibration_check_from_files(capsys, files):
    base = files("b.txt", "model S4\ngen b 4\ngen c 7\nd c = b^2\n")
    fiber = files("f.txt", "model S3\ngen f 3\n")
    pert = files("p.txt", "d f = b\n")
    code, out, _ = run(
        capsys, "fibration-check", "--base", base, "--fiber", fiber, "--perturbation", pert,
        "--fiber-t", "f", "--base-t", "", "--json",
    )
    doc = json.loads(out)
    assert code == 0
    assert doc["X"]["dim_pi"] == 1
    assert any(c["name"] == "odd_sphere_split" for c in doc["checks"])


def test_fibration_check_rejects_bad_perturbation(capsys, files):
    base = files("b.txt", "model S4\ngen b 4\ngen c 7\nd c = b^2\n")
    fiber = files("f.txt", "model S5\ngen f 5\n")
    pert = files("p.txt", "d f = b\n")
    code, _, err = run(capsys, "fibration-check", "--base", base, "--fiber", fiber, "--perturbation", pert)
    assert code == 2 and "error" in err


def test_asserted_failure_gives_exit_one(capsys, monkeypatch):
    real = cli.analyze_fibration

    def broken(*a, **k):
        r = real(*a, **k)
        bad = Check("injected", 1, "<=", 0)
        return FibrationReport(r.name, r.F, r.B, r.X, r.transgression, r.flags, r.checks + [bad])

    monkeypatch.setattr(cli, "analyze_fibration", broken)
    assert run(capsys, "fibration-check", "catalog:product:s3-s4")[0] == 1


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["bound", "1", "2"],
        ["bound"],
        ["bound", "--threshold", "abc"],
        ["bound", "--threshold", "-1"],
        ["validate", "/nonexistent/model.txt"],
        ["invariants", "catalog:nothing"],
        ["construct"],
        ["construct", "--random", "1,2"],
        ["fibration-check"],
        ["fibration-check", "catalog:cpn:2"],
        ["experiment", "--samples", "-3"],
        ["validate", "catalog:cpn:2", "--cap", "x"],
    ],
)
def test_usage_errors_exit_two(capsys, argv):
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    assert code == 2


def test_parse_error_exit_two(capsys, files):
    code, _, err = run(capsys, "invariants", files("m.txt", "model M\ngen x 2\ngen y 7\nd y = x^3\n"))
    assert code == 2 and "line 4" in err


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "3", "1", "1", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["bound"] == {"num": "4", "den": "5"} and doc["case1"] == {"num": "1", "den": "1"}
    code, out, _ = run(capsys, "bound", "--threshold", "1/4")
    assert code == 0 and "N = 44" in out and "(18, 0, 7)" in out


def test_construct(capsys):
    code, out, _ = run(capsys, "construct", "cpn:2")
    assert code == 0 and "d y = x^3" in out
    a = run(capsys, "construct", "--random", "2,1,2", "--seed", "42")[1]
    b = run(capsys, "construct", "--random", "2,1,2", "--seed", "42")[1]
    assert a == b and a.startswith("model ")
    code, out, _ = run(capsys, "construct", "cpn:3", "--cohomology-bound")
    assert code == 0 and "literal bound 3, corrected bound 4" in out
    code, out, _ = run(capsys, "construct", "star:2,3,5", "--scale", "1")
    assert "gen x 6" in out
    code, out, _ = run(capsys, "construct", "hopf:s3-s7-s4")
    assert out.count("model ") == 3


def test_experiment_csv(capsys, tmp_path):
    path = tmp_path / "out.csv"
    code, out, _ = run(capsys, "experiment", "--samples", "4", "--seed", "2", "--csv", str(path))
    assert code == 0 and out == ""
    lines = path.read_bytes().split(b"\r\n")
    assert lines[0].startswith(b"sample_index,seed,n,m,r")
    assert len([x for x in lines if x]) == 5


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hilali", "invariants", "catalog:sphere:4"], capture_output=True, text=True)
    assert proc.returncode == 0 and "dim_H" in proc.stdout
