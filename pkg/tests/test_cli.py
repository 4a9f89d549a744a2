import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from hessinv.cli import run
from hessinv.handles import family_from_spec

SPECS = Path(__file__).resolve().parents[1] / "specs"


def invoke(capsys, *args):
    code = run([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def summary(text):
    pairs = [ln[2:].split(": ", 1) for ln in text.splitlines() if ln.startswith("# ")]
    return dict(pairs)


def test_separable_passes(capsys):
    code, out, _ = invoke(capsys, "check-propi", "--spec", SPECS / "separable.json", "--samples", 20)
    assert code == 0
    s = summary(out)
    assert s["status"] == "PASS" and s["property_I"] == "true"
    rows = table(out)
    assert len(rows) == 20 and {r["verdict"] for r in rows} == {"ZERO"}


def test_mixed_exponential_fails_with_exit_one(capsys):
    code, out, _ = invoke(capsys, "poisson-commute", "--spec", SPECS / "mixedexp.json", "--samples", 10)
    assert code == 1
    assert summary(out)["commute"] == "false"
    code, _, _ = invoke(capsys, "check-propi", "--spec", SPECS / "mixedexp.json", "--samples", 10)
    assert code == 1


def test_characteristics_reports_the_rotation_angle(capsys):
    code, out, _ = invoke(capsys, "characteristics", "--spec", SPECS / "rotated30.json", "--samples", 50)
    assert code == 0
    assert float(summary(out)["angle"]) == pytest.approx(np.pi / 6, abs=1e-9)


def test_lift_csv_columns(capsys):
    code, out, _ = invoke(capsys, "lift", "--builtin", "sep_exp", "--start=-0.5,0.5", "--direction", "1,0",
                          "--t-max", 0.1, "--step", 0.05)
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == ["t", "A11", "A12", "A21", "A22", "orthonormality_drift", "c_drift"]
    assert [float(r["t"]) for r in rows] == pytest.approx([0, 0.05, 0.1])
    # the separable lift stays diagonal
    assert all(float(r["A12"]) == 0 and float(r["A21"]) == 0 for r in rows)


def test_lift_leaving_the_domain_is_a_usage_error(capsys):
    code, _, err = invoke(capsys, "lift", "--builtin", "sep_exp", "--start=-0.5,0.5", "--direction", "1,0",
                          "--t-max", 5)
    assert code == 2 and "error" in err


def test_json_format(capsys):
    code, out, _ = invoke(capsys, "legendre", "--builtin", "rot30", "--samples", 5, "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["command"] == "legendre" and doc["status"] == "PASS" and len(doc["rows"]) == 5


def test_output_is_deterministic(capsys, tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.csv"
        assert invoke(capsys, "report-all", "--builtin", "handles", "--samples", 10, "--out", path)[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and outs[0]


@pytest.mark.parametrize("args", [
    ["no-such-command"],
    ["check-propi"],
    ["check-propi", "--spec", "/nonexistent/spec.json"],
    ["check-propi", "--builtin", "sep_exp", "--spec", "x.json"],
    ["check-propi", "--builtin", "sep_exp", "--samples", "0"],
])
def test_usage_errors(capsys, args):
    assert invoke(capsys, *args)[0] == 2


def test_malformed_spec(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert invoke(capsys, "check-propi", "--spec", bad)[0] == 2
    bad.write_text(json.dumps({"kind": "nope", "dim": 2, "params": {}}))
    assert invoke(capsys, "check-propi", "--spec", bad)[0] == 2


def test_handles_build_and_check(capsys, tmp_path):
    emitted = tmp_path / "family.json"
    code, out, _ = invoke(capsys, "handles-build", "--spec", SPECS / "handles2.json", "--emit-spec", emitted)
    assert code == 0 and len(table(out)) == 2
    f = family_from_spec(json.loads(emitted.read_text()))
    assert len(f.domain.handles) == 2
    code, out, _ = invoke(capsys, "handles-check", "--spec", emitted, "--samples", 100)
    assert code == 0 and summary(out)["status"] == "PASS"
    code, out, _ = invoke(capsys, "handles-check", "--spec", emitted, "--samples", 100, "--conjugate")
    assert code == 0 and summary(out)["status"] == "PASS"


def test_handles_check_needs_a_family(capsys):
    assert invoke(capsys, "handles-check", "--builtin", "rot30")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hessinv", "jets2d", "--builtin", "rot30", "--samples", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("# command: jets2d")


def test_jets2d_on_an_umbilic_function_is_not_applicable(capsys):
    code, out, _ = invoke(capsys, "jets2d", "--builtin", "quadratic", "--samples", 5)
    assert code == 0
    s = summary(out)
    assert s["status"] == "NOT_APPLICABLE" and "base_point" in s
