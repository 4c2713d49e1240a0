import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from heunstep.cli import main

GOLDEN = Path(__file__).parent / "golden"


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def assert_matches_golden(text, name, tol=1e-13):
    got = list(csv.reader(io.StringIO(text)))
    ref = list(csv.reader(io.StringIO((GOLDEN / name).read_text())))
    assert got[0] == ref[0]
    assert len(got) == len(ref)
    a = np.array(got[1:], dtype=float)
    b = np.array(ref[1:], dtype=float)
    assert np.all(np.abs(a - b) <= tol * np.maximum(1.0, np.abs(b)))


def test_potential_defaults(capsys):
    code, out, _ = run(["potential"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "x,z,rho,V"
    assert len(rows(out)) == 101
    assert_matches_golden(out, "potential_default.csv")


def test_transform_alias(capsys):
    a = run(["potential"], capsys)[1]
    b = run(["transform"], capsys)[1]
    assert a == b


def test_potential_half_height_row(capsys):
    x = -math.log(4)
    code, out, _ = run(["potential", "--x-min", repr(x), "--x-max", repr(x), "--x-count", "1"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert abs(float(row["V"]) - 0.5) < 1e-15
    assert abs(float(row["z"]) - 2) < 1e-15


def test_profiles_for_several_widths_match_golden(capsys):
    code, out, _ = run(["potential", "--sigma", "-0.5", "--sigma", "-1", "--sigma", "-2"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "sigma,x,z,rho,V"
    assert_matches_golden(out, "fig1_profiles.csv")


def test_output_is_bit_identical_across_runs(capsys, tmp_path):
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["transmission", "--sigma", "-0.25", "--output", str(p1)], capsys)[0] == 0
    assert run(["transmission", "--sigma", "-0.25", "--output", str(p2)], capsys)[0] == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_full_precision_formatting(capsys):
    out = run(["transmission", "--sigma", "-0.25", "--energy", "2"], capsys)[1]
    (row,) = rows(out)
    from heunstep import PhysicalConfig, transmission
    assert float(row["T"]) == transmission(PhysicalConfig(sigma=-0.25), 2.0)


def test_transmission_sweep_shape_and_monotonicity(capsys):
    code, out, _ = run(["transmission", "--sigma", "-0.25", "--energy-min", "1.1", "--energy-max", "6",
                        "--energy-count", "50"], capsys)
    assert code == 0
    data = rows(out)
    assert len(data) == 50
    R = [float(r["R"]) for r in data]
    assert all(0 < r < 1 for r in R)
    assert all(b < a for a, b in zip(R, R[1:]))
    assert all(r["regime"] == "above" for r in data)


def test_default_sweep_uses_three_widths(capsys):
    data = rows(run(["transmission"], capsys)[1])
    assert sorted({float(r["sigma"]) for r in data}) == [-0.6, -0.25, -0.1]
    assert len(data) == 150


def test_threshold_row_is_flagged(capsys):
    code, out, _ = run(["transmission", "--sigma", "-0.25", "--energy", "1", "--energy", "1.5"], capsys)
    assert code == 0
    data = rows(out)
    assert data[0]["regime"] == "below_threshold" and data[0]["T"] == "" and data[0]["R"] == ""
    assert data[1]["regime"] == "above"


def test_oracle_columns_and_agreement(capsys):
    code, out, _ = run(["transmission", "--sigma", "-0.6", "--energy-min", "1.1", "--energy-max", "5",
                        "--energy-count", "4", "--oracle"], capsys)
    assert code == 0
    data = rows(out)
    assert list(data[0]) == ["sigma", "E", "T", "R", "regime", "T_oracle", "abs_dT"]
    assert max(float(r["abs_dT"]) for r in data) <= 1e-4


def test_oracle_tolerance_violation_exits_3(capsys):
    code, _, err = run(["transmission", "--sigma", "-0.6", "--energy", "2", "--oracle",
                        "--tolerance", "oracle_transmission=1e-30"], capsys)
    assert code == 3
    assert "exceeds tolerance" in err


def test_json_format(capsys):
    code, out, _ = run(["transmission", "--sigma", "-0.25", "--energy", "1", "--energy", "2",
                        "--format", "json"], capsys)
    assert code == 0
    data = json.loads(out)
    assert data[0]["T"] is None and data[0]["regime"] == "below_threshold"
    assert 0 < data[1]["T"] < 1


def test_wavefunction_columns_and_residual(capsys):
    code, out, _ = run(["wavefunction", "--sigma", "-0.25", "--energy", "2"], capsys)
    assert code == 0
    data = rows(out)
    assert list(data[0]) == ["x", "re_psi", "im_psi", "abs_psi2", "residual"]
    assert len(data) == 201
    assert max(float(r["residual"]) for r in data) <= 1e-6
    for r in data:
        re, im = float(r["re_psi"]), float(r["im_psi"])
        assert abs(float(r["abs_psi2"]) - (re * re + im * im)) <= 1e-15 * max(1.0, re * re + im * im)


def test_wavefunction_far_right_is_plane_wave(capsys):
    code, out, _ = run(["wavefunction", "--sigma", "-0.5", "--energy", "2", "--x-min", "15",
                        "--x-max", "25", "--x-count", "21"], capsys)
    assert code == 0
    mod = np.sqrt([float(r["abs_psi2"]) for r in rows(out)])
    assert np.ptp(mod) <= 1e-5 * mod.max()


def test_wavefunction_accepts_complex_coefficients(capsys):
    code, out, _ = run(["wavefunction", "--energy", "2", "--c1", "0.5-1i", "--c2", "2", "--x-count", "5"],
                       capsys)
    assert code == 0
    assert len(rows(out)) == 5


def test_wavefunction_at_threshold_is_numeric_error(capsys):
    code, out, err = run(["wavefunction", "--energy", "1"], capsys)
    assert code == 2
    assert out == ""
    assert "ParameterDegeneracy" in err


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["potential", "--x-count", "0"],
    ["potential", "--x-min", "3", "--x-max", "1"],
    ["potential", "--sigma", "0"],
    ["potential", "--mass", "-1"],
    ["potential", "--format", "xml"],
    ["wavefunction"],
    ["wavefunction", "--energy", "2", "--sigma", "-1", "--sigma", "-2"],
    ["wavefunction", "--energy", "2", "--c1", "abc"],
    ["transmission", "--energy-count", "0"],
    ["transmission", "--energy-min", "5", "--energy-max", "2"],
    ["transmission", "--tolerance", "oracle_transmission=-1"],
    ["transmission", "--tolerance", "nonsense=1e-3"],
    ["transmission", "--tolerance", "missing_value"],
    ["verify", "--tolerance", "no_such_check=1"],
])
def test_usage_errors_exit_1(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 1
    assert out == ""
    assert err.startswith("usage error")


def test_verify_report(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, _, _ = run(["verify", "--output", str(path)], capsys)
    report = json.loads(path.read_text())
    assert code == 0 and report["passed"]
    names = {c["name"] for c in report["checks"]}
    assert {"termination_identity", "series_termination", "solution_equivalence", "flux_identity",
            "oracle_transmission", "abrupt_step_limit", "transparency_limit"} <= names
    for c in report["checks"]:
        assert set(c) >= {"name", "passed", "residual", "tolerance"}
        assert c["passed"] is True


def test_verify_injected_fault_fails(capsys):
    code, out, _ = run(["verify", "--inject-fault", "q"], capsys)
    report = json.loads(out)
    assert code == 3
    checks = {c["name"]: c for c in report["checks"]}
    assert not checks["termination_identity"]["passed"]
    assert not report["passed"]


def test_verify_tolerance_override(capsys):
    code, out, _ = run(["verify", "--tolerance", "flux_identity=1e-30"], capsys)
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert code == 3
    assert checks["flux_identity"]["tolerance"] == 1e-30 and not checks["flux_identity"]["passed"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "heunstep.cli", "potential", "--x-count", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "x,z,rho,V"
    assert len(proc.stdout.splitlines()) == 4
