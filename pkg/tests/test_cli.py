import json
import subprocess
import sys
from fractions import Fraction

import pytest

from gapcert import cli


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def test_wg_payload(capsys):
    code, out = run_cli(capsys, "wg", "--t", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["t"] == 3
    assert payload["denominator"] == [1, 0, -5, 0, 4]
    assert payload["numerators"]["1,1,1"] == [1, 0, -2]
    assert payload["numerators"]["2,1"] == [0, -1]
    assert payload["numerators"]["3"] == [0, 0, 2]


def test_dpoly_payload(capsys):
    code, out = run_cli(capsys, "dpoly", "--t", "7")
    assert code == 0
    payload = json.loads(out)
    assert payload["t"] == 7
    coeffs = payload["coefficients"]
    assert all(isinstance(k, str) and isinstance(v, int) for k, v in coeffs.items())
    assert "0" not in coeffs  # sparse: no zero entries
    assert float(payload["at_t_inv_sq"]) == pytest.approx(1.0123816974644817e-3)
    bounds = payload["bounds"]
    assert float(bounds["factored_constant"]) == pytest.approx(0.3665467126486889)


def test_dpoly_with_q_adds_bounds(capsys):
    code, out = run_cli(capsys, "dpoly", "--t", "7", "--q", "9")
    assert code == 0
    bounds = json.loads(out)["bounds"]
    for key in ("frobenius", "factored", "analytic"):
        assert key in bounds


def test_km_exact_rationals(capsys):
    code, out = run_cli(
        capsys, "km", "--q", "3", "--t", "2", "--m-max", "2", "--backend", "exact"
    )
    assert code == 0
    rows = json.loads(out)
    assert len(rows) == 2
    assert all(r["regime"] == "exact" for r in rows)
    values = {r["m"]: r for r in rows}
    # exact backend serializes rationals as p/q strings
    assert values[2]["bound"] == "9/91"
    assert Fraction(values[1]["per_irrep"][0]["norm"]) == Fraction(9, 100)


def test_km_float_route(capsys):
    code, out = run_cli(capsys, "km", "--q", "3", "--t", "3", "--m-max", "1")
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["regime"] == "float"
    assert rows[0]["bound"] == pytest.approx(0.09, abs=1e-9)
    assert {e["nu"] for e in rows[0]["per_irrep"]} == {"2", "1,1", "3", "2,1", "1,1,1"}


def test_km_unsupported_regime(capsys):
    code, out = run_cli(capsys, "km", "--q", "2", "--t", "3")
    assert code == cli.EXIT_UNSUPPORTED


def test_gap_payload(capsys):
    code, out = run_cli(capsys, "gap", "--q", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["gap_lower"] == pytest.approx(0.2822291236000337)
    assert payload["gap_upper"] == pytest.approx(0.36)
    assert payload["sev_ratio_at_inf"] == pytest.approx(1.1215169943749475)
    code, out = run_cli(capsys, "gap", "--q", "2", "--N", "10")
    assert json.loads(out)["gap_upper"] == pytest.approx(0.42111456180001683)


def test_depth_payload_and_headline(capsys):
    code, out = run_cli(capsys, "depth", "--N", "100", "--q", "4", "--t", "4")
    assert code == 0
    payload = json.loads(out)
    assert payload["additive_layers"] == 1516
    assert payload["multiplicative_layers"] == 758
    note = payload["headline_note"]
    assert note is not None
    assert note["headline_layers"] == 3030
    assert note["formula_layers"] == 1516
    # any other parameter point carries no headline note
    _, out = run_cli(capsys, "depth", "--N", "50", "--q", "4", "--t", "4")
    assert json.loads(out)["headline_note"] is None


def test_depth_rejects_infinite(capsys):
    code, _ = run_cli(capsys, "depth", "--N", "inf", "--q", "4", "--t", "4")
    assert code == cli.EXIT_UNSUPPORTED


def test_certify_payload_validates_against_schema(capsys):
    code, out = run_cli(capsys, "certify", "--N", "inf", "--q", "4", "--t", "4")
    assert code == 0
    payload = json.loads(out)
    assert payload["certified"] is True
    assert payload["n_sites"] == "inf"
    assert payload["lam_sup"] == pytest.approx(1 / 17)
    schema = cli.certificate_schema()
    assert cli.schema_errors(payload, schema) == []


def test_certify_finite_with_depth(capsys):
    code, out = run_cli(
        capsys, "certify", "--N", "100", "--q", "4", "--t", "4", "--eps", "1e-4"
    )
    assert code == 0
    payload = json.loads(out)
    # the finite-size bisection shaves one layer off the size-uniform 1516
    assert payload["depth"]["additive_layers"] == 1515
    note = payload["headline_note"]
    assert note["headline_layers"] == 3030
    assert note["formula_layers"] == 1515
    assert any("mmatrix-bisection" in s for s in payload["method_trail"])
    assert cli.schema_errors(payload, cli.certificate_schema()) == []


def test_certify_no_certificate_exit(capsys):
    code, out = run_cli(capsys, "certify", "--q", "2", "--t", "7")
    assert code == cli.EXIT_UNSUPPORTED
    payload = json.loads(out)
    assert payload["certified"] is False
    assert cli.schema_errors(payload, cli.certificate_schema()) == []


def test_schema_errors_negative_control():
    schema = cli.certificate_schema()
    errors = cli.schema_errors({"q": "two"}, schema)
    assert errors  # missing keys and a type violation must be reported


def test_oracle_payload(capsys):
    code, out = run_cli(capsys, "oracle", "--N", "3", "--t", "2", "--q", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["unit_count"] == 2
    assert payload["staircase_sev"] == pytest.approx(0.16, abs=1e-9)
    stair = payload["staircase_nonzero"]
    assert all(len(pair) == 2 for pair in stair)
    mags = sorted(abs(complex(a, b)) for a, b in stair)
    assert mags == pytest.approx([0.16, 0.16, 1.0, 1.0], abs=1e-9)


def test_oracle_unsupported(capsys):
    code, _ = run_cli(capsys, "oracle", "--N", "3", "--t", "3", "--q", "2")
    assert code == cli.EXIT_UNSUPPORTED


def test_coderanged_csv(capsys):
    code, out = run_cli(
        capsys, "coderanged", "--q", "2", "--t", "3", "--m-max", "2"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "q,t,m,eigenvalue,residual,iterations"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert first[:3] == ["2", "3", "1"]
    assert float(first[3]) == pytest.approx(0.04, abs=1e-9)


def test_coderanged_json(capsys):
    code, out = run_cli(
        capsys, "coderanged", "--q", "3", "--t", "4", "--m-max", "1",
        "--format", "json",
    )
    assert code == 0
    rows = json.loads(out)
    assert rows[0]["tag"] == "experimental"
    assert rows[0]["trivial"] is False


def test_scan_csv_shape(capsys):
    code, out = run_cli(capsys, "scan", "--q", "3:4", "--t", "2:3")
    assert code == 0
    lines = out.strip().splitlines()
    header = lines[0].split(",")
    assert header[:4] == ["q", "t", "N", "status"]
    assert len(lines) == 5  # four (q, t) cells
    for line in lines[1:]:
        assert line.split(",")[3] == "ok"


def test_scan_includes_failures_nonfatally(capsys):
    code, out = run_cli(capsys, "scan", "--q", "2", "--t", "2,7")
    assert code == 0
    lines = out.strip().splitlines()
    rows = {tuple(l.split(",")[:2]): l.split(",") for l in lines[1:]}
    assert rows[("2", "2")][3] == "ok"
    assert rows[("2", "7")][3] == "no-certificate"


def test_scan_empty_grid(capsys):
    code, out = run_cli(capsys, "scan", "--q", "5:4", "--t", "2")
    assert code == 0
    assert len(out.strip().splitlines()) == 1  # header only


def test_reruns_byte_identical(capsys):
    for argv in (
        ["wg", "--t", "4"],
        ["gap", "--q", "3"],
        ["certify", "--N", "20", "--q", "3", "--t", "3"],
        ["scan", "--q", "2:3", "--t", "2"],
    ):
        _, first = run_cli(capsys, *argv)
        _, second = run_cli(capsys, *argv)
        assert first == second


def test_out_file_roundtrip(tmp_path, capsys):
    target = tmp_path / "gap.json"
    code, out = run_cli(capsys, "gap", "--q", "2", "--out", str(target))
    assert code == 0
    assert out == ""
    payload = json.loads(target.read_text())
    assert payload["q"] == 2


def test_verify_tables_both_modes(capsys):
    code, out = run_cli(capsys, "verify-tables")
    assert code == 0
    assert "table checks passed" in out
    assert "FAIL" not in out
    code, out = run_cli(capsys, "verify-tables", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    assert all(c["status"] == "pass" for c in payload["checks"])
    assert len(payload["checks"]) >= 40


def test_parse_grid():
    assert list(cli._parse_grid("2")) == [2]
    assert list(cli._parse_grid("2:4")) == [2, 3, 4]
    # comma lists keep their order; the scan command sorts downstream
    assert list(cli._parse_grid("5,2,3")) == [5, 2, 3]
    assert list(cli._parse_grid("5:4")) == []


def test_jsonable_fractions():
    out = cli._jsonable({"a": Fraction(3, 7), "b": [float("inf"), 1]})
    assert out == {"a": "3/7", "b": ["inf", 1]}


def test_console_entry_point():
    proc = subprocess.run(
        ["gapcert", "gap", "--q", "2"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["q"] == 2
