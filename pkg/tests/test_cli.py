import csv
import io
import json

import numpy as np
import pytest

from relaxrk import cli
from relaxrk.relaxation import InnerProductSpace, IvpProblem


def parse_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], rows[1:]


def read_csv(path):
    return parse_csv(path.read_text())


def test_list_methods_table(capsys):
    assert cli.main(["list-methods"]) == 0
    out = capsys.readouterr().out
    header, rows = parse_csv(out)
    assert header == ["method", "stages", "order", "ssp_coeff", "gamma_star"]
    assert len(rows) == 5
    by_name = {row[0]: row for row in rows}
    assert by_name["SSPRK(3,3)"][1:4] == ["3", "3", "1.0"]
    assert float(by_name["SSPRK(3,3)"][4]) == pytest.approx(1.5)
    assert float(by_name["SSPRK(10,4)"][4]) == pytest.approx(25.0 / 24.0, abs=1e-6)
    # no relaxation bound when the monotonicity radius is zero
    assert by_name["RK(4,4)"][3] == "0.0"
    assert by_name["RK(4,4)"][4] == ""
    assert by_name["BSRK(8,5)"][4] == ""


def test_validate_builtin(capsys):
    assert cli.main(["validate", "--method", "BSRK(8,5)"]) == 0
    out = capsys.readouterr().out
    assert "order: 5" in out
    assert "explicit: True" in out
    assert "c_consistent: True" in out


def test_validate_tableau_file(tmp_path, capsys):
    path = tmp_path / "heun.txt"
    path.write_text("# Heun\n2\n0 0\n1 0\n0.5 0.5\n")
    assert cli.main(["validate", "--tableau-file", str(path)]) == 0
    out = capsys.readouterr().out
    assert "name: heun" in out
    assert "order: 2" in out


def test_validate_rejects_malformed_file(tmp_path, capsys):
    path = tmp_path / "bad.txt"
    path.write_text("2\n0 0\n")
    assert cli.main(["validate", "--tableau-file", str(path)]) == 1
    assert "error" in capsys.readouterr().err


def test_integrate_writes_trajectory_and_manifest(tmp_path):
    rc = cli.main(
        ["integrate", "--method", "SSPRK(3,3)", "--mode", "rrk",
         "--problem", "oscillator", "--dt", "0.5", "--t-end", "2",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    header, rows = read_csv(tmp_path / "trajectory_ssprk33_rrk.csv")
    assert header == ["t", "gamma", "energy"]
    assert float(rows[0][0]) == 0.0 and float(rows[0][1]) == 1.0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["subcommand"] == "integrate"
    assert manifest["args"]["dt"] == 0.5
    assert manifest["outputs"] == [str(tmp_path / "trajectory_ssprk33_rrk.csv")]
    assert "version" in manifest


def test_integrate_constant_state_for_zero_rhs(tmp_path, monkeypatch):
    # a frozen right-hand side must reproduce the initial state in every row
    stub = IvpProblem(
        name="frozen",
        dim=2,
        rhs=lambda t, u: np.zeros(2),
        space=InnerProductSpace(2),
        u0=np.array([2.0, -1.0]),
    )
    monkeypatch.setattr(cli, "_resolve_problem", lambda args: stub)
    rc = cli.main(
        ["integrate", "--method", "RK(4,4)", "--problem", "oscillator",
         "--dt", "0.25", "--t-end", "1", "--dump-state", "--out", str(tmp_path)]
    )
    assert rc == 0
    _, rows = read_csv(tmp_path / "trajectory_rk44_rrk.csv")
    energies = {row[2] for row in rows}
    assert energies == {"5.0"}
    gammas = {row[1] for row in rows}
    assert gammas == {"1.0"}
    _, state_rows = read_csv(tmp_path / "state_rk44_rrk.csv")
    assert [r[1] for r in state_rows] == ["2.0", "-1.0"]


def test_energy_conserved_in_output(tmp_path):
    rc = cli.main(
        ["energy", "--method", "RK(4,4)", "--mode", "rrk",
         "--problem", "oscillator", "--dt", "0.9", "--t-end", "20",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    _, rows = read_csv(tmp_path / "energy_rk44_rrk.csv")
    energies = np.array([float(r[1]) for r in rows])
    assert np.max(np.abs(energies - 1.0)) <= 1e-11


def test_convergence_subcommand_burgers(tmp_path):
    rc = cli.main(
        ["convergence", "--method", "SSPRK(2,2)", "--mode", "rrk",
         "--problem", "burgers-cons", "--t-end", "0.03",
         "--dts", "0.012", "0.006", "--out", str(tmp_path)]
    )
    assert rc == 0
    header, rows = read_csv(tmp_path / "convergence.csv")
    assert header == ["method", "mode", "dt", "error", "achieved_t", "slope"]
    assert len(rows) == 2
    slope = float(rows[0][5])
    assert 1.5 < slope < 2.5
    assert {r[5] for r in rows} == {rows[0][5]}


def test_gamma_study_default_window(tmp_path):
    rc = cli.main(
        ["gamma-study", "--method", "RK(4,4)", "--problem", "oscillator",
         "--out", str(tmp_path)]
    )
    assert rc == 0
    _, rows = read_csv(tmp_path / "gamma_study.csv")
    assert len(rows) == 5
    assert float(rows[0][2]) == pytest.approx(6.504169752390432e-4, rel=1e-9)


def test_stability_region_files_and_nesting(tmp_path):
    rc = cli.main(
        ["stability-region", "--method", "SSPRK(3,3)",
         "--gamma", "0.7", "1.0", "1.3", "--out", str(tmp_path)]
    )
    assert rc == 0
    areas = {}
    for g in ("0.7", "1.0", "1.3"):
        assert (tmp_path / f"boundary_ssprk33_g{g}.csv").exists()
        _, rows = read_csv(tmp_path / f"region_ssprk33_g{g}.csv")
        areas[g] = sum(int(r[2]) for r in rows)
    assert areas["0.7"] > areas["1.0"] > areas["1.3"]


def test_ssp_table_csv(tmp_path):
    rc = cli.main(["ssp-table", "--out", str(tmp_path)])
    assert rc == 0
    header, rows = read_csv(tmp_path / "ssp_table.csv")
    assert header == ["method", "stages", "order", "ssp_coeff", "gamma_star"]
    assert len(rows) == 5
    table = {r[0]: r for r in rows}
    assert float(table["SSPRK(10,4)"][3]) == pytest.approx(6.0, abs=1e-5)
    assert table["BSRK(8,5)"][4] == ""


def test_modes_csv(tmp_path):
    rc = cli.main(
        ["modes", "--method", "RK(4,4)", "--mode", "rrk",
         "--problem", "advection", "--m", "32", "--seed", "7",
         "--mu", "0.9", "--t-end", "0.5", "--out", str(tmp_path)]
    )
    assert rc == 0
    header, rows = read_csv(tmp_path / "modes_rk44_rrk.csv")
    assert header == ["xi", "rel_change"]
    assert len(rows) == 16
    changes = np.array([float(r[1]) for r in rows])
    assert np.any(changes > 0.0) and np.any(changes < 0.0)


def test_manifest_replay_is_byte_identical(tmp_path):
    argv = ["modes", "--method", "RK(4,4)", "--problem", "advection",
            "--m", "32", "--seed", "7", "--mu", "0.9", "--t-end", "0.5",
            "--out", str(tmp_path)]
    assert cli.main(argv) == 0
    csv_path = tmp_path / "modes_rk44_rrk.csv"
    manifest_path = tmp_path / "manifest.json"
    before = csv_path.read_bytes(), manifest_path.read_bytes()
    assert cli.main(["--manifest", str(manifest_path)]) == 0
    after = csv_path.read_bytes(), manifest_path.read_bytes()
    assert before == after


def test_manifest_rejects_unknown_field(tmp_path, capsys):
    bad = tmp_path / "manifest.json"
    bad.write_text(json.dumps({"subcommand": "ssp-table", "args": {"bogus": 1}}))
    assert cli.main(["--manifest", str(bad)]) == 1
    assert "unknown field" in capsys.readouterr().err


def test_usage_errors_exit_one(tmp_path, capsys):
    cases = [
        ["integrate", "--method", "RK(4,4)", "--problem", "advection",
         "--dt", "0.1", "--t-end", "1"],
        ["integrate", "--method", "RK(9,9)", "--problem", "oscillator",
         "--dt", "0.1", "--t-end", "1"],
        ["integrate", "--problem", "oscillator", "--dt", "0.1", "--t-end", "1"],
        ["integrate", "--method", "RK(4,4)", "--problem", "oscillator", "--dt", "0.1"],
        ["modes", "--method", "RK(4,4)", "--problem", "oscillator",
         "--dt", "0.1", "--t-end", "1"],
        ["convergence", "--method", "RK(4,4)", "--problem", "advection", "--t-end", "1"],
    ]
    for argv in cases:
        assert cli.main(argv + ["--out", str(tmp_path)]) == 1, argv
        assert capsys.readouterr().err != ""


def test_numerical_abort_exits_two(tmp_path, capsys):
    rc = cli.main(
        ["integrate", "--method", "RK(4,4)", "--problem", "burgers-cons",
         "--dt", "50", "--t-end", "200", "--out", str(tmp_path)]
    )
    assert rc == 2
    err = capsys.readouterr().err
    assert "step" in err


def test_integrate_with_tableau_file(tmp_path):
    path = tmp_path / "heun.txt"
    path.write_text("2\n0 0\n1 0\n0.5 0.5\n")
    rc = cli.main(
        ["integrate", "--tableau-file", str(path), "--problem", "oscillator",
         "--dt", "0.1", "--t-end", "1", "--out", str(tmp_path)]
    )
    assert rc == 0
    assert (tmp_path / "trajectory_heun_rrk.csv").exists()


def test_missing_subcommand_exits_one(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main([])
    assert info.value.code == 1
