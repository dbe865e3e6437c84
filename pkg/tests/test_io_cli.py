import csv
import io as stdio
import json
import math

import numpy as np
import pytest

from phasekit import io
from phasekit.cli import OPERATOR_NAMES, main
from phasekit.errors import ParseError, UnknownOperator


@pytest.fixture
def matrix():
    rng = np.random.default_rng(7)
    m = rng.normal(size=(5, 4)) + 1j * rng.normal(size=(5, 4))
    m[0, 0] = 1e-300 - 0.0j
    m[1, 2] = math.pi
    return m


def test_binary_round_trip(tmp_path, matrix):
    path = tmp_path / "m.bin"
    io.write_matrix_binary(path, matrix)
    raw = path.read_bytes()
    assert raw[:8] == b"PHOPMAT1"
    assert int.from_bytes(raw[8:16], "little") == 5
    assert int.from_bytes(raw[16:24], "little") == 4
    assert len(raw) == 24 + 16 * 20
    assert np.array_equal(io.read_matrix_binary(path), matrix)


def test_binary_rejects_bad_files(tmp_path, matrix):
    path = tmp_path / "m.bin"
    io.write_matrix_binary(path, matrix)
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XXXXXXXX" + path.read_bytes()[8:])
    with pytest.raises(ValueError):
        io.read_matrix_binary(bad)
    bad.write_bytes(path.read_bytes()[:-1])
    with pytest.raises(ValueError):
        io.read_matrix_binary(bad)


def test_csv_round_trip(tmp_path, matrix):
    path = tmp_path / "m.csv"
    io.write_matrix_csv(path, matrix)
    assert np.array_equal(io.read_matrix_csv(path), matrix)
    lines = path.read_text().splitlines()
    assert lines[0] == "row,col,re,im"
    assert len(lines) == 21


def test_render_rows():
    rows = [{"check_id": "a", "measured": 0.1, "pass": True}]
    assert io.render_rows(rows, "csv") == "check_id,measured,pass\na,0.10000000000000001,true\n"
    assert json.loads(io.render_rows(rows, "json")) == rows
    with pytest.raises(ValueError):
        io.render_rows(rows, "xml")


def _csv_rows(text):
    return list(csv.DictReader(stdio.StringIO(text)))


def test_verify_default(capsys):
    assert main(["verify"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert len(rows) >= 30
    assert set(rows[0]) == {"check_id", "paper_eq", "measured", "tolerance", "pass"}
    assert all(r["pass"] == "true" for r in rows)
    assert all(r["paper_eq"] for r in rows)


def test_verify_small_basis_fails(capsys):
    assert main(["verify", "--n-max", "8", "--quad", "64"]) == 1
    captured = capsys.readouterr()
    failed = [r for r in _csv_rows(captured.out) if r["pass"] == "false"]
    assert failed
    for r in failed:
        assert f"FAILED {r['check_id']} [{r['paper_eq']}]" in captured.err


def test_verify_json(capsys):
    assert main(["verify", "--format", "json", "--n-max", "64", "--quad", "256"]) in (0, 1)
    rows = json.loads(capsys.readouterr().out)
    assert {"check_id", "paper_eq", "measured", "tolerance", "pass"} <= set(rows[0])


@pytest.mark.parametrize("content", ["{not json", '{"n_max": 7}', '{"bogus": 1}', '{"tolerances": {"nope": 1}}'])
def test_malformed_config(tmp_path, capsys, content):
    path = tmp_path / "cfg.json"
    path.write_text(content)
    assert main(["verify", "--config", str(path)]) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "phasekit:" in captured.err


def test_missing_config_and_bad_tol(capsys):
    assert main(["verify", "--config", "/nonexistent/cfg.json"]) == 2
    assert main(["verify", "--tol", "garbage"]) == 2
    assert capsys.readouterr().out == ""


def test_tolerance_override_from_config(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"n_max": 64, "quad": 256, "tolerances": {"eigen_relation": 0.0}}))
    main(["verify", "--config", str(path)])
    rows = {r["check_id"]: r for r in _csv_rows(capsys.readouterr().out)}
    assert rows["eigen_relation"]["tolerance"] == "0"


def test_moments_exact(capsys):
    assert main(["moments", "--n", "0,1,2", "--k", "2,3", "--exact"]) == 0
    values = [r["value"] for r in _csv_rows(capsys.readouterr().out)]
    assert values == ["7/20", "11/40", "9/28", "13/56", "5/12", "3/8"]


def test_moments_large_n(capsys):
    assert main(["moments", "--n", "1000", "--k", "1,2"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert float(rows[0]["value"]) == 0.5
    assert abs(float(rows[1]["value"]) - 0.375) <= 1e-5


def test_moments_guard_marks_rows(capsys):
    assert main(["moments", "--n", "0,60", "--k", "2", "--n-max", "64"]) == 1
    rows = _csv_rows(capsys.readouterr().out)
    assert rows[0]["value"] == "0.34999999999999998"
    assert rows[1]["value"] == "ERROR" and rows[1]["error"]


def test_coherent(capsys):
    assert main(["coherent", "--alpha", "2,4"]) == 0
    rows = _csv_rows(capsys.readouterr().out)
    assert len(rows) == 8
    assert {r["quantity"] for r in rows} == {"cos2phi", "comm_cos2phi_H", "comm_cos_sq_H", "comm_sin_sq_H"}


def test_phase_dist_vacuum(capsys):
    assert main(["phase-dist", "--state", "fock:0"]) == 0
    captured = capsys.readouterr()
    rows = _csv_rows(captured.out)
    assert len(rows) == 2 * 2048
    total = float(captured.err.split()[-1])
    assert abs(total - 1) <= 1e-6


def test_phase_dist_bad_state(capsys):
    assert main(["phase-dist", "--state", "squeezed:1"]) == 1
    assert main(["phase-dist", "--state", "fock:x"]) == 1
    assert main(["phase-dist", "--state", "coherent:1"]) == 1
    assert capsys.readouterr().out == ""


def test_state_spec_errors():
    from phasekit.cli import parse_state_spec
    from phasekit.fock import TruncationConfig
    cfg = TruncationConfig(16)
    assert parse_state_spec("fock:3", cfg).amplitudes[3] == 1
    assert parse_state_spec("coherent:1.0,0.5", cfg).norm == pytest.approx(1)
    with pytest.raises(ParseError):
        parse_state_spec("fock", cfg)


def test_legacy(capsys):
    assert main(["legacy", "--s", "1,100", "--format", "json"]) == 0
    rows = {r["quantity"]: r for r in json.loads(capsys.readouterr().out)}
    assert rows["pb_divergence_s100"]["value"] == 100
    assert rows["pb_divergence_s1"]["value"] == 1
    assert rows["sg_E_dag_E"]["value"] == pytest.approx(0, abs=1e-15)


@pytest.mark.parametrize("fmt_name, reader", [("bin", io.read_matrix_binary), ("csv", io.read_matrix_csv)])
def test_dump_round_trip(tmp_path, fmt_name, reader):
    from phasekit.fock import TruncationConfig
    from phasekit.operators import build_phi
    from phasekit.phase_states import build_phase_table
    from phasekit.special import build_quadrature
    out = tmp_path / f"phi.{fmt_name}"
    args = ["dump", "--operator", "phi", "--n-max", "32", "--quad", "256", "--matrix-format", fmt_name,
            "--out", str(out)]
    assert main(args) == 0
    expected = build_phi(build_phase_table(TruncationConfig(32), build_quadrature(256))).entries
    assert np.array_equal(reader(out), expected)


@pytest.mark.parametrize("name", OPERATOR_NAMES)
def test_dump_every_operator(tmp_path, name):
    out = tmp_path / "op.bin"
    assert main(["dump", "--operator", name, "--n-max", "16", "--quad", "128", "--time", "0.3",
                 "--matrix-format", "bin", "--out", str(out)]) == 0
    m = io.read_matrix_binary(out)
    assert m.shape == (17, 17)
    assert np.allclose(m, m.conj().T, atol=1e-12)


def test_dump_errors(tmp_path, capsys):
    assert main(["dump", "--operator", "phi"]) == 2
    assert main(["dump", "--operator", "momentum", "--out", str(tmp_path / "x")]) == 1
    assert "unknown operator" in capsys.readouterr().err
    from phasekit.cli import _named_operator, RunConfig
    with pytest.raises(UnknownOperator):
        _named_operator("momentum", RunConfig())


def test_reports_are_deterministic(capsys):
    outputs = []
    for _ in range(2):
        main(["verify", "--n-max", "64", "--quad", "256", "--format", "json"])
        main(["moments", "--n", "0,3", "--k", "2,5"])
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]


def test_thread_env(monkeypatch, capsys):
    monkeypatch.setenv("PHASEKIT_THREADS", "1")
    assert main(["legacy", "--s", "10"]) == 0
