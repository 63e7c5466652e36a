import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nhqfi import bosonic, cli, presets, pt
from nhqfi.errors import SpecError
from nhqfi.measurement import error_propagation
from nhqfi.qfi import qfi_expectation
from nhqfi.sweep import render, run_sweep, spec_from_dict

HALF_PI = math.pi / 2


def run_cli(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out=out)
    return code, out.getvalue()


def test_fig1a_peak():
    res = run_sweep(presets.get("fig1a"))
    q = res.values("qfi")
    assert len(res.rows) == 28001
    assert np.nanmax(q) == pytest.approx(6.25, abs=1e-6)
    assert np.nanmin(q) == pytest.approx(2.25, abs=1e-6)


def test_fig2a_ep_jump():
    res = run_sweep(presets.get("fig2a"))
    s = res.values("s")
    q = res.values("qfi")
    k = int(np.argmin(np.abs(s - 2.0)))
    assert q[k] == pytest.approx(16.0, abs=1e-9)
    assert q[k - 1] < 1e-3 and q[k + 1] < 1e-3
    assert q[k - 1] < q[k - 2] and q[k + 1] < q[k + 2]  # decreasing toward the EP


def test_fig2b_channel_drop():
    res = run_sweep(presets.get("fig2b"))
    s = res.values("s")
    c = res.values("channel_qfi")
    k = int(np.argmin(np.abs(s - 2.0)))
    assert c[k] == 0.0
    assert c[k - 1] == pytest.approx(4 * (s[k - 1] + 2) ** 2)
    assert c[k + 1] == pytest.approx(4 * (s[k + 1] + 2) ** 2)


def test_rows_reproducible_from_module_calls():
    res = run_sweep(presets.get("fig3b"))
    P = pt.PtParams(0.25, 0.5, HALF_PI)
    psi = pt.initial_state(P, pt.InitialStateSpec(1.1, 0.0))
    for row in res.rows[::97]:
        t, v, status = row
        assert status == "ok"
        assert v == pytest.approx(error_propagation(pt.build(P), np.diag([1.0, 0.0]), psi, t), rel=1e-12)
    res = run_sweep(presets.get("bosonic"))
    B = bosonic.BosonicParams(1.0, 1.0, 0.8, 0.2)
    for t, v, _ in res.rows[::50]:
        assert v == pytest.approx(qfi_expectation(bosonic.effective_hamiltonian(B), [1, 0], t).qfi, abs=1e-12)


def test_gap_rows_carry_error_code():
    doc = presets.get("fig3a")
    doc["measurement"] = [[1, 0], [0, 1]]
    doc["grid"]["steps"] = 5
    res = run_sweep(doc)
    assert len(res.rows) == 5
    assert all(r[1] is None and r[2] == "ZERO_SIGNAL" for r in res.rows)
    assert render(res).splitlines()[1].endswith(",NA,ZERO_SIGNAL")
    assert json.loads(render(res, "json"))["records"][0]["variance"] is None


def test_ratios_and_sensor_columns():
    res = run_sweep(presets.get("fig7"))
    assert res.columns == ("theta", "s0", "s1", "status")
    assert np.nanmax(res.values("s1")) == pytest.approx(36.0, abs=1e-3)
    res = run_sweep(presets.get("fig6a"))
    P = pt.PtParams(2.0, 3.0, HALF_PI)
    for t, v, _ in res.rows[::100]:
        assert v == pytest.approx(pt.sensor_expectation(P, t), abs=1e-12)


def test_custom_matrix_and_condition_residual():
    doc = {"model": "custom-matrix", "quantity": "condition_residual",
           "matrix": [[1, "0.5-1j"], [0.3, [0, -1]]],
           "initial_state": {"vector": [1, 1]},
           "measurement": [[0, 1], [1, 0]],
           "grid": {"min": 0, "max": 1, "steps": 4}}
    res = run_sweep(doc)
    assert [r[2] for r in res.rows] == ["ok"] * 4
    assert all(r[1] >= 0 for r in res.rows)


def test_param_grid_over_m():
    res = run_sweep({"model": "pt", "quantity": "qfi", "params": {"r": 0.25, "s": 1.0},
                     "theta": 0.3, "grid": {"name": "m", "min": 0.0, "max": 2.0, "steps": 5}})
    P = pt.PtParams(0.25, 1.0, HALF_PI)
    for m, v, _ in res.rows:
        assert v == pytest.approx(pt.qfi_closed_unbroken(P, m, 0.0, 0.3), abs=1e-12)


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d["grid"].update(steps=1), "grid.steps"),
    (lambda d: d["grid"].update(max=d["grid"]["min"]), "degenerate"),
    (lambda d: d.update(model="qubit"), "model"),
    (lambda d: d.update(quantity="entropy"), "quantity"),
    (lambda d: d["params"].pop("s"), "params"),
    (lambda d: d["params"].update(s="x"), "params.s"),
    (lambda d: d.update(bogus=1), "unknown field"),
    (lambda d: d["grid"].update(name="zeta"), "grid.name"),
    (lambda d: d.update(measurement=[[0, 1], [0, 0]]), "measurement"),
    (lambda d: d.update(matrix=[[1, 0], [0, 1]]), "matrix"),
    (lambda d: d["initial_state"].update(basis="sideways"), "initial_state.basis"),
])
def test_spec_validation(mutate, field):
    doc = presets.get("fig1a")
    mutate(doc)
    with pytest.raises(SpecError) as exc:
        spec_from_dict(doc)
    assert field in str(exc.value)


def test_pt_only_quantities_rejected_for_bosonic():
    doc = presets.get("bosonic")
    doc["quantity"] = "ratios"
    with pytest.raises(SpecError):
        spec_from_dict(doc)


def test_determinism_csv_and_json():
    a = run_cli("sweep", "--preset", "fig3c", "--format", "json")
    b = run_cli("sweep", "--preset", "fig3c", "--format", "json")
    assert a == b and a[0] == 0
    doc = json.loads(a[1])
    assert doc["metadata"]["spec"]["initial_state"]["m"] == 1.2
    assert len(doc["records"]) == 1001


def test_csv_format():
    code, text = run_cli("sweep", "--preset", "fig1a", "--theta-steps", "3", "--theta-max", "2")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "theta,qfi,status"
    assert lines[1] == "0,2.25,ok"
    val = float(lines[2].split(",")[1])
    assert val == pytest.approx(pt.qfi_closed_unbroken(pt.PtParams(0.25, 1, HALF_PI), 1, 0, 1.0), rel=1e-11)
    assert len(lines[2].split(",")[1].replace(".", "").lstrip("0")) <= 12


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "spec.json"
    cfg.write_text(json.dumps({"model": "pt", "quantity": "k_theta",
                               "params": {"r": 0.25, "s": 1.0},
                               "grid": {"min": 0, "max": 1, "steps": 3}}))
    code, text = run_cli("sweep", "--config", str(cfg), "--s", "2.0", "--format", "json")
    assert code == 0
    doc = json.loads(text)
    assert doc["metadata"]["spec"]["params"]["s"] == 2.0
    assert doc["metadata"]["spec"]["quantity"] == "k_theta"
    # preset < config < flags
    code, text = run_cli("sweep", "--preset", "fig1a", "--config", str(cfg), "--quantity", "qfi",
                         "--format", "json")
    doc = json.loads(text)["metadata"]["spec"]
    assert doc["quantity"] == "qfi" and doc["grid"]["steps"] == 3


def test_out_file(tmp_path):
    path = tmp_path / "o.csv"
    code, text = run_cli("sweep", "--preset", "fig6b", "--out", str(path))
    assert code == 0 and text == ""
    assert path.read_text().startswith("theta,qfi,status\n")


def test_param_flags():
    code, text = run_cli("sweep", "--model", "pt", "--r", "2", "--s", "1.5", "--theta", "0",
                         "--param", "s", "--param-min", "1.9", "--param-max", "2.1", "--param-steps", "3",
                         "--basis", "eigen")
    assert code == 0
    rows = text.splitlines()[1:]
    # the middle point is the EP and has no eigenbasis and no fallback vector
    assert rows[1] == "2,NA,EP_COALESCENCE"


def test_spec_error_exit_codes(capsys):
    assert run_cli("sweep", "--preset", "fig1a", "--theta-min", "1", "--theta-max", "1")[0] == 2
    assert run_cli("sweep", "--preset", "nope")[0] == 2
    assert run_cli("sweep", "--config", "/nonexistent/spec.json")[0] == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--format", "xml"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 2


def test_validate_passes():
    code, text = run_cli("validate")
    assert code == 0
    assert "all checks passed" in text
    for golden in ("6.25", "16", "4", "36", "bosonic QFI at theta = 0"):
        assert golden in text


def test_validate_catches_corrupted_closed_form(monkeypatch):
    real = pt.qfi_closed_unbroken
    monkeypatch.setattr(pt, "qfi_closed_unbroken", lambda *a: real(*a) * (1 + 1e-6))
    code, text = run_cli("validate")
    assert code == 1
    assert "FAIL  unbroken closed form vs engine" in text


def test_channel_qfi_command():
    code, text = run_cli("channel-qfi", "--r", "0.25", "--s", "1")
    doc = json.loads(text)
    assert code == 0
    assert doc["closed_form"] == 6.25 and abs(doc["numeric"] - 6.25) <= 1e-4
    code, text = run_cli("channel-qfi", "--r", "2", "--s", "2")
    assert code == 0 and json.loads(text)["closed_form"] == 0.0


def test_regime_command():
    code, text = run_cli("regime", "--r", "2", "--s", "2")
    doc = json.loads(text)
    assert code == 0 and doc["regime"] == "exceptional-point" and len(doc["eigenvectors"]) == 1
    code, text = run_cli("regime", "--r", "1", "--s", "0.25")
    doc = json.loads(text)
    assert doc["regime"] == "broken" and doc["nu"] == pytest.approx(0.9375)
    assert doc["eigenvalues"][0] == pytest.approx([0.0, math.sqrt(0.9375)], abs=1e-12)


def test_presets_listing():
    code, text = run_cli("presets")
    assert code == 0
    for name in ("fig1a", "fig2a", "fig3d", "fig5-phi-pi", "fig6a", "fig7"):
        assert name in text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nhqfi", "regime", "--r", "0.25", "--s", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["regime"] == "unbroken"
