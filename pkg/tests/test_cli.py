import json
import math

import pytest

from steklov_excision import ConfigError, parse_config
from steklov_excision.cli import main, resolve_threads, run

SPECTRUM = {
    "command": "spectrum",
    "m": 4,
    "n": 1,
    "eps": 0.01,
    "delta": 1.0,
    "base": {"kind": "circle", "length": 6.2831853},
    "outer_bc": "neumann",
    "k_max": 5,
    "j_max": 5,
}


def test_parse_spectrum_example():
    cfg = parse_config(json.dumps(SPECTRUM))
    assert cfg.command == "spectrum" and cfg.problem(cfg.eps).codim == 3


def test_codimension_one_rejected():
    with pytest.raises(ConfigError, match=r"n <= m-2"):
        parse_config(json.dumps({**SPECTRUM, "n": 3}))


def test_unknown_keys_and_paths():
    with pytest.raises(ConfigError, match=r"spectrum\.colour"):
        parse_config(json.dumps({**SPECTRUM, "colour": 1}))
    with pytest.raises(ConfigError, match=r"spectrum\.base\.circle\.length"):
        parse_config(json.dumps({**SPECTRUM, "base": {"kind": "circle"}}))
    with pytest.raises(ConfigError, match="malformed"):
        parse_config("{")
    with pytest.raises(ConfigError, match="command"):
        parse_config(json.dumps({"command": "plot"}))


def test_base_dimension_mismatch():
    with pytest.raises(ConfigError, match="dimension"):
        parse_config(json.dumps({**SPECTRUM, "n": 2, "m": 5}))


def test_torus_example():
    cfg = parse_config('{"command":"torus","eps":0.25,"k_max":8}')
    result = run(cfg)
    assert result.status == 0 and "torus.csv" in result.artifacts


def write_config(tmp_path, payload):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(payload))
    return str(path)


def test_spectrum_run_and_determinism(tmp_path):
    cfg = write_config(tmp_path, {**SPECTRUM, "audit": True})
    assert main(["--config", cfg, "--out", str(tmp_path / "a_")]) == 0
    assert main(["--config", cfg, "--out", str(tmp_path / "b_"), "--threads", "3"]) == 0
    for name in ("spectrum.csv", "spectrum.json"):
        assert (tmp_path / f"a_{name}").read_bytes() == (tmp_path / f"b_{name}").read_bytes()
    row = (tmp_path / "a_spectrum.csv").read_text().splitlines()[1].split(",")
    assert row[:3] == ["0", "0", "0"]


def test_sweep_exact_residuals(tmp_path):
    cfg = write_config(
        tmp_path,
        {
            "command": "sweep",
            "m": 3,
            "n": 1,
            "base": {"kind": "circle", "length": 2 * math.pi},
            "k": 0,
            "j": 0,
            "eps_list": [1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
        },
    )
    assert main(["--config", cfg, "--out", str(tmp_path / "s_")]) == 0
    lines = (tmp_path / "s_sweep.csv").read_text().splitlines()[1:]
    assert all(abs(float(line.split(",")[-1])) <= 1e-12 for line in lines)
    fit = json.loads((tmp_path / "s_fit.json").read_text())
    assert fit["convergence_exponent"] is None and fit["flags"]


def test_modes_with_oracle(tmp_path):
    cfg = write_config(
        tmp_path,
        {"command": "modes", "m": 5, "n": 2, "eps": 0.05, "base": {"kind": "round_sphere", "dim": 2}, "k_max": 2,
         "j_max": 2, "oracle": True},
    )
    assert main(["--config", cfg, "--out", str(tmp_path / "m_")]) == 0
    rows = [line.split(",") for line in (tmp_path / "m_modes.csv").read_text().splitlines()[1:]]
    assert len(rows) == 9
    assert all(abs(float(r[5]) - float(r[6])) <= 1e-8 * float(r[5]) for r in rows)


def test_custom_spectrum_from_file(tmp_path):
    spec_file = tmp_path / "lams.json"
    spec_file.write_text("[[0, 1], [2, 3], [6, 5]]")
    cfg = write_config(
        tmp_path,
        {**SPECTRUM, "m": 5, "n": 2, "base": {"kind": "custom", "spectrum": str(spec_file), "volume": 4 * math.pi}},
    )
    assert main(["--config", cfg, "--out", str(tmp_path / "c_")]) == 0


def test_point_and_gap(tmp_path):
    cfg = write_config(tmp_path, {"command": "point", "m": 3, "eps": 1e-5, "k_max": 4})
    assert main(["--config", cfg, "--out", str(tmp_path / "p_")]) == 0
    cfg = write_config(
        tmp_path,
        {"command": "gap", "m": 5, "n": 2, "base": {"kind": "round_sphere", "dim": 2}, "eps_list": [1e-2, 1e-3, 1e-4]},
    )
    assert main(["--config", cfg, "--out", str(tmp_path / "g_")]) == 0
    assert json.loads((tmp_path / "g_gap.json").read_text())["slope"] == pytest.approx(-0.5, abs=0.02)


def test_verify_small_grid(tmp_path):
    cfg = write_config(tmp_path, {"command": "verify", "pairs": [[4, 1], [3, 0]], "k_max": 2, "j_max": 2})
    assert main(["--config", cfg, "--out", str(tmp_path / "v_")]) == 0
    summary = json.loads((tmp_path / "v_verify.json").read_text())
    assert summary["max_relative_deviation"] <= 1e-8
    assert all(b["checked"] == 50 and not b["violations"] for b in summary["bracketing"])


def test_failed_audit_exits_nonzero(tmp_path):
    cfg = write_config(tmp_path, {"command": "verify", "pairs": [[4, 1]], "k_max": 1, "j_max": 1, "tolerance": 1e-30,
                                  "bracketing": False})
    assert main(["--config", cfg, "--out", str(tmp_path / "f_")]) == 1


def test_solver_error_leaves_no_outputs(tmp_path, monkeypatch):
    import steklov_excision.cli as cli
    from steklov_excision.errors import AuditError

    def boom(*args):
        raise AuditError("dual path disagrees")

    monkeypatch.setattr(cli, "point_excision_check", boom)
    cfg = write_config(tmp_path, {"command": "point", "m": 3, "eps": 1e-3, "k_max": 2})
    assert main(["--config", cfg, "--out", str(tmp_path / "x_")]) == 1
    assert not list(tmp_path.glob("x_*"))


def test_partial_writes_are_removed(tmp_path, monkeypatch):
    import steklov_excision.cli as cli

    real_open = open
    calls = []

    def flaky(path, *args, **kwargs):
        calls.append(path)
        if len(calls) == 2:
            raise OSError("disk full")
        return real_open(path, *args, **kwargs)

    monkeypatch.setattr("builtins.open", flaky)
    with pytest.raises(OSError):
        cli.write_artifacts(str(tmp_path / "w_"), {"a.csv": "x\n", "b.csv": "y\n"})
    monkeypatch.undo()
    assert not list(tmp_path.glob("w_*"))


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, {**SPECTRUM, "n": 3})
    assert main(["--config", cfg]) == 2
    assert "n <= m-2" in capsys.readouterr().err


def test_thread_resolution(monkeypatch):
    monkeypatch.delenv("STEKLOV_THREADS", raising=False)
    assert resolve_threads(None) == 1
    assert resolve_threads(None, 3) == 3
    assert resolve_threads(0) >= 1
    monkeypatch.setenv("STEKLOV_THREADS", "5")
    assert resolve_threads(None, 3) == 5
    assert resolve_threads(2, 3) == 2
    monkeypatch.setenv("STEKLOV_THREADS", "many")
    with pytest.raises(ConfigError):
        resolve_threads(None)
