"""Tests for the experiment harness: config parsing, preset validation,
run_preset row contracts, sweep reduction, the CLI subcommands, and CSV
reproducibility (byte-identical modulo the timestamp comment line).
"""

import numpy as np
import pytest

import eigenflow.presets as presets_mod
from eigenflow import (
    ExperimentConfig,
    ValidationError,
    load_config,
    parse_config_text,
    run_preset,
    sweep_report,
)
from eigenflow.cli import main as cli_main
from eigenflow.config import PRESET_NAMES
from eigenflow.presets import ResultRow, default_config, resolve_config, validate_config

TINY_WIGNER = """\
# smallest useful wigner run
preset = wigner
n_list = 4, 8
replica_count = 3
base_seed = 11
dt = 0.02
t_grid = 0.0, 0.1
"""


def _write_cfg(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def _read_rows(path):
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# timestamp=")
    assert lines[1] == "preset,n,replica,t,stat,value"
    return lines[2:]


# ---------------------------------------------------------------------------
# config parsing


def test_parse_config_roundtrip():
    cfg = parse_config_text(
        """
        # full wishart experiment
        preset = wishart
        alpha = 2.5
        n_list = 25, 50
        replica_count = 20
        base_seed = 2024
        dt = 0.001
        t_grid = 0.0, 0.25, 0.5, 0.75, 1.0  # inline comment
        threads = 2
        """
    )
    assert cfg.preset == "wishart"
    assert cfg.alpha == 2.5
    assert cfg.n_list == (25, 50)
    assert cfg.replica_count == 20
    assert cfg.base_seed == 2024
    assert cfg.t_grid == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert cfg.threads == 2


def test_parse_config_unknown_key_reports_line():
    with pytest.raises(ValidationError, match="line 3.*frobnicate"):
        parse_config_text("preset = wigner\n# fine\nfrobnicate = 1\n")


def test_parse_config_duplicate_key_reports_line():
    with pytest.raises(ValidationError, match="line 3.*duplicate.*'dt'"):
        parse_config_text("preset = wigner\ndt = 0.01\ndt = 0.02\n")


def test_parse_config_bad_value_reports_line():
    with pytest.raises(ValidationError, match="line 2.*'dt'"):
        parse_config_text("preset = wigner\ndt = smallish\n")


def test_parse_config_requires_preset():
    with pytest.raises(ValidationError, match="preset"):
        parse_config_text("dt = 0.01\n")


def test_parse_config_missing_equals():
    with pytest.raises(ValidationError, match="line 1"):
        parse_config_text("just some words\n")


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ValidationError, match="not found"):
        load_config(tmp_path / "nope.cfg")


def test_experiment_config_validation():
    with pytest.raises(ValidationError, match="unknown preset"):
        ExperimentConfig(preset="circular")
    with pytest.raises(ValidationError, match="ascending"):
        ExperimentConfig(preset="wigner", n_list=(50, 25))
    with pytest.raises(ValidationError, match="start at 0"):
        ExperimentConfig(preset="wigner", t_grid=(0.5, 1.0))
    with pytest.raises(ValidationError, match="dt"):
        ExperimentConfig(preset="wigner", dt=-1e-3)
    with pytest.raises(ValidationError, match="replica_count"):
        ExperimentConfig(preset="wigner", replica_count=0)


# ---------------------------------------------------------------------------
# preset validation


def test_wishart_drift_inequality_message():
    cfg = ExperimentConfig(preset="wishart", alpha=1.5, n_list=(50,))
    with pytest.raises(ValidationError) as err:
        validate_config(cfg)
    msg = str(err.value)
    assert "alpha*n" in msg and "75" in msg and "100" in msg
    assert "n=50" in msg


def test_wishart_validation_precedes_simulation(monkeypatch):
    calls = []
    monkeypatch.setattr(
        presets_mod, "simulate_ensemble", lambda *a, **k: calls.append(1)
    )
    cfg = ExperimentConfig(preset="wishart", alpha=1.5, n_list=(50,))
    with pytest.raises(ValidationError):
        run_preset(cfg)
    assert calls == []


def test_wishart_default_alpha_passes():
    validate_config(default_config("wishart"))


def test_jacobi_containment_validation():
    cfg = ExperimentConfig(preset="jacobi", p=0.5, q=0.5, a=0.5, n_list=(100,))
    with pytest.raises(ValidationError, match="min"):
        validate_config(cfg)


def test_nonunique_alpha_range():
    with pytest.raises(ValidationError, match="alpha"):
        validate_config(ExperimentConfig(preset="wishart_nonunique", alpha=1.0))


def test_custom_requires_coefficients():
    with pytest.raises(ValidationError, match="g2"):
        validate_config(ExperimentConfig(preset="custom"))


def test_default_config_fills_parameters():
    cfg = default_config("wishart")
    assert cfg.alpha == 2.5
    assert default_config("wishart_nonunique").n_list == (100,)
    assert resolve_config(ExperimentConfig(preset="geometric")).a == 1.0
    with pytest.raises(ValidationError):
        default_config("bogus")


# ---------------------------------------------------------------------------
# run_preset row contract


def test_run_preset_row_shapes():
    cfg = parse_config_text(TINY_WIGNER)
    rows = run_preset(cfg)
    # per n: 3 replicas x (8 moments x 2 times + w1/ks x 2 times + 4
    # residuals + min/max eig) + 8 ensemble moments x 2 times
    per_n = 3 * (16 + 4 + 4 + 2) + 16
    assert len(rows) == 2 * per_n
    for n in (4, 8):
        m2 = [r for r in rows if r.n == n and r.stat == "m2" and r.t == 0.1]
        reps = sorted(r.replica for r in m2)
        assert reps == ["0", "1", "2", "ens"]
        path_vals = [r.value for r in m2 if r.replica != "ens"]
        ens_val = next(r.value for r in m2 if r.replica == "ens")
        assert np.isclose(ens_val, np.mean(path_vals), atol=1e-12)
    # residuals and extrema are reported at the final grid time only
    assert all(
        r.t == 0.1 for r in rows if r.stat.startswith("residual_") or r.stat.endswith("_eig")
    )


def test_run_preset_nonunique_reports_negative_mass():
    cfg = ExperimentConfig(
        preset="wishart_nonunique",
        alpha=0.5,
        n_list=(8,),
        replica_count=2,
        dt=0.02,
        t_grid=(0.0, 0.1),
        base_seed=3,
    )
    rows = run_preset(cfg)
    neg = [r for r in rows if r.stat == "neg_mass"]
    assert len(neg) == 4  # 2 replicas x 2 grid times
    assert all(0.0 <= r.value <= 1.0 for r in neg)


def test_run_preset_moments_only_law_has_no_distance_rows():
    cfg = ExperimentConfig(
        preset="geometric", n_list=(6,), replica_count=2, dt=0.02,
        t_grid=(0.0, 0.1), base_seed=5,
    )
    rows = run_preset(cfg)
    assert not [r for r in rows if r.stat in ("w1", "ks")]
    assert [r for r in rows if r.stat == "m1"]


# ---------------------------------------------------------------------------
# sweep reduction


def test_sweep_recovers_synthetic_decay_slope():
    rows = []
    for n in (25, 50, 100, 200):
        for r in range(10):
            value = 2.0 / np.sqrt(n) * (1.0 + 0.01 * np.sin(3.0 * r + n))
            rows.append(ResultRow("wigner", n, str(r), 1.0, "w1", value))
    line = sweep_report(rows, stats=("w1",))["w1"]
    assert abs(line.slope - (-0.5)) <= 0.05
    assert line.monotone_decreasing
    assert line.n_values == (25, 50, 100, 200)


def test_sweep_flat_table_has_zero_slope():
    rows = []
    for n in (25, 50, 100, 200):
        for r in range(10):
            value = 0.3 + 5e-4 * ((n + 3 * r) % 7)
            rows.append(ResultRow("wigner", n, str(r), 1.0, "w1", value))
    line = sweep_report(rows, stats=("w1",))["w1"]
    assert abs(line.slope) <= 0.05
    assert not line.monotone_decreasing


def test_sweep_uses_latest_time_only():
    rows = [
        ResultRow("wigner", 25, "0", 0.5, "w1", 9.0),
        ResultRow("wigner", 25, "0", 1.0, "w1", 1.0),
        ResultRow("wigner", 50, "0", 1.0, "w1", 0.5),
    ]
    line = sweep_report(rows, stats=("w1",))["w1"]
    assert line.medians == (1.0, 0.5)


def test_sweep_needs_two_sizes():
    rows = [ResultRow("wigner", 25, "0", 1.0, "w1", 1.0)]
    with pytest.raises(ValidationError, match="2 distinct n"):
        sweep_report(rows, stats=("w1",))
    with pytest.raises(ValidationError):
        sweep_report([])


# ---------------------------------------------------------------------------
# CLI behaviour


def test_cli_presets_lists_everything(capsys):
    assert cli_main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in PRESET_NAMES:
        assert name in out


def test_cli_simulate_writes_csv(tmp_path):
    cfg = _write_cfg(tmp_path, TINY_WIGNER)
    assert cli_main(["simulate", "--config", cfg, "--out", str(tmp_path / "out")]) == 0
    rows = _read_rows(tmp_path / "out" / "simulate.csv")
    assert len(rows) == 2 * (3 * 26 + 16)
    assert rows[0].startswith("wigner,4,0,0,m1,")


def test_cli_simulate_csv_reproducible(tmp_path):
    cfg = _write_cfg(tmp_path, TINY_WIGNER)
    assert cli_main(["simulate", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert cli_main(["simulate", "--config", cfg, "--out", str(tmp_path / "b")]) == 0
    assert _read_rows(tmp_path / "a" / "simulate.csv") == _read_rows(
        tmp_path / "b" / "simulate.csv"
    )


def test_cli_simulate_thread_count_invariant(tmp_path):
    cfg = _write_cfg(tmp_path, TINY_WIGNER)
    assert cli_main(
        ["simulate", "--config", cfg, "--out", str(tmp_path / "t1"), "--threads", "1"]
    ) == 0
    assert cli_main(
        ["simulate", "--config", cfg, "--out", str(tmp_path / "t8"), "--threads", "8"]
    ) == 0
    assert _read_rows(tmp_path / "t1" / "simulate.csv") == _read_rows(
        tmp_path / "t8" / "simulate.csv"
    )


def test_cli_seed_override_changes_rows(tmp_path):
    cfg = _write_cfg(tmp_path, TINY_WIGNER)
    cli_main(["simulate", "--config", cfg, "--out", str(tmp_path / "s1")])
    cli_main(["simulate", "--config", cfg, "--out", str(tmp_path / "s2"), "--seed", "99"])
    assert _read_rows(tmp_path / "s1" / "simulate.csv") != _read_rows(
        tmp_path / "s2" / "simulate.csv"
    )


def test_cli_validation_failure_exit_code(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "preset = wishart\nalpha = 1.5\nn_list = 50\n")
    assert cli_main(["simulate", "--config", cfg]) == 2
    err = capsys.readouterr().err
    assert err.startswith("validation error:")
    assert "alpha*n" in err


def test_cli_missing_config_exit_code(tmp_path, capsys):
    assert cli_main(["simulate"]) == 2
    assert "requires --config" in capsys.readouterr().err
    assert cli_main(["simulate", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_cli_moments_subcommand(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "preset = geometric\nt_grid = 0.0, 1.0\n")
    assert cli_main(["moments", "--config", cfg, "--out", str(tmp_path / "m")]) == 0
    out = capsys.readouterr().out
    assert "m1" in out
    rows = _read_rows(tmp_path / "m" / "moments.csv")
    law_rows = [r for r in rows if r.split(",")[2] == "law"]
    assert law_rows and all(r.split(",")[1] == "0" for r in law_rows)


def test_cli_moments_rejects_lawless_preset(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "preset = custom\ng2 = 0.25\nh2 = 1.0\n")
    assert cli_main(["moments", "--config", cfg]) == 2
    assert "no limit law" in capsys.readouterr().err


def test_cli_compare_subcommand(tmp_path):
    cfg = _write_cfg(tmp_path, TINY_WIGNER)
    out = tmp_path / "cmp"
    assert cli_main(["compare", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "compare.csv").is_file()
    assert (out / "wigner_n4_w1_vs_t.dat").is_file()
    assert (out / "wigner_n8_w1_vs_t.dat").is_file()


def test_cli_sweep_subcommand(tmp_path):
    cfg = _write_cfg(tmp_path, TINY_WIGNER)
    out = tmp_path / "sw"
    assert cli_main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "sweep.csv").is_file()
    assert (out / "sweep_w1.dat").is_file()
    assert (out / "sweep_ks.dat").is_file()


def test_cli_invert_subcommand(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "preset = free_bm\nt_grid = 0.0, 0.5\n")
    out = tmp_path / "inv"
    assert cli_main(["invert", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "invert.csv").is_file()
    assert (out / "invert_density.dat").is_file()
    assert "sup |recovered - exact|" in capsys.readouterr().out


def test_cli_invert_rejects_moments_only_law(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, "preset = geometric\n")
    assert cli_main(["invert", "--config", cfg]) == 2
    assert "validation error" in capsys.readouterr().err


def test_cli_residual_subcommand(tmp_path, capsys):
    cfg = _write_cfg(
        tmp_path, "preset = wishart\nn_list = 4, 8\nt_grid = 0.0, 0.5, 1.0\n"
    )
    out = tmp_path / "res"
    assert cli_main(["residual", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "residual.csv").is_file()
    printed = capsys.readouterr().out
    assert "residual (f = x^1)" in printed
