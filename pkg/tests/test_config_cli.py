"""Tests for config parsing/validation and the command-line interface."""

import json
import textwrap

import numpy as np
import pytest

from gifsqueeze.cli import main
from gifsqueeze.config import ConfigError, load_config


def test_defaults_load_and_resolve():
    cfg = load_config()
    assert cfg.kind == "multimode-gif"
    resolved = cfg.resolved()
    assert resolved["run"]["rtol"] == 1e-11
    assert resolved["models"]["signal_cutoffs"] == [12, 8]
    json.dumps(resolved)  # must be JSON-serializable


def test_unknown_section_and_key_rejected(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[nosuch]\nx = 1\n")
    with pytest.raises(ConfigError):
        load_config(str(bad))
    bad.write_text("[run]\nnosuchkey = 1\n")
    with pytest.raises(ConfigError):
        load_config(str(bad))


def test_overrides_and_validation():
    cfg = load_config(overrides=["run.t_final=0.4", "grid.m=16",
                                 "models.signal_cutoffs=10,6"])
    assert cfg["run"]["t_final"] == 0.4
    assert cfg["grid"]["m"] == 16
    assert cfg["models"]["signal_cutoffs"] == (10, 6)
    with pytest.raises(ConfigError):
        load_config(overrides=["not-an-override"])
    with pytest.raises(ConfigError):
        load_config(overrides=["run.kind=bogus"])
    with pytest.raises(ConfigError):
        load_config(overrides=["loss.transmissivity=1.5"])
    with pytest.raises(ConfigError):
        load_config(overrides=["models.m_fh=3"])  # cutoff lists now mismatch


def test_sample_times_are_uniform_and_exclude_zero():
    cfg = load_config(overrides=["run.t_final=1.0", "run.sample_count=4"])
    assert cfg.sample_times() == (0.25, 0.5, 0.75, 1.0)


def test_presets_all_load():
    for name in ("fig2", "fig3", "fig5", "fig7"):
        code = main(["--preset", name, "--set", "run.kind=units",
                     "--out", f"/tmp/_preset_probe_{name}"])
        assert code == 0


def test_config_file_roundtrip(tmp_path):
    path = tmp_path / "run.ini"
    path.write_text(textwrap.dedent("""\
        [run]
        kind = single
        t_final = 0.2
        sample_count = 2
        [single]
        delta = -0.25
        lab_cutoffs = 20, 10
        gif_cutoffs = 20, 10
    """))
    cfg = load_config(str(path))
    assert cfg.kind == "single"
    assert cfg["single"]["delta"] == -0.25


def test_cli_exit_codes(tmp_path):
    assert main(["--set", "run.kind=bogus"]) == 2
    assert main(["--preset", "nope"]) == 2
    assert main(["--jobs", "0"]) == 2
    # numerical failure: oracle with pump cutoffs too small for the amplitude
    code = main(["--out", str(tmp_path / "x"),
                 "--set", "run.kind=oracle", "--set", "grid.m=1",
                 "--set", "pump.n_sh0=4", "--set", "pump.min_coverage=0.5",
                 "--set", "oracle.signal_cutoffs=4",
                 "--set", "oracle.pump_cutoffs=3",
                 "--set", "run.t_final=0.1", "--set", "run.sample_count=1"])
    assert code == 3


def test_cli_single_run_outputs(tmp_path):
    out = tmp_path / "single"
    code = main(["--out", str(out),
                 "--set", "run.kind=single", "--set", "run.t_final=0.2",
                 "--set", "run.sample_count=2",
                 "--set", "single.lab_cutoffs=20,12",
                 "--set", "single.gif_cutoffs=20,12"])
    assert code == 0
    series = (out / "series.csv").read_text().splitlines()
    header = series[0].split(",")
    assert header[0] == "time"
    assert "r_full" in header and "r_gif" in header
    assert len(series) == 4  # header + t=0 + 2 samples
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["config"]["run"]["t_final"] == 0.2
    assert meta["config"]["single"]["lab_cutoffs"] == [20, 12]
    assert "max_leakage_full" in meta["diagnostics"]


def test_cli_oracle_run_outputs(tmp_path):
    out = tmp_path / "oracle"
    code = main(["--out", str(out),
                 "--set", "run.kind=oracle", "--set", "grid.m=1",
                 "--set", "grid.d2=0", "--set", "pump.n_sh0=1",
                 "--set", "pump.min_coverage=0.5",
                 "--set", "oracle.signal_cutoffs=10",
                 "--set", "oracle.pump_cutoffs=12",
                 "--set", "run.t_final=0.2", "--set", "run.sample_count=2"])
    assert code == 0
    assert (out / "spectral_density.csv").exists()
    rows = (out / "series.csv").read_text().splitlines()
    assert rows[0].split(",")[1] == "r_oracle"


def test_cli_units_writes_table(tmp_path, capsys):
    out = tmp_path / "units"
    assert main(["units", "--out", str(out)]) == 0
    text = (out / "units.txt").read_text()
    assert "L_eff" in text
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["diagnostics"]["l_eff_m"] == pytest.approx(0.01414, rel=1e-2)


def test_cli_multiple_runs_need_distinct_labels(tmp_path):
    args = ["--preset", "fig2", "--preset", "fig2", "--out", str(tmp_path)]
    assert main(args) == 2  # duplicate labels rejected


def test_csv_float_format_is_repr_exact(tmp_path):
    out = tmp_path / "fmt"
    main(["--out", str(out),
          "--set", "run.kind=multimode-gif", "--set", "grid.m=8",
          "--set", "grid.s_max=2", "--set", "pump.n_sh0=2",
          "--set", "pump.min_coverage=0.99",
          "--set", "run.t_final=0.1", "--set", "run.sample_count=1"])
    rows = (out / "series.csv").read_text().splitlines()
    values = [float(v) for v in rows[-1].split(",")]
    # %.17g output must round-trip exactly through float()
    assert ",".join(format(v, ".17g") for v in values) == rows[-1]
