"""CLI contract: artifacts, determinism, exit codes, golden output."""

import json
import os
from pathlib import Path

import numpy as np
import pytest

from ttspin import lumi
from ttspin.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main

GOLDEN_DIR = Path(__file__).parent / "golden"
GOLDEN_MAP_ARGS = ["map", "--grid-m", "350:500:6", "--grid-theta", "5"]


def run(tmp_path, *argv):
    tmp_path.mkdir(parents=True, exist_ok=True)
    out = tmp_path / "out.dat"
    code = main([*argv, "--out", str(out)])
    return code, out


def read_csv_columns(path):
    header = None
    rows = []
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            continue
        if header is None:
            header = line.split(",")
            continue
        rows.append([float(v) for v in line.split(",")])
    data = np.array(rows)
    return {name: data[:, i] for i, name in enumerate(header)}


def test_map_contract(tmp_path):
    code, out = run(tmp_path, "map", "--grid-m", "350:900:30", "--grid-theta", "15")
    assert code == EXIT_OK
    text = out.read_text()
    assert text.startswith("# ttspin map v1\n")
    assert "# config=" in text and "hash:" in text
    cols = read_csv_columns(out)
    # quark channel entangled everywhere off-axis
    assert np.all(cols["delta_qq"] >= 0.0)
    # gluon channel: zero concurrence exactly inside the critical band
    inside = (cols["beta"] > cols["beta_c1"] + 1e-9) & (cols["beta"] < cols["beta_c2"] - 1e-9)
    outside = (cols["beta"] < cols["beta_c1"] - 1e-9) | (cols["beta"] > cols["beta_c2"] + 1e-9)
    assert np.all(cols["conc_gg"][inside] == 0.0)
    assert np.all(cols["conc_gg"][outside] > 0.0)
    assert np.all(cols["dsigma_dm_dtheta"] >= 0.0)


def test_map_deterministic(tmp_path):
    _, first = run(tmp_path / "a", "map", "--grid-m", "350:600:8", "--grid-theta", "4")
    _, second = run(tmp_path / "b", "map", "--grid-m", "350:600:8", "--grid-theta", "4")
    assert first.read_bytes() == second.read_bytes()


def test_map_golden_bytes(tmp_path):
    """Byte-exact pin of a small map; regenerate with
    scripts/make_goldens.py if the schema version is bumped."""
    code, out = run(tmp_path, *GOLDEN_MAP_ARGS)
    assert code == EXIT_OK
    golden = GOLDEN_DIR / "map_small.csv"
    assert out.read_bytes() == golden.read_bytes()


def test_avg_contract(tmp_path):
    code, out = run(tmp_path, "avg", "--grid-m", "346.2:1200:40")
    assert code == EXIT_OK
    cols = read_csv_columns(out)
    assert np.all(cols["conc_qq"] == 0.0)  # averaged quark state always separable
    assert cols["conc_gg"][0] > 0.99  # threshold singlet
    # weights sum to one up to the 10-digit CSV formatting
    assert np.all(np.abs(cols["w_qq"] + cols["w_gg"] - 1.0) < 1e-9)
    # mixed concurrence dies where the gluon one does (within the grid step)
    assert cols["conc_mixed"][-1] == 0.0


def test_window_contract(tmp_path):
    out_json = tmp_path / "win.json"
    code, out = run(
        tmp_path, "window", "--grid-m", "360:900:12", "--json-out", str(out_json)
    )
    assert code == EXIT_OK
    cols = read_csv_columns(out)
    np.testing.assert_allclose(cols["d"], (2 * cols["c_perp"] + cols["c_z"]) / 3.0, atol=1e-9)
    assert np.all(np.diff(cols["sigma_pb"]) > 0)
    payload = json.loads(out_json.read_text())
    assert payload["schema"] == "ttspin window v1"


def test_window_deterministic(tmp_path):
    _, first = run(tmp_path / "a", "window", "--grid-m", "360:600:5")
    _, second = run(tmp_path / "b", "window", "--grid-m", "360:600:5")
    assert first.read_bytes() == second.read_bytes()


def test_tomo_contract(tmp_path):
    code, out = run(
        tmp_path, "tomo", "--events", "20000", "--seed", "7", "--window-max", "450",
        "--level", "4",
    )
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["provenance"]["seed"] == 7
    assert payload["tomography"]["assumption_level"] == 4
    assert payload["d_estimate"]["value"] < -1.0 / 3.0
    assert abs(payload["d_estimate"]["value"] - payload["d_theory"]) < 5 * payload["d_estimate"]["stderr"]
    # round-trips through its documented schema
    assert set(payload["tomography"]["raw"]) == {"b_plus", "b_minus", "c"}


def test_tomo_deterministic(tmp_path):
    _, first = run(tmp_path / "a", "tomo", "--events", "5000", "--seed", "3")
    _, second = run(tmp_path / "b", "tomo", "--events", "5000", "--seed", "3")
    assert first.read_bytes() == second.read_bytes()


def test_significance_contract(tmp_path):
    code, out = run(
        tmp_path, "significance", "--grid-m", "380:700:9", "--rel-unc", "0.02:0.1:5"
    )
    assert code == EXIT_OK
    cols = read_csv_columns(out)
    m_vals = np.unique(cols["m_max"])
    u_vals = np.unique(cols["rel_unc"])
    grid = cols["n_delta"].reshape(len(m_vals), len(u_vals))
    detected = grid[grid > 0]
    assert detected.size > 0
    # significance falls with rel. uncertainty at fixed cut ...
    for row in grid:
        positive = row[row > 0]
        assert np.all(np.diff(positive) < 0)
    # ... and falls as the window opens past the entangled region
    assert grid[0, 0] > grid[-1, 0]


def test_env_var_table_default(tmp_path, monkeypatch):
    table_copy = tmp_path / "copy.csv"
    table_copy.write_bytes(Path(lumi.bundled_table_path()).read_bytes())
    monkeypatch.setenv("TT_ENT_TABLE", str(table_copy))
    code, out = run(tmp_path, "avg", "--grid-m", "350:400:3")
    assert code == EXIT_OK
    monkeypatch.setenv("TT_ENT_TABLE", str(tmp_path / "missing.csv"))
    code, _ = run(tmp_path, "avg", "--grid-m", "350:400:3")
    assert code == EXIT_DATA


def test_gg_only_flag_changes_window(tmp_path):
    _, mixed = run(tmp_path / "a", "window", "--grid-m", "360:500:4")
    _, gg = run(tmp_path / "b", "window", "--grid-m", "360:500:4", "--gg-only")
    c_mixed = read_csv_columns(mixed)
    c_gg = read_csv_columns(gg)
    assert np.all(c_gg["sigma_pb"] < c_mixed["sigma_pb"])
    assert np.all(c_gg["concurrence"] >= c_mixed["concurrence"])


def test_exit_code_usage(tmp_path):
    assert main(["map", "--out", str(tmp_path / "x.csv"), "--grid-m", "nonsense"]) == EXIT_USAGE
    assert main(["not-a-command"]) == EXIT_USAGE
    assert main([]) == EXIT_USAGE


def test_exit_code_data(tmp_path):
    code = main(["map", "--out", str(tmp_path / "x.csv"), "--table", str(tmp_path / "no.csv")])
    assert code == EXIT_DATA
    bad = tmp_path / "bad.csv"
    bad.write_text("# sqrt_s=13000\n346,1,nope\n")
    assert main(["avg", "--out", str(tmp_path / "y.csv"), "--table", str(bad)]) == EXIT_DATA


def test_exit_code_numeric(tmp_path):
    dead = tmp_path / "dead.csv"
    dead.write_text("# sqrt_s=13000 source=dead\n346,1.0,0.0\n1000,1.0,0.0\n")
    code = main([
        "tomo", "--out", str(tmp_path / "t.json"), "--table", str(dead),
        "--events", "10", "--gg-only",
    ])
    assert code == EXIT_NUMERIC


def test_config_file_and_overrides(tmp_path):
    cfg_file = tmp_path / "phys.cfg"
    cfg_file.write_text("m_t = 173.5\n")
    code, out = run(
        tmp_path, "window", "--grid-m", "350:500:4", "--config", str(cfg_file)
    )
    assert code == EXIT_OK
    assert "m_t=173.5" in out.read_text()
    code, out2 = run(
        tmp_path / "b", "window", "--grid-m", "350:500:4", "--config", str(cfg_file),
        "--m-t", "173.0",
    )
    assert "m_t=173.0" in out2.read_text()
