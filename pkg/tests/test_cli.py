import json

import numpy as np
import pytest

from spectral_granger import MultichannelSeries, simulate_var
from spectral_granger.cli import main
from spectral_granger.fixtures import get_fixture
from spectral_granger.io import read_series_csv, write_series_csv

PAIR_CONFIG = """
[analysis]
lags = 1, 2

[groups]
y_to_x = x <- y
x_to_y = y <- x
"""


@pytest.fixture
def config(tmp_path):
    p = tmp_path / "pair.ini"
    p.write_text(PAIR_CONFIG)
    return p


@pytest.fixture
def white_csv(tmp_path):
    rng = np.random.Generator(np.random.PCG64(2024))
    p = tmp_path / "white.csv"
    write_series_csv(p, MultichannelSeries(rng.standard_normal((2, 2**15)), ("x", "y")))
    return p


@pytest.fixture
def var_csv(tmp_path):
    p = tmp_path / "var.csv"
    write_series_csv(p, simulate_var(get_fixture("var1"), 2**15, 5, ("x", "y")))
    return p


def analyze(csv, config, out):
    code = main(["analyze", "--input", str(csv), "--config", str(config), "--output", str(out)])
    return code, json.loads(out.read_text()) if out.exists() else None


def indices(report, name):
    g = next(g for g in report["groupings"] if g["name"] == name)
    return {ix["lag"]: ix for ix in g["indices"]}


def test_analyze_white_noise(white_csv, config, tmp_path):
    code, report = analyze(white_csv, config, tmp_path / "r.json")
    assert code == 0
    for name in ("y_to_x", "x_to_y"):
        ix = indices(report, name)
        assert set(ix) == {1, 2}
        assert all(abs(v["log_index"]) < 0.05 for v in ix.values())


def test_analyze_coupled_var(var_csv, config, tmp_path):
    code, report = analyze(var_csv, config, tmp_path / "r.json")
    assert code == 0
    assert indices(report, "y_to_x")[1]["log_index"] > 0.1
    assert indices(report, "x_to_y")[1]["log_index"] < 0.05
    assert indices(report, "y_to_x")[1]["significant"] is True


def test_report_schema(var_csv, config, tmp_path):
    _, report = analyze(var_csv, config, tmp_path / "r.json")
    assert report["schema_version"] == "1.0"
    assert report["channel_names"] == ["x", "y"] and report["n_samples"] == 2**15
    for key in ("grid_size", "threshold", "estimator", "factorization", "paley_wiener", "groupings"):
        assert key in report
    for g in report["groupings"]:
        for key in ("joint_residual", "marginal_residual", "joint_truncated", "marginal_truncated"):
            assert key in g


def test_default_groups_are_all_pairs(var_csv, tmp_path):
    out = tmp_path / "r.json"
    assert main(["analyze", "--input", str(var_csv), "--output", str(out)]) == 0
    names = [g["name"] for g in json.loads(out.read_text())["groupings"]]
    assert sorted(names) == ["x->y", "y->x"]


def test_deterministic(var_csv, config, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    analyze(var_csv, config, a)
    analyze(var_csv, config, b)
    assert a.read_bytes() == b.read_bytes()


def test_missing_config(var_csv, tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["analyze", "--input", str(var_csv), "--config", str(tmp_path / "none.ini"),
                 "--output", str(out)])
    assert code == 2
    assert not out.exists()
    assert list(tmp_path.iterdir()) == [var_csv]
    assert "error" in capsys.readouterr().err


def test_bad_csv_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.csv"
    p.write_text("x,y\n1,2\n3,oops\n")
    assert main(["analyze", "--input", str(p)]) == 2
    assert "bad.csv:3" in capsys.readouterr().err


def test_unknown_group_channel(var_csv, tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text("[groups]\ng = x <- w\n")
    assert main(["analyze", "--input", str(var_csv), "--config", str(cfg)]) == 2


def test_single_channel_without_groups(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("x\n" + "\n".join(str(v) for v in np.random.default_rng(0).standard_normal(64)) + "\n")
    assert main(["analyze", "--input", str(p), "--grid-size", "64"]) == 2


def test_numerical_failure_exit_code(tmp_path):
    # a constant channel: removing its mean leaves a spectrum that is zero in one direction
    p = tmp_path / "flat.csv"
    x = np.random.default_rng(1).standard_normal(4096)
    p.write_text("x,y\n" + "\n".join(f"{float(v)!r},1.0" for v in x) + "\n")
    assert main(["analyze", "--input", str(p)]) == 3


def test_threshold_and_grid_overrides(var_csv, config, tmp_path):
    out = tmp_path / "r.json"
    code = main(["analyze", "--input", str(var_csv), "--config", str(config), "--output", str(out),
                 "--threshold", "1.0", "--grid-size", "512"])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["threshold"] == 1.0 and report["grid_size"] == 512
    assert indices(report, "y_to_x")[1]["significant"] is False


def test_plot_dir(var_csv, config, tmp_path):
    plots = tmp_path / "plots"
    main(["analyze", "--input", str(var_csv), "--config", str(config), "--output", str(tmp_path / "r.json"),
          "--plot-dir", str(plots)])
    psd = (plots / "psd_magnitude.csv").read_text().splitlines()
    assert psd[0] == "theta,abs_x|x,abs_x|y,abs_y|y" and len(psd) == 1025
    assert (plots / "factor_norms.csv").read_text().startswith("n,y_to_x_joint,y_to_x_marginal")


def test_psd_subcommand(var_csv, tmp_path):
    out = tmp_path / "psd.csv"
    assert main(["psd", "--input", str(var_csv), "--output", str(out), "--grid-size", "256"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].split(",")[:3] == ["theta", "x|x_real", "x|x_imag"]
    assert len(lines) == 257


def test_factorize_subcommand(var_csv, tmp_path):
    out = tmp_path / "f.json"
    assert main(["factorize", "--input", str(var_csv), "--output", str(out)]) == 0
    data = json.loads(out.read_text())
    assert len(data["coefficients"]) == 65
    c0 = np.array(data["coefficients"][0]["real"])
    np.testing.assert_allclose(c0, np.eye(2), atol=0.05)  # innovation factor of the fixture


def test_simulate_subcommand(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["simulate", "--fixture", "ar1", "--length", "100", "--seed", "3", "--output", str(out)]) == 0
    s = read_series_csv(out)
    np.testing.assert_array_equal(s.data, simulate_var(get_fixture("ar1"), 100, 3).data)
    assert main(["simulate", "--fixture", "nope", "--output", str(out)]) == 2


def test_verify_default(capsys):
    assert main(["verify"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[-1] == "48/48 checks passed"


def test_verify_tiny_tolerance(capsys):
    assert main(["verify", "--tolerance", "1e-15"]) == 1
    assert "FAIL" in capsys.readouterr().out


def test_verify_subset(capsys):
    assert main(["verify", "--fixtures", "ar1"]) == 0
    rows = capsys.readouterr().out.strip().splitlines()[1:-1]
    assert rows and all(r.split()[0] == "ar1" for r in rows)
    assert main(["verify", "--fixtures", "unknown"]) == 2
