import pytest
from yaml import safe_load
from stringstab import __version__
from stringstab.apis.cli_api_v1 import main

PD = "h: 1.0\nK: {num: [4, 1]}\nNs: [4, 8]\ngrid: {min: 1.0e-3, max: 1.0e+2, points_per_decade: 16, refinement_depth: 2}\n"


@pytest.fixture
def pd_config(tmp_path):
    path = tmp_path / "pd.yaml"
    path.write_text(PD, encoding="utf-8")
    return path


def test_headway_report(pd_config, tmp_path, capsys):
    assert main(["headway", "--config", str(pd_config), "--out", str(tmp_path), "-q"]) == 0
    report = safe_load((tmp_path / "headway.yaml").read_text(encoding="utf-8"))
    assert report["headway"][0]["h_min"] == pytest.approx(0.70711, abs=1e-3)
    assert report["headway"][0]["method"] == "pd_shortcut"
    assert "h_min" in capsys.readouterr().out


def test_sweep_is_deterministic(pd_config, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    for out in (first, second):
        assert main(["sweep-n", "--config", str(pd_config), "--out", str(out), "-q"]) == 0
    text = (first / "gain_vs_n.csv").read_bytes()
    assert text == (second / "gain_vs_n.csv").read_bytes()
    lines = text.decode("utf-8").split("\n")
    assert lines[0].startswith(f"# stringstab {__version__} config_sha256=")
    assert lines[1] == "N,def1_gain,def2_gain,peak_omega,def1_per_sqrtN"
    assert b"\r" not in text


def test_analyze_writes_json(pd_config, tmp_path):
    assert main(["analyze", "--config", str(pd_config), "--out", str(tmp_path), "--json", "-q"]) == 0
    report = safe_load((tmp_path / "analyze.json").read_text(encoding="utf-8"))
    assert report["kind"] == "headway" and report["stable"] is True
    assert report["warnings"] == []
    assert (tmp_path / "gain_vs_n.csv").exists()


def test_bode_report(tmp_path):
    path = tmp_path / "bode.yaml"
    path.write_text("K: {num: [1, 2]}\n", encoding="utf-8")
    assert main(["bode", "--config", str(path), "--out", str(tmp_path), "-q"]) == 0
    report = safe_load((tmp_path / "bode.yaml").read_text(encoding="utf-8"))
    assert abs(report["bode"]["integral_value"]) < 1e-3


def test_simulate_writes_trace(tmp_path):
    path = tmp_path / "sim.yaml"
    path.write_text(
        PD + "sim: {dt: 0.01, horizon: 10}\ndisturbances: [{kind: sine, target: 0, omega0: 1.0, duration: 5}]\n",
        encoding="utf-8",
    )
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path), "--N", "3", "-q"]) == 0
    header = (tmp_path / "trace.csv").read_text(encoding="utf-8").split("\n")[1].split(",")
    assert header[0] == "t" and "e_3" in header
    summary = safe_load((tmp_path / "simulate.yaml").read_text(encoding="utf-8"))
    assert summary["empirical_gain"] <= 1.05 * summary["def1_gain"]


def test_invalid_config_exit_code(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("K: {num: [0, 1]}\n", encoding="utf-8")
    assert main(["analyze", "--config", str(path), "-q"]) == 2
    assert "K(0) != 0" in capsys.readouterr().err
    path.write_text("K: {num: [4, 1]}\nh: -1\n", encoding="utf-8")
    assert main(["analyze", "--config", str(path), "-q"]) == 2
    assert main(["analyze", "--config", str(tmp_path / "missing.yaml"), "-q"]) == 2


def test_numeric_failure_exit_code(tmp_path, capsys):
    path = tmp_path / "stiff.yaml"
    path.write_text("h: 0\nK: {num: [400, 40]}\nNs: [2]\nsim: {dt: 0.1, horizon: 1}\n", encoding="utf-8")
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path), "-q"]) == 3
    assert "use dt <=" in capsys.readouterr().err


def test_demo_prints_verdict(tmp_path, capsys):
    assert main(["demo-theorem", "1", "--out", str(tmp_path), "-q"]) == 0
    assert capsys.readouterr().out.startswith("PASS theorem 1")
    assert (tmp_path / "demo_theorem1.csv").exists()


def test_unknown_demo_is_a_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["demo-theorem", "9"])
    assert info.value.code == 2


def test_demo_rejects_unused_grid_flags(tmp_path, capsys):
    assert main(["demo-theorem", "1", "--grid-min", "0.01", "--out", str(tmp_path), "-q"]) == 2
    assert "demo 1 takes no grid option" in capsys.readouterr().err
    assert not (tmp_path / "demo_theorem1.csv").exists()


def test_unwritable_output_is_not_a_config_error(pd_config, tmp_path, capsys):
    blocker = tmp_path / "taken"
    blocker.write_text("", encoding="utf-8")
    assert main(["headway", "--config", str(pd_config), "--out", str(blocker), "-q"]) == 1
    assert capsys.readouterr().err.startswith("output error:")
