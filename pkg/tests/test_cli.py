import json

import pytest

from hpasim.cli import main

SMALL_CONFIG = """\
version: 1
load:
  total_duration: 60
  ramp_duration: 30
  peak_users: 60
  spawn_rate: 2.0
services:
  - name: web
    cpu_request: 100
    cpu_limit: 200
    base_demand: 40
    per_user_demand: 1.0
  - name: db
    cpu_request: 200
    cpu_limit: 300
    base_demand: 10
    per_user_demand: 0.0
scenarios:
  max_replicas: [2]
  cpu_thresholds: [50]
"""


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "scenario.yaml"
    path.write_text(SMALL_CONFIG)
    return path


def test_run_single_autoscaler(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(config_path), "--autoscaler", "smart", "--out", str(out)]) == 0
    run_dir = out / "runs" / "2R-50%" / "smart"
    assert (run_dir / "events.csv").exists()
    report = json.loads((run_dir / "report.json").read_text())
    assert report["scenario"] == "2R-50%"
    assert report["autoscaler"] == "smart"
    assert set(report["metrics"]) == {
        "supply_cpu",
        "cpu_overutilization",
        "overutilization_time",
        "cpu_overprovision",
        "overprovision_time",
        "cpu_underprovision",
        "underprovision_time",
    }
    assert "1 runs" in capsys.readouterr().out


def test_run_both_writes_comparison(config_path, tmp_path):
    out = tmp_path / "out"
    assert main(["run", str(config_path), "--out", str(out)]) == 0
    assert (out / "runs" / "2R-50%" / "smart" / "report.json").exists()
    assert (out / "runs" / "2R-50%" / "baseline" / "report.json").exists()
    assert (out / "comparison.csv").exists()
    assert (out / "comparison.txt").exists()
    lines = (out / "comparison.csv").read_text().splitlines()
    assert lines[0] == "scenario,metric,smart,baseline,ratio_smart_over_baseline,direction"
    assert len(lines) == 1 + 7  # one scenario, seven metrics


def test_run_malformed_config_exits_2_without_outputs(tmp_path, capsys):
    config = tmp_path / "bad.yaml"
    config.write_text("load: {total_durations: 900}\n")
    out = tmp_path / "out"
    assert main(["run", str(config), "--out", str(out)]) == 2
    assert not out.exists()
    assert "config error" in capsys.readouterr().err


def test_run_missing_config_exits_2(tmp_path):
    assert main(["run", str(tmp_path / "nope.yaml"), "--out", str(tmp_path / "o")]) == 2


def test_run_determinism_same_seed(config_path, tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["run", str(config_path), "--out", str(out1), "--seed", "3"])
    main(["run", str(config_path), "--out", str(out2), "--seed", "3"])
    for rel in [
        "runs/2R-50%/smart/events.csv",
        "runs/2R-50%/baseline/events.csv",
        "runs/2R-50%/smart/report.json",
    ]:
        assert (out1 / rel).read_bytes() == (out2 / rel).read_bytes()


def test_compare_identical_reports_all_ratios_one(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", str(config_path), "--out", str(out)])
    smart_report = out / "runs" / "2R-50%" / "smart" / "report.json"
    base_report = out / "runs" / "2R-50%" / "baseline" / "report.json"
    payload = json.loads(smart_report.read_text())
    payload["autoscaler"] = "baseline"
    base_report.write_text(json.dumps(payload))
    assert main(["compare", str(out)]) == 0
    csv_lines = (out / "comparison.csv").read_text().splitlines()[1:]
    assert all(line.split(",")[4] in ("1.00", "inf") for line in csv_lines)
    assert all(
        line.split(",")[4] == "1.00" for line in csv_lines if line.split(",")[3] != "0.00"
    )


def test_compare_missing_baseline_fails(config_path, tmp_path, capsys):
    out = tmp_path / "out"
    main(["run", str(config_path), "--autoscaler", "smart", "--out", str(out)])
    assert main(["compare", str(out)]) == 1
    assert "mismatched scenario sets" in capsys.readouterr().err


def test_compare_empty_dir_fails(tmp_path):
    assert main(["compare", str(tmp_path)]) == 1


def test_plot_writes_data_and_image(config_path, tmp_path):
    out = tmp_path / "out"
    main(["run", str(config_path), "--autoscaler", "smart", "--out", str(out)])
    events = out / "runs" / "2R-50%" / "smart" / "events.csv"
    plot_dir = tmp_path / "plots"
    assert main(["plot", str(events), "--kind", "capacity", "--out", str(plot_dir)]) == 0
    assert main(["plot", str(events), "--kind", "utilization", "--out", str(plot_dir)]) == 0
    dat = (plot_dir / "plot_capacity.dat").read_text().splitlines()
    assert dat[0].startswith("# time\t")
    assert "db:demand" in dat[0] and "web:capacity" in dat[0]
    assert len(dat) == 1 + 60
    assert (plot_dir / "plot_capacity.svg").exists()
    assert (plot_dir / "plot_utilization.svg").exists()


def test_capacity_curves_follow_published_shape(tmp_path):
    """With resource exchange the frontend capacity rises past its initial
    500m once demand crosses it; the clamped baseline stays flat."""
    config = tmp_path / "five_fifty.yaml"
    config.write_text("scenarios: {max_replicas: [5], cpu_thresholds: [50]}\n")
    out = tmp_path / "out"
    assert main(["run", str(config), "--out", str(out)]) == 0

    def capacity_series(autoscaler):
        events = out / "runs" / "5R-50%" / autoscaler / "events.csv"
        plot_dir = tmp_path / f"plots_{autoscaler}"
        assert main(["plot", str(events), "--kind", "capacity", "--out", str(plot_dir)]) == 0
        lines = (plot_dir / "plot_capacity.dat").read_text().splitlines()
        header = lines[0][2:].split("\t")
        col = header.index("frontend:capacity")
        return [float(line.split("\t")[col]) for line in lines[1:]]

    smart = capacity_series("smart")
    assert smart[0] == 500.0
    assert max(smart) > 500.0
    baseline = capacity_series("baseline")
    assert set(baseline) == {500.0}


def test_plot_empty_csv_fails(tmp_path, capsys):
    empty = tmp_path / "events.csv"
    empty.write_text("")
    assert main(["plot", str(empty), "--kind", "capacity"]) == 1


def test_plot_unknown_schema_fails(tmp_path):
    bad = tmp_path / "events.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    assert main(["plot", str(bad), "--kind", "capacity"]) == 1
