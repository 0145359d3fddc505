import random

import pytest

from hpasim.core import ScaleAction
from hpasim.metrics import compute_report
from hpasim.simulate import ClusterSnapshot, SnapshotRow


def row(demand, capacity, supply=100, cmv=0.0, tmv=50.0):
    return SnapshotRow(
        cmv=cmv,
        cr=1,
        dr=demand // 100 if demand else 0,
        max_r=capacity // 100 if capacity else 0,
        sd=ScaleAction.NONE,
        res_sd=ScaleAction.NONE,
        res_dr=1,
        supply=supply,
        demand=demand,
        capacity=capacity,
        tmv=tmv,
    )


def series(per_service_samples):
    """per_service_samples: {name: [row, ...]} with equal lengths."""
    n = len(next(iter(per_service_samples.values())))
    return [
        ClusterSnapshot(time=t, rows={name: rows[t] for name, rows in per_service_samples.items()})
        for t in range(n)
    ]


def test_two_sample_hand_oracle():
    """(700 demand, 500 cap) then (500, 500): shortfall averages to 100m and
    half the run counts as underprovisioned."""
    snaps = series({"svc": [row(700, 500), row(500, 500)]})
    report = compute_report(snaps)
    assert report.cpu_underprovision == pytest.approx(100.0)
    assert report.underprovision_time == pytest.approx(1 / 60)
    assert report.overprovision_time == pytest.approx(1 / 60)
    assert report.underprovision_time == pytest.approx(report.overprovision_time)


def test_all_slacks_zero():
    snaps = series({"svc": [row(500, 500, cmv=10.0)] * 4})
    report = compute_report(snaps)
    assert report.cpu_underprovision == 0.0
    assert report.cpu_overprovision == 0.0
    assert report.overutilization_time == 0.0
    assert report.cpu_overutilization == 0.0


def test_supply_is_time_average():
    snaps = series({"svc": [row(0, 0, supply=100), row(0, 0, supply=300)]})
    assert compute_report(snaps).supply_cpu == pytest.approx(200.0)


def test_overutilization_mean_over_hot_samples():
    snaps = series(
        {
            "a": [row(0, 100, cmv=80.0), row(0, 100, cmv=40.0)],
            "b": [row(0, 100, cmv=90.0), row(0, 100, cmv=10.0)],
        }
    )
    report = compute_report(snaps)
    assert report.cpu_overutilization == pytest.approx((80 + 90) / 2)
    assert report.overutilization_time == pytest.approx(1 / 60)


def test_empty_series_rejected():
    with pytest.raises(ValueError):
        compute_report([])


def test_partition_invariant():
    rng = random.Random(3)
    samples = [row(rng.choice([400, 600]), 500) for _ in range(50)]
    report = compute_report(series({"svc": samples}))
    assert report.overprovision_time + report.underprovision_time == pytest.approx(50 / 60)


def test_scale_invariance():
    base = {"a": [row(700, 500, supply=200), row(300, 500, supply=100)]}
    scaled = {
        "a": [
            row(1400, 1000, supply=400),
            row(600, 1000, supply=200),
        ]
    }
    r1 = compute_report(series(base))
    r2 = compute_report(series(scaled))
    assert r2.cpu_underprovision == pytest.approx(2 * r1.cpu_underprovision)
    assert r2.cpu_overprovision == pytest.approx(2 * r1.cpu_overprovision)
    assert r2.supply_cpu == pytest.approx(2 * r1.supply_cpu)
    assert r2.underprovision_time == pytest.approx(r1.underprovision_time)
    assert r2.overutilization_time == pytest.approx(r1.overutilization_time)


def test_permutation_invariance():
    rows_a = [row(700, 500), row(400, 500)]
    rows_b = [row(100, 300, cmv=60.0), row(200, 300)]
    fwd = compute_report(series({"a": rows_a, "b": rows_b}))
    rev = compute_report(series({"b": rows_b, "a": rows_a}))
    for name in (
        "supply_cpu",
        "cpu_overutilization",
        "overutilization_time",
        "cpu_overprovision",
        "overprovision_time",
        "cpu_underprovision",
        "underprovision_time",
    ):
        assert fwd.metric(name) == pytest.approx(rev.metric(name))


def test_neutral_service_changes_no_time_metric():
    busy = {"a": [row(700, 500, cmv=80.0), row(400, 500, cmv=20.0)]}
    with_neutral = dict(busy)
    with_neutral["zzz"] = [row(100, 100, cmv=10.0), row(100, 100, cmv=10.0)]
    r1 = compute_report(series(busy))
    r2 = compute_report(series(with_neutral))
    assert r1.underprovision_time == r2.underprovision_time
    assert r1.overprovision_time == r2.overprovision_time
    assert r1.overutilization_time == r2.overutilization_time


def test_per_service_breakdown():
    snaps = series(
        {
            "hot": [row(700, 500, cmv=90.0), row(700, 500, cmv=90.0)],
            "cold": [row(100, 500, cmv=5.0), row(100, 500, cmv=5.0)],
        }
    )
    report = compute_report(snaps)
    assert report.per_service["hot"]["cpu_underprovision"] == pytest.approx(200.0)
    assert report.per_service["hot"]["underprovision_time"] == pytest.approx(2 / 60)
    assert report.per_service["cold"]["cpu_underprovision"] == 0.0
    assert report.per_service["cold"]["cpu_overprovision"] == pytest.approx(400.0)


def test_report_rounding_in_to_dict():
    snaps = series({"svc": [row(700, 500), row(500, 500), row(500, 500)]})
    payload = compute_report(snaps).to_dict()
    assert payload["metrics"]["cpu_underprovision"] == round(200 / 3, 2)
