"""Evaluation metrics computed from a snapshot series.

Definitions, fixed here and used everywhere:

* CPU demand of a service is its (unclamped) desired replica count times the
  per-replica request; CPU capacity is the current capacity bound times the
  request.  Demand is deliberately pre-clamp so a shortage is visible even
  while replicas are pinned at the bound.
* ``cpu_underprovision`` / ``cpu_overprovision`` are time-averages of the
  summed per-service shortfall / slack in millicores.
* ``underprovision_time`` covers samples where at least one service's demand
  exceeds its capacity; ``overprovision_time`` is the rest of the run, so the
  two always partition the run exactly.
* ``cpu_overutilization`` is the mean utilization over all (sample, service)
  pairs whose utilization exceeds the threshold, or 0 when there are none;
  the aggregation choice matters when comparing across runs, so it is pinned
  here rather than left to reporting code.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .simulate import ClusterSnapshot

METRIC_NAMES = [
    "supply_cpu",
    "cpu_overutilization",
    "overutilization_time",
    "cpu_overprovision",
    "overprovision_time",
    "cpu_underprovision",
    "underprovision_time",
]

# Metrics where a larger value is the desirable direction.
HIGHER_IS_BETTER = {"supply_cpu", "overprovision_time"}


@dataclass(frozen=True)
class ScenarioReport:
    supply_cpu: float
    cpu_overutilization: float
    overutilization_time: float
    cpu_overprovision: float
    overprovision_time: float
    cpu_underprovision: float
    underprovision_time: float
    per_service: dict[str, dict[str, float]]

    def metric(self, name: str) -> float:
        if name not in METRIC_NAMES:
            raise KeyError(name)
        return getattr(self, name)

    def to_dict(self) -> dict:
        return {
            "metrics": {name: round(self.metric(name), 2) for name in METRIC_NAMES},
            "per_service": {
                svc: {k: round(v, 2) for k, v in values.items()}
                for svc, values in self.per_service.items()
            },
        }


def compute_report(snapshots: list[ClusterSnapshot]) -> ScenarioReport:
    if not snapshots:
        raise ValueError("cannot compute a report from an empty snapshot series")

    names = list(snapshots[0].rows.keys())
    n = len(snapshots)
    dt = snapshots[1].time - snapshots[0].time if n > 1 else 1

    supply = np.empty((len(names), n))
    demand = np.empty((len(names), n))
    capacity = np.empty((len(names), n))
    cmv = np.empty((len(names), n))
    tmv = np.empty(len(names))
    for i, name in enumerate(names):
        tmv[i] = snapshots[0].rows[name].tmv
        for j, snap in enumerate(snapshots):
            row = snap.rows[name]
            supply[i, j] = row.supply
            demand[i, j] = row.demand
            capacity[i, j] = row.capacity
            cmv[i, j] = row.cmv

    shortfall = np.maximum(0.0, demand - capacity)
    slack = np.maximum(0.0, capacity - demand)
    hot = cmv > tmv[:, None]

    total_minutes = n * dt / 60.0
    under_minutes = float(np.count_nonzero(shortfall.any(axis=0))) * dt / 60.0
    report = ScenarioReport(
        supply_cpu=float(supply.sum(axis=0).mean()),
        cpu_overutilization=float(cmv[hot].mean()) if hot.any() else 0.0,
        overutilization_time=float(np.count_nonzero(hot.any(axis=0))) * dt / 60.0,
        cpu_overprovision=float(slack.sum(axis=0).mean()),
        overprovision_time=total_minutes - under_minutes,
        cpu_underprovision=float(shortfall.sum(axis=0).mean()),
        underprovision_time=under_minutes,
        per_service={
            name: _service_metrics(i, name, supply, shortfall, slack, cmv, hot, dt, total_minutes)
            for i, name in enumerate(names)
        },
    )
    return report


def _service_metrics(i, name, supply, shortfall, slack, cmv, hot, dt, total_minutes):
    hot_i = hot[i]
    under_minutes = float(np.count_nonzero(shortfall[i] > 0)) * dt / 60.0
    return {
        "supply_cpu": float(supply[i].mean()),
        "cpu_overutilization": float(cmv[i][hot_i].mean()) if hot_i.any() else 0.0,
        "overutilization_time": float(np.count_nonzero(hot_i)) * dt / 60.0,
        "cpu_overprovision": float(slack[i].mean()),
        "overprovision_time": total_minutes - under_minutes,
        "cpu_underprovision": float(shortfall[i].mean()),
        "underprovision_time": under_minutes,
    }
