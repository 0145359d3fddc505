"""Reference clamped autoscaler used as the comparison arm.

Same threshold formula as the per-service managers, but the desired count is
clamped into [min_r, max_r] and the capacity bound never moves.  Kubernetes'
scale-down stabilization window and tolerance band exist as knobs but default
to off so the comparison stays policy-for-policy fair.
"""

from __future__ import annotations

from .core import PodMetrics, ResourcePlan, ScaleAction, SlaMetrics
from .manager import threshold_desired_replicas


def baseline_plan(
    name: str, pod: PodMetrics, sla: SlaMetrics, tolerance: float = 0.0
) -> ResourcePlan:
    """One clamped scaling decision; capacity bound is returned unchanged."""
    raw = threshold_desired_replicas(pod, sla)
    if tolerance > 0 and sla.tmv > 0 and abs(pod.cmv / sla.tmv - 1.0) <= tolerance:
        raw = pod.cr
    res_dr = min(max(raw, sla.min_r), sla.max_r)
    if res_dr > pod.cr:
        res_sd = ScaleAction.UP
    elif res_dr < pod.cr:
        res_sd = ScaleAction.DOWN
    else:
        res_sd = ScaleAction.NONE
    return ResourcePlan(name=name, res_sd=res_sd, res_dr=res_dr, updated_max_r=sla.max_r)


class BaselineAutoscaler:
    """Stateful wrapper adding the optional scale-down stabilization window.

    With a window of W seconds, a scale-down only shrinks to the highest
    clamped recommendation seen in the last W seconds; scale-ups act
    immediately.  W = 0 reduces to the plain clamped plan.
    """

    def __init__(self, tolerance: float = 0.0, scale_down_stabilization: int = 0):
        self.tolerance = tolerance
        self.window = scale_down_stabilization
        self._history: dict[str, list[tuple[int, int]]] = {}

    def plan(self, name: str, pod: PodMetrics, sla: SlaMetrics, tick: int = 0) -> ResourcePlan:
        plain = baseline_plan(name, pod, sla, self.tolerance)
        if self.window <= 0:
            return plain
        history = self._history.setdefault(name, [])
        history.append((tick, plain.res_dr))
        self._history[name] = [(t, d) for t, d in history if t > tick - self.window]
        if plain.res_dr >= pod.cr:
            return plain
        floor = max(d for _, d in self._history[name])
        res_dr = min(max(floor, plain.res_dr), pod.cr)
        if res_dr < pod.cr:
            res_sd = ScaleAction.DOWN
        else:
            res_sd = ScaleAction.NONE
        return ResourcePlan(name=name, res_sd=res_sd, res_dr=res_dr, updated_max_r=sla.max_r)
