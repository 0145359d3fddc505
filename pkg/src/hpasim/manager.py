"""Per-microservice manager: desired replicas, violation check, decision.

Each microservice gets an independent manager.  A manager is a pure function
of its own metrics plus one append to the shared knowledge base, so managers
can run in any order (or in parallel) without affecting each other's output.
"""

from __future__ import annotations

import math
from typing import Protocol

from .core import ManagerVerdict, MicroserviceSpec, PodMetrics, ScaleAction, SlaMetrics
from .knowledge import EventKind, KbEvent, KnowledgeBase


class ScalingPolicy(Protocol):
    """Pluggable replica-count policy; must be pure."""

    def desired_replicas(self, pod: PodMetrics, sla: SlaMetrics) -> int: ...


def threshold_desired_replicas(pod: PodMetrics, sla: SlaMetrics) -> int:
    """Desired replicas under the static threshold policy.

    Returns ceil(cr * cmv / tmv).  No clamping to [min_r, max_r] happens
    here: the capacity gate and the exchange tier decide what to do with a
    demand that exceeds capacity, and the baseline autoscaler clamps
    separately.
    """
    if sla.tmv <= 0:
        raise ValueError(f"tmv must be > 0, got {sla.tmv}")
    if pod.cr == 0:
        return 0
    # The ratio is taken first so cmv == tmv yields exactly cr.
    return math.ceil(pod.cr * (pod.cmv / sla.tmv))


class ThresholdPolicy:
    """Default policy: scale proportionally to utilization over threshold."""

    def desired_replicas(self, pod: PodMetrics, sla: SlaMetrics) -> int:
        return threshold_desired_replicas(pod, sla)


def plan_scaling(cr: int, dr: int, min_r: int) -> ScaleAction:
    """Map (current, desired, minimum) replicas to a scaling decision.

    A desired count below min_r is a no-op rather than a clamp up; replica
    floors are the scenario's responsibility (initial replicas start at or
    above min_r and scale-down never goes below it).
    """
    if cr < 0 or dr < 0 or min_r < 0:
        raise ValueError("replica counts must be non-negative")
    if dr > cr:
        return ScaleAction.UP
    if dr < cr and dr >= min_r:
        return ScaleAction.DOWN
    return ScaleAction.NONE


def manage(
    spec: MicroserviceSpec,
    pod: PodMetrics,
    sla: SlaMetrics,
    policy: ScalingPolicy,
    kb: KnowledgeBase | None = None,
    run_id: str = "",
    tick: int = 0,
) -> ManagerVerdict:
    """Run one manager evaluation and record it to the knowledge base.

    The desired count is not clamped to max_r here; returning the raw demand
    is what lets the capacity gate notice that a service wants more than it
    is allowed.
    """
    dr = policy.desired_replicas(pod, sla)
    sd = plan_scaling(pod.cr, dr, sla.min_r)
    if kb is not None:
        kb.append(
            KbEvent(
                tick=tick,
                kind=EventKind.VERDICT,
                run_id=run_id,
                payload={
                    "service": spec.name,
                    "dr": dr,
                    "sd": sd.value,
                    "cmv": round(pod.cmv, 2),
                    "tmv": sla.tmv,
                    "cr": pod.cr,
                    "min_r": sla.min_r,
                    "max_r": sla.max_r,
                },
            )
        )
    return ManagerVerdict(name=spec.name, dr=dr, sd=sd, max_r=sla.max_r)
