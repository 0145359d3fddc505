"""Feasibility gate between the per-service managers and the exchange tier.

If every service's desired replica count fits inside its capacity bound the
verdicts pass straight through as plans and the centralized exchange stays
idle.  A single service over its bound escalates the whole application
snapshot, because the balancer needs the global picture of residuals.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import ManagerVerdict, ResourcePlan


@dataclass(frozen=True)
class AllFeasible:
    """Every verdict fits; plans mirror the verdicts one to one."""

    plans: tuple[ResourcePlan, ...]


@dataclass(frozen=True)
class Infeasible:
    """At least one service wants more than its capacity; escalate all."""

    verdicts: tuple[ManagerVerdict, ...]


FeasibilityOutcome = AllFeasible | Infeasible


def analyze(verdicts: list[ManagerVerdict]) -> FeasibilityOutcome:
    seen = set()
    for v in verdicts:
        if v.name in seen:
            raise ValueError(f"duplicate microservice name {v.name!r}")
        seen.add(v.name)

    if all(v.dr <= v.max_r for v in verdicts):
        plans = tuple(
            ResourcePlan(name=v.name, res_sd=v.sd, res_dr=v.dr, updated_max_r=v.max_r)
            for v in verdicts
        )
        return AllFeasible(plans)
    return Infeasible(tuple(verdicts))
