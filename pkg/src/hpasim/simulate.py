"""Deterministic discrete-time model of the benchmark application.

One tick is one second.  Every tick the simulator derives the user count
from the load profile, per-service CPU demand from the affine demand model,
and per-replica utilization from the current replica counts.  Every
``reconcile_period`` ticks the selected autoscaler runs and its plans are
applied: scale-downs take effect immediately, scale-ups become ready after
the startup delay, and capacity bounds are updated in place.  Snapshots are
emitted every ``sample_period`` ticks; desired replicas and decisions hold
their last reconciled value between evaluations.

Everything is a pure function of the scenario, so two runs of the same
scenario produce byte-identical event streams.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field, replace

from .baseline import BaselineAutoscaler
from .capacity import AllFeasible, analyze
from .core import (
    ManagerVerdict,
    MicroserviceSpec,
    MilliCPU,
    PodMetrics,
    ResourcePlan,
    ScaleAction,
    SlaMetrics,
)
from .exchange import ResourceExchanger
from .knowledge import EventKind, KbEvent, KnowledgeBase
from .manager import ThresholdPolicy, manage

log = logging.getLogger(__name__)

SMART = "smart"
BASELINE = "baseline"
AUTOSCALERS = (SMART, BASELINE)


@dataclass(frozen=True)
class LoadProfile:
    """Ramp to a sustained plateau of concurrent users."""

    total_duration: int = 900
    ramp_duration: int = 300
    peak_users: int = 600
    spawn_rate: float = 2.0

    def __post_init__(self):
        if self.ramp_duration > self.total_duration:
            raise ValueError("ramp_duration must not exceed total_duration")
        if self.peak_users > self.spawn_rate * self.ramp_duration:
            raise ValueError("peak_users must be reachable within the ramp")


def users_at(profile: LoadProfile, t: int) -> int:
    if not 0 <= t <= profile.total_duration:
        raise ValueError(f"t={t} outside [0, {profile.total_duration}]")
    if t < profile.ramp_duration:
        return min(profile.peak_users, math.floor(t * profile.spawn_rate))
    return profile.peak_users


@dataclass(frozen=True)
class ServiceDemand:
    base: MilliCPU
    per_user: float

    def __post_init__(self):
        if self.base < 0 or self.per_user < 0:
            raise ValueError("demand coefficients must be non-negative")


@dataclass(frozen=True)
class DemandModel:
    per_service: dict[str, ServiceDemand]


def service_demand(model: DemandModel, service: str, users: int) -> MilliCPU:
    if users < 0:
        raise ValueError("users must be non-negative")
    coeffs = model.per_service[service]
    return int(round(coeffs.base + coeffs.per_user * users))


def utilization(demand: MilliCPU, cr: int, spec: MicroserviceSpec) -> float:
    """Percent CPU utilization of the request, capped at the limit."""
    if cr == 0:
        if demand > 0:
            log.warning("%s: demand %dm with zero replicas; reporting 0%%", spec.name, demand)
        return 0.0
    per_replica = min(demand / cr, spec.cpu_limit)
    return 100.0 * per_replica / spec.cpu_request


@dataclass(frozen=True)
class SimFlags:
    strict_conservation: bool = False
    apply_res_dr_on_noscale: bool = False
    reset_max_r_each_tick: bool = False


@dataclass(frozen=True)
class Scenario:
    """Everything one run needs: the app, its SLAs, the load, and the knobs."""

    scenario_id: str
    services: tuple[MicroserviceSpec, ...]
    slas: dict[str, SlaMetrics]
    demand: DemandModel
    load: LoadProfile
    initial_replicas: dict[str, int]
    reconcile_period: int = 15
    sample_period: int = 1
    startup_delay: int = 0
    smoothing_window: int = 1
    flags: SimFlags = field(default_factory=SimFlags)
    baseline_tolerance: float = 0.0
    baseline_stabilization: int = 0

    def validate(self) -> None:
        names = [s.name for s in self.services]
        if len(set(names)) != len(names):
            raise ValueError("duplicate service names in scenario")
        if not self.services:
            raise ValueError("scenario needs at least one service")
        if self.reconcile_period < 1 or self.sample_period < 1:
            raise ValueError("reconcile_period and sample_period must be >= 1")
        if self.startup_delay < 0:
            raise ValueError("startup_delay must be >= 0")
        if self.smoothing_window < 1:
            raise ValueError("smoothing_window must be >= 1")
        for spec in self.services:
            if spec.name not in self.slas:
                raise ValueError(f"missing SLA for {spec.name}")
            if spec.name not in self.demand.per_service:
                raise ValueError(f"missing demand coefficients for {spec.name}")
            sla = self.slas[spec.name]
            cr0 = self.initial_replicas.get(spec.name, sla.min_r)
            if cr0 < sla.min_r:
                raise ValueError(
                    f"{spec.name}: initial replicas {cr0} below min_r {sla.min_r}; "
                    "replicas would be stuck under the floor"
                )
            if cr0 > sla.max_r:
                raise ValueError(f"{spec.name}: initial replicas {cr0} above max_r {sla.max_r}")


@dataclass
class ServiceState:
    spec: MicroserviceSpec
    sla: SlaMetrics
    cr: int
    max_r: int
    pending: list[int] = field(default_factory=list)


@dataclass
class ClusterState:
    time: int
    services: dict[str, ServiceState]


@dataclass(frozen=True)
class SnapshotRow:
    cmv: float
    cr: int
    dr: int
    max_r: int
    sd: ScaleAction
    res_sd: ScaleAction
    res_dr: int
    supply: MilliCPU
    demand: MilliCPU
    capacity: MilliCPU
    tmv: float


@dataclass(frozen=True)
class ClusterSnapshot:
    time: int
    rows: dict[str, SnapshotRow]


def initial_state(scenario: Scenario) -> ClusterState:
    services = {}
    for spec in scenario.services:
        sla = scenario.slas[spec.name]
        cr0 = scenario.initial_replicas.get(spec.name, sla.min_r)
        services[spec.name] = ServiceState(spec=spec, sla=sla, cr=cr0, max_r=sla.max_r)
    return ClusterState(time=0, services=services)


def admit_ready(state: ClusterState, t: int) -> None:
    """Move pending replicas whose startup finished into the running count."""
    for svc in state.services.values():
        ready = [r for r in svc.pending if r <= t]
        if ready:
            svc.cr += len(ready)
            svc.pending = [r for r in svc.pending if r > t]


def apply_plans(
    state: ClusterState,
    plans: list[ResourcePlan],
    startup_delay: int = 0,
    apply_res_dr_on_noscale: bool = False,
) -> ClusterState:
    """Execute plans against the cluster.

    Scale-ups are scheduled and join the running count one tick later (plus
    the startup delay); scale-downs land immediately and cancel anything
    still pending.  A no-op leaves replicas alone unless the executor is
    configured to chase res_dr on no-ops.  The capacity bound is updated to
    the plan's value, floored at min_r so the SLA range stays well-formed
    (the floor only matters when a service's desired count drops below its
    replica floor, which the default demand model never produces).
    """
    for plan in plans:
        if plan.name not in state.services:
            raise KeyError(f"plan for unknown service {plan.name!r}")
        svc = state.services[plan.name]
        action = plan.res_sd
        target = plan.res_dr
        new_max_r = max(plan.updated_max_r, svc.sla.min_r)
        if action is ScaleAction.NONE:
            target = max(target, svc.sla.min_r)
            if not apply_res_dr_on_noscale or target == svc.cr:
                svc.max_r = new_max_r
                continue
            action = ScaleAction.UP if target > svc.cr else ScaleAction.DOWN
        if action is ScaleAction.UP:
            missing = target - svc.cr - len(svc.pending)
            if missing > 0:
                ready_at = state.time + 1 + startup_delay
                svc.pending.extend([ready_at] * missing)
        elif action is ScaleAction.DOWN:
            svc.cr = target
            svc.pending.clear()
        svc.max_r = new_max_r
    return state


@dataclass
class _LastDecision:
    dr: int
    sd: ScaleAction
    res_sd: ScaleAction
    res_dr: int


def run_scenario(
    scenario: Scenario,
    autoscaler: str,
    kb: KnowledgeBase | None = None,
    run_id: str | None = None,
    seed: int = 0,
    exchanger: ResourceExchanger | None = None,
) -> list[ClusterSnapshot]:
    """Simulate one (scenario, autoscaler) run and return its snapshot series.

    The seed is recorded for provenance only; the default demand model has no
    stochastic components, so runs are deterministic regardless.
    """
    if autoscaler not in AUTOSCALERS:
        raise ValueError(f"autoscaler must be one of {AUTOSCALERS}, got {autoscaler!r}")
    scenario.validate()

    run_id = run_id or f"{scenario.scenario_id}/{autoscaler}"
    if kb is not None:
        kb.register_run(run_id)

    state = initial_state(scenario)
    policy = ThresholdPolicy()
    if exchanger is None:
        exchanger = ResourceExchanger(
            strict_conservation=scenario.flags.strict_conservation, kb=kb, run_id=run_id
        )
    else:
        exchanger.kb = kb
        exchanger.run_id = run_id
    baseline = BaselineAutoscaler(
        tolerance=scenario.baseline_tolerance,
        scale_down_stabilization=scenario.baseline_stabilization,
    )

    window = scenario.smoothing_window
    history: dict[str, deque] = {
        s.name: deque(maxlen=window) for s in scenario.services
    }
    last: dict[str, _LastDecision] = {
        s.name: _LastDecision(
            dr=state.services[s.name].cr,
            sd=ScaleAction.NONE,
            res_sd=ScaleAction.NONE,
            res_dr=state.services[s.name].cr,
        )
        for s in scenario.services
    }

    snapshots: list[ClusterSnapshot] = []
    for t in range(scenario.load.total_duration):
        state.time = t
        admit_ready(state, t)
        users = users_at(scenario.load, t)

        demands: dict[str, MilliCPU] = {}
        cmvs: dict[str, float] = {}
        for spec in scenario.services:
            svc = state.services[spec.name]
            demands[spec.name] = service_demand(scenario.demand, spec.name, users)
            raw = utilization(demands[spec.name], svc.cr, spec)
            history[spec.name].append(raw)
            cmvs[spec.name] = (
                raw if window == 1 else sum(history[spec.name]) / len(history[spec.name])
            )

        if t % scenario.reconcile_period == 0:
            if scenario.flags.reset_max_r_each_tick:
                for svc in state.services.values():
                    svc.max_r = svc.sla.max_r
            plans = _reconcile(
                scenario, state, autoscaler, cmvs, policy, exchanger, baseline, kb, run_id, t, last
            )
            if kb is not None:
                for plan in plans:
                    kb.append(
                        KbEvent(
                            tick=t,
                            kind=EventKind.PLAN,
                            run_id=run_id,
                            payload={
                                "service": plan.name,
                                "res_sd": plan.res_sd.value,
                                "res_dr": plan.res_dr,
                                "max_r": plan.updated_max_r,
                            },
                        )
                    )
            apply_plans(
                state,
                plans,
                startup_delay=scenario.startup_delay,
                apply_res_dr_on_noscale=scenario.flags.apply_res_dr_on_noscale,
            )

        if t % scenario.sample_period == 0:
            snapshot = _snapshot(scenario, state, cmvs, last, t)
            snapshots.append(snapshot)
            if kb is not None:
                for name, row in snapshot.rows.items():
                    kb.append(
                        KbEvent(
                            tick=t,
                            kind=EventKind.SNAPSHOT,
                            run_id=run_id,
                            payload={
                                "time": t,
                                "service": name,
                                "cmv": round(row.cmv, 2),
                                "cr": row.cr,
                                "dr": row.dr,
                                "max_r": row.max_r,
                                "sd": row.sd.value,
                                "res_sd": row.res_sd.value,
                                "res_dr": row.res_dr,
                                "supply": row.supply,
                                "demand": row.demand,
                                "capacity": row.capacity,
                            },
                        )
                    )

    if kb is not None:
        kb.close_run(run_id)
    return snapshots


def _reconcile(
    scenario: Scenario,
    state: ClusterState,
    autoscaler: str,
    cmvs: dict[str, float],
    policy: ThresholdPolicy,
    exchanger: ResourceExchanger,
    baseline: BaselineAutoscaler,
    kb: KnowledgeBase | None,
    run_id: str,
    t: int,
    last: dict[str, _LastDecision],
) -> list[ResourcePlan]:
    specs = {s.name: s for s in scenario.services}
    if autoscaler == SMART:
        verdicts: list[ManagerVerdict] = []
        for spec in scenario.services:
            svc = state.services[spec.name]
            pod = PodMetrics(cmv=cmvs[spec.name], cr=svc.cr)
            sla = replace(svc.sla, max_r=svc.max_r)
            verdicts.append(manage(spec, pod, sla, policy, kb, run_id, t))
        outcome = analyze(verdicts)
        if isinstance(outcome, AllFeasible):
            plans = list(outcome.plans)
        else:
            plans = exchanger.run(list(outcome.verdicts), specs, t)
        for v in verdicts:
            last[v.name].dr = v.dr
            last[v.name].sd = v.sd
        for p in plans:
            last[p.name].res_sd = p.res_sd
            last[p.name].res_dr = p.res_dr
        return plans

    plans = []
    for spec in scenario.services:
        svc = state.services[spec.name]
        pod = PodMetrics(cmv=cmvs[spec.name], cr=svc.cr)
        sla = replace(svc.sla, max_r=svc.max_r)
        raw_dr = policy.desired_replicas(pod, sla)
        plan = baseline.plan(spec.name, pod, sla, t)
        plans.append(plan)
        last[spec.name].dr = raw_dr
        last[spec.name].sd = plan.res_sd
        last[spec.name].res_sd = plan.res_sd
        last[spec.name].res_dr = plan.res_dr
    return plans


def _snapshot(
    scenario: Scenario,
    state: ClusterState,
    cmvs: dict[str, float],
    last: dict[str, _LastDecision],
    t: int,
) -> ClusterSnapshot:
    rows = {}
    for spec in scenario.services:
        svc = state.services[spec.name]
        decision = last[spec.name]
        rows[spec.name] = SnapshotRow(
            cmv=cmvs[spec.name],
            cr=svc.cr,
            dr=decision.dr,
            max_r=svc.max_r,
            sd=decision.sd,
            res_sd=decision.res_sd,
            res_dr=decision.res_dr,
            supply=svc.cr * spec.cpu_request,
            demand=decision.dr * spec.cpu_request,
            capacity=svc.max_r * spec.cpu_request,
            tmv=svc.sla.tmv,
        )
    return ClusterSnapshot(time=t, rows=rows)
