"""Centralized resource exchange for capacity-constrained applications.

The exchange runs in three stages:

1. *Inspect* partitions services into underprovisioned (desired replicas
   exceed the capacity bound) and overprovisioned (everything else),
   measuring each side's shortfall or slack in millicores.
2. *Balance* pools the overprovisioned slack and walks the underprovisioned
   services from largest shortfall to smallest, granting each one as many
   replicas as the remaining pool covers: all of them, a floored fraction,
   or none.  It then walks the overprovisioned services from smallest slack
   to largest, confirming what each may keep and stripping the rest.
3. *Adapt* turns the balanced (feasible_r, u_max_r) pairs into per-service
   plans: a fully satisfied service keeps its original decision, a partially
   satisfied one becomes a scale-up, and an unsatisfied one becomes a no-op.

Pool bookkeeping follows the as-written heuristics by default: the
overprovision pass deducts the *stripped* amount, which can drive the pool
negative and can let the application's total capacity inflate (a service
whose slack was already promised away may still keep it).  With
``strict_conservation`` the pass deducts the *retained* amount instead, and
a reconcile step afterwards restores stripped capacity (or, when millicore
quantization leaves an unplaceable remainder, revokes grants) until the
total capacity is exactly unchanged.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .core import ManagerVerdict, MicroserviceSpec, MilliCPU, ResourcePlan, ScaleAction
from .knowledge import EventKind, KbEvent, KnowledgeBase

# Floating-point noise within this distance of an integer is clamped before
# flooring, so a pool of 199.99999999 millicores still buys 2 replicas at 100m.
_FLOOR_EPS = 1e-9


class ProvisionKind(enum.Enum):
    UNDER = "under"
    OVER = "over"


@dataclass(frozen=True)
class ProvisionEntry:
    """One service's shortfall (under) or slack (over) in replicas and millicores."""

    name: str
    res_req: MilliCPU
    dr: int
    max_r: int
    delta_r: int
    delta_res: MilliCPU
    kind: ProvisionKind

    def __post_init__(self):
        if self.kind is ProvisionKind.UNDER:
            if self.dr <= self.max_r or self.delta_r != self.dr - self.max_r:
                raise ValueError(f"{self.name}: malformed under entry")
        else:
            if self.dr > self.max_r or self.delta_r != self.max_r - self.dr:
                raise ValueError(f"{self.name}: malformed over entry")
        if self.delta_res != self.delta_r * self.res_req:
            raise ValueError(f"{self.name}: delta_res must equal delta_r * res_req")


@dataclass
class TraceRow:
    """Balancer trace for one service; used_res is |capacity change| * res_req."""

    name: str
    kind: ProvisionKind
    total_r: float
    used_res: MilliCPU
    feasible_r: int
    u_max_r: int


@dataclass
class BalancerState:
    """Pool trajectory and per-service trace of one balancer pass."""

    initial_pool: MilliCPU
    pool_after_under: MilliCPU
    pool: MilliCPU
    rows: list[TraceRow] = field(default_factory=list)


def inspect(
    verdicts: list[ManagerVerdict], specs: dict[str, MicroserviceSpec]
) -> tuple[list[ProvisionEntry], list[ProvisionEntry]]:
    """Partition verdicts into (under, over) provision entries."""
    under: list[ProvisionEntry] = []
    over: list[ProvisionEntry] = []
    for v in verdicts:
        if v.name not in specs:
            raise KeyError(f"no spec for microservice {v.name!r}")
        req = specs[v.name].cpu_request
        if v.dr > v.max_r:
            delta = v.dr - v.max_r
            under.append(
                ProvisionEntry(v.name, req, v.dr, v.max_r, delta, delta * req, ProvisionKind.UNDER)
            )
        else:
            delta = v.max_r - v.dr
            over.append(
                ProvisionEntry(v.name, req, v.dr, v.max_r, delta, delta * req, ProvisionKind.OVER)
            )
    return under, over


def _floored(x: float) -> int:
    nearest = round(x)
    if abs(x - nearest) < _FLOOR_EPS:
        x = nearest
    return int(math.floor(x))


def balance(
    under: list[ProvisionEntry],
    over: list[ProvisionEntry],
    strict_conservation: bool = False,
) -> tuple[BalancerState, dict[str, tuple[int, int]]]:
    """Reallocate pooled slack; returns (state, {name: (feasible_r, u_max_r)}).

    Both iteration orders sort on the millicore amount (shortfall descending,
    slack ascending) with the service name as the deterministic tie-breaker.
    """
    pool: float = sum(e.delta_res for e in over)
    state = BalancerState(initial_pool=int(pool), pool_after_under=0, pool=0)
    result: dict[str, tuple[int, int]] = {}
    entries = {e.name: e for e in under + over}
    if len(entries) != len(under) + len(over):
        raise ValueError("duplicate service names across provision entries")

    under_order = sorted(under, key=lambda e: (-e.delta_res, e.name))
    under_rows: list[TraceRow] = []
    for entry in under_order:
        total_r = pool / entry.res_req
        required_r = entry.delta_r
        if total_r >= required_r:
            feasible = entry.dr
        elif total_r >= 1:
            feasible = _floored(total_r) + entry.max_r
        else:
            feasible = entry.max_r
        used = (feasible - entry.max_r) * entry.res_req
        pool -= used
        row = TraceRow(entry.name, entry.kind, total_r, used, feasible, feasible)
        under_rows.append(row)
        result[entry.name] = (feasible, feasible)
    state.pool_after_under = int(round(pool))

    over_order = sorted(over, key=lambda e: (e.delta_res, e.name))
    over_rows: list[TraceRow] = []
    for entry in over_order:
        total_r = pool / entry.res_req
        residual_r = entry.delta_r
        if total_r >= residual_r:
            u_max = entry.max_r
        elif total_r >= 1:
            u_max = _floored(total_r) + entry.dr
        else:
            u_max = entry.dr
        stripped = (entry.max_r - u_max) * entry.res_req
        if strict_conservation:
            pool -= (u_max - entry.dr) * entry.res_req
        else:
            pool -= stripped
        row = TraceRow(entry.name, entry.kind, total_r, stripped, entry.dr, u_max)
        over_rows.append(row)
        result[entry.name] = (entry.dr, u_max)

    if strict_conservation:
        _reconcile_conservation(under_rows, over_rows, entries, result)
        pool = 0.0

    state.pool = int(round(pool))
    state.rows = under_rows + over_rows
    for row in state.rows:
        entry = entries[row.name]
        row.used_res = abs(row.u_max_r - entry.max_r) * entry.res_req
    return state, result


def _reconcile_conservation(
    under_rows: list[TraceRow],
    over_rows: list[TraceRow],
    entries: dict[str, ProvisionEntry],
    result: dict[str, tuple[int, int]],
) -> None:
    """Force exact capacity conservation in strict mode.

    After the retained-deduction pass the books show `owed` millicores taken
    from overprovisioned services beyond what was granted out.  Restore
    stripped services (smallest request first, so remainders pack tightly);
    if a remainder is too small for any stripped service's request, revoke
    grants one replica at a time until everything can be returned.
    """
    granted = sum(
        (r.u_max_r - entries[r.name].max_r) * entries[r.name].res_req for r in under_rows
    )
    stripped = sum(
        (entries[r.name].max_r - r.u_max_r) * entries[r.name].res_req for r in over_rows
    )
    owed = stripped - granted
    if owed < 0:
        raise AssertionError("strict pass granted more than it stripped")

    def absorb(owed: int) -> int:
        for row in sorted(over_rows, key=lambda r: (entries[r.name].res_req, r.name)):
            req = entries[row.name].res_req
            headroom = entries[row.name].max_r - row.u_max_r
            k = min(headroom, owed // req)
            if k > 0:
                row.u_max_r += k
                owed -= k * req
        return owed

    owed = absorb(owed)
    # Revoke in reverse processing order: the least-short services give back first.
    for row in reversed(under_rows):
        req = entries[row.name].res_req
        while owed > 0 and row.u_max_r > entries[row.name].max_r:
            row.u_max_r -= 1
            row.feasible_r = row.u_max_r
            owed = absorb(owed + req)
        if owed == 0:
            break
    if owed != 0:
        raise AssertionError(f"conservation reconcile left {owed}m unplaced")
    for row in under_rows + over_rows:
        result[row.name] = (row.feasible_r, row.u_max_r)


def adapt(
    verdicts: list[ManagerVerdict], feasibility: dict[str, tuple[int, int]]
) -> list[ResourcePlan]:
    """Turn balanced replica counts into per-service resource-wise plans."""
    plans: list[ResourcePlan] = []
    for v in verdicts:
        if v.name not in feasibility:
            raise KeyError(f"no feasibility row for {v.name!r}")
        feasible_r, u_max_r = feasibility[v.name]
        if feasible_r == v.dr:
            res_sd = v.sd
        elif v.max_r < feasible_r < v.dr:
            res_sd = ScaleAction.UP
        else:
            res_sd = ScaleAction.NONE
        plans.append(
            ResourcePlan(name=v.name, res_sd=res_sd, res_dr=feasible_r, updated_max_r=u_max_r)
        )
    return plans


class ResourceExchanger:
    """Composes inspect -> balance -> adapt and counts activations.

    The exchange is the centralized tier: one sequential pass per reconcile
    tick, never concurrent with itself for the same application.
    """

    def __init__(
        self,
        strict_conservation: bool = False,
        kb: KnowledgeBase | None = None,
        run_id: str = "",
    ):
        self.strict_conservation = strict_conservation
        self.kb = kb
        self.run_id = run_id
        self.invocations = 0

    def run(
        self,
        verdicts: list[ManagerVerdict],
        specs: dict[str, MicroserviceSpec],
        tick: int = 0,
    ) -> list[ResourcePlan]:
        self.invocations += 1
        under, over = inspect(verdicts, specs)
        state, feasibility = balance(under, over, self.strict_conservation)
        plans = adapt(verdicts, feasibility)
        if self.kb is not None:
            self.kb.append(
                KbEvent(
                    tick=tick,
                    kind=EventKind.ARM_TRACE,
                    run_id=self.run_id,
                    payload={
                        "service": "",
                        "initial_pool": state.initial_pool,
                        "pool_after_under": state.pool_after_under,
                        "final_pool": state.pool,
                        "rows": [
                            {
                                "service": r.name,
                                "kind": r.kind.value,
                                "total_r": round(r.total_r, 6),
                                "used_res": r.used_res,
                                "feasible_r": r.feasible_r,
                                "u_max_r": r.u_max_r,
                            }
                            for r in state.rows
                        ],
                        "plans": [
                            {
                                "service": p.name,
                                "res_sd": p.res_sd.value,
                                "res_dr": p.res_dr,
                                "max_r": p.updated_max_r,
                            }
                            for p in plans
                        ],
                    },
                )
            )
        return plans
