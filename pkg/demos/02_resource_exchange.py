"""Trace the resource-exchange heuristics on small worked examples.

The exchange pools the slack of services running below their capacity
bound and walks the starved services from largest shortfall to smallest,
granting whole replicas while the pool lasts.  The slack holders are then
confirmed from smallest slack to largest: whatever the remaining pool can
cover they keep, the rest is stripped.

The third example shows the documented quirk of the as-written pool
bookkeeping: a service may keep slack that was already granted away, so
total capacity can inflate.  `strict_conservation=True` switches to
retained-amount bookkeeping plus a reconcile step that keeps total
capacity exactly constant.
"""

from hpasim import ManagerVerdict, MicroserviceSpec, ScaleAction, adapt, balance, inspect


def show(title, services, strict=False):
    print(f"--- {title} ---")
    verdicts = [
        ManagerVerdict(n, dr, ScaleAction(sd), max_r) for n, dr, sd, max_r in services
    ]
    specs = {n: MicroserviceSpec(n, 100, 200) for n, *_ in services}
    under, over = inspect(verdicts, specs)
    print("  shortfalls:", {e.name: f"{e.delta_res}m" for e in under} or "none")
    print("  slack:     ", {e.name: f"{e.delta_res}m" for e in over} or "none")
    state, feasibility = balance(under, over, strict_conservation=strict)
    print(f"  pool: {state.initial_pool}m -> {state.pool_after_under}m -> {state.pool}m")
    for plan in adapt(verdicts, feasibility):
        v = next(v for v in verdicts if v.name == plan.name)
        print(
            f"  {plan.name}: bound {v.max_r} -> {plan.updated_max_r}, "
            f"replicas -> {plan.res_dr} ({plan.res_sd.value})"
        )
    before = sum(v.max_r for v in verdicts)
    after = sum(adapt(verdicts, feasibility)[i].updated_max_r for i in range(len(verdicts)))
    print(f"  total capacity: {before} -> {after} replicas\n")


# Enough slack: A's two-replica shortfall is fully covered by B's slack.
show(
    "full coverage, capacity conserved (13 -> 13 replicas)",
    [("A", 7, "up", 5), ("B", 1, "down", 5), ("C", 3, "none", 3)],
)

# Not enough slack: A wants five more replicas but the pool only buys two.
# The pool goes negative in the confirmation pass; capacity still balances.
show(
    "partial satisfaction, negative pool",
    [("A", 10, "up", 5), ("B", 2, "down", 4)],
)

# B keeps its slack even though A's grant already consumed the pool: +1
# replica appears from nowhere.
show(
    "kept slack inflates capacity (11 -> 12 replicas)",
    [("A", 7, "up", 5), ("B", 2, "none", 3), ("C", 1, "down", 3)],
)

# Same inputs under strict conservation: C is stripped instead and the
# books close at exactly 11 replicas.
show(
    "same case under strict_conservation (11 -> 11 replicas)",
    [("A", 7, "up", 5), ("B", 2, "none", 3), ("C", 1, "down", 3)],
    strict=True,
)
