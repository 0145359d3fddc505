import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_verdicts
from hpasim.core import ScaleAction
from hpasim.exchange import (
    ProvisionKind,
    ResourceExchanger,
    adapt,
    balance,
    inspect,
)
from hpasim.knowledge import EventKind, KnowledgeBase


def load_golden(golden_dir, case):
    with open(golden_dir / "balancer_traces.json") as fh:
        return json.load(fh)[case]


def run_case(case):
    verdicts, specs = make_verdicts(case["services"])
    under, over = inspect(verdicts, specs)
    state, feasibility = balance(under, over, case.get("strict_conservation", False))
    plans = adapt(verdicts, feasibility)
    return state, plans


# --- inspector ---


def test_inspect_partitions_by_capacity():
    verdicts, specs = make_verdicts(
        [
            {"name": "A", "dr": 7, "sd": "up", "max_r": 5, "res_req": 100},
            {"name": "B", "dr": 1, "sd": "down", "max_r": 5, "res_req": 100},
            {"name": "C", "dr": 3, "sd": "none", "max_r": 3, "res_req": 100},
        ]
    )
    under, over = inspect(verdicts, specs)
    assert [(e.name, e.delta_r, e.delta_res) for e in under] == [("A", 2, 200)]
    assert [(e.name, e.delta_r, e.delta_res) for e in over] == [("B", 4, 400), ("C", 0, 0)]
    assert all(e.kind is ProvisionKind.UNDER for e in under)
    assert all(e.kind is ProvisionKind.OVER for e in over)


def test_inspect_boundary_equal_is_over():
    verdicts, specs = make_verdicts(
        [{"name": "C", "dr": 3, "sd": "none", "max_r": 3, "res_req": 100}]
    )
    under, over = inspect(verdicts, specs)
    assert under == []
    assert over[0].delta_r == 0 and over[0].delta_res == 0


def test_inspect_missing_spec_rejected():
    verdicts, specs = make_verdicts(
        [{"name": "A", "dr": 7, "sd": "up", "max_r": 5, "res_req": 100}]
    )
    with pytest.raises(KeyError):
        inspect(verdicts, {})


# --- worked examples, frozen as golden traces ---


@pytest.mark.parametrize(
    "case_name",
    ["conservation_13_replicas", "partial_satisfaction_negative_pool", "kept_residual_inflation"],
)
def test_golden_balancer_traces(golden_dir, case_name):
    case = load_golden(golden_dir, case_name)
    state, plans = run_case(case)

    assert state.initial_pool == case["pools"]["initial"]
    assert state.pool_after_under == case["pools"]["after_under"]
    assert state.pool == case["pools"]["final"]

    got_rows = [
        {
            "name": r.name,
            "kind": r.kind.value,
            "total_r": r.total_r,
            "used_res": r.used_res,
            "feasible_r": r.feasible_r,
            "u_max_r": r.u_max_r,
        }
        for r in state.rows
    ]
    assert got_rows == case["rows"]

    got_plans = {
        p.name: {"res_sd": p.res_sd.value, "res_dr": p.res_dr, "updated_max_r": p.updated_max_r}
        for p in plans
    }
    assert got_plans == case["plans"]

    reqs = {s["name"]: s["res_req"] for s in case["services"]}
    after = sum(p.updated_max_r * reqs[p.name] for p in plans)
    assert after == case["total_capacity_after"]


def test_strict_mode_conserves_on_inflation_case(golden_dir):
    case = load_golden(golden_dir, "kept_residual_strict")
    _, plans = run_case(case)
    got_plans = {
        p.name: {"res_sd": p.res_sd.value, "res_dr": p.res_dr, "updated_max_r": p.updated_max_r}
        for p in plans
    }
    assert got_plans == case["plans"]
    reqs = {s["name"]: s["res_req"] for s in case["services"]}
    after = sum(p.updated_max_r * reqs[p.name] for p in plans)
    assert after == case["total_capacity_before"] == case["total_capacity_after"]


def test_no_demand_means_everyone_keeps_capacity():
    verdicts, specs = make_verdicts(
        [
            {"name": "A", "dr": 1, "sd": "down", "max_r": 5, "res_req": 100},
            {"name": "B", "dr": 2, "sd": "none", "max_r": 4, "res_req": 200},
        ]
    )
    under, over = inspect(verdicts, specs)
    state, feasibility = balance(under, over)
    assert under == []
    assert all(feasibility[n][1] == v.max_r for n, v in {"A": verdicts[0], "B": verdicts[1]}.items())
    assert state.pool == state.initial_pool


def test_single_underprovisioned_service_alone_gets_nothing():
    verdicts, specs = make_verdicts(
        [{"name": "A", "dr": 9, "sd": "up", "max_r": 5, "res_req": 100}]
    )
    under, over = inspect(verdicts, specs)
    state, feasibility = balance(under, over)
    plans = adapt(verdicts, feasibility)
    assert feasibility["A"] == (5, 5)
    assert plans[0].res_sd is ScaleAction.NONE
    assert plans[0].res_dr == 5


def test_equal_shortfalls_processed_in_name_order():
    """Tie on the millicore amount falls back to the service name."""
    verdicts, specs = make_verdicts(
        [
            {"name": "beta", "dr": 4, "sd": "up", "max_r": 2, "res_req": 100},
            {"name": "alpha", "dr": 4, "sd": "up", "max_r": 2, "res_req": 100},
            {"name": "idle", "dr": 1, "sd": "none", "max_r": 3, "res_req": 100},
        ]
    )
    under, over = inspect(verdicts, specs)
    _, feasibility = balance(under, over)
    # pool of 200m covers exactly one shortfall; alpha is served first
    assert feasibility["alpha"] == (4, 4)
    assert feasibility["beta"] == (2, 2)


# --- adaptive scaler branches ---


def test_adapt_pass_through_keeps_original_decision():
    verdicts, _ = make_verdicts([{"name": "A", "dr": 7, "sd": "up", "max_r": 5, "res_req": 100}])
    plans = adapt(verdicts, {"A": (7, 7)})
    assert plans[0].res_sd is ScaleAction.UP
    assert plans[0].res_dr == 7


def test_adapt_partial_grant_is_scale_up():
    verdicts, _ = make_verdicts([{"name": "A", "dr": 10, "sd": "up", "max_r": 5, "res_req": 100}])
    plans = adapt(verdicts, {"A": (7, 7)})
    assert plans[0].res_sd is ScaleAction.UP
    assert plans[0].res_dr == 7


def test_adapt_no_grant_is_no_scale():
    verdicts, _ = make_verdicts([{"name": "A", "dr": 10, "sd": "up", "max_r": 5, "res_req": 100}])
    plans = adapt(verdicts, {"A": (5, 5)})
    assert plans[0].res_sd is ScaleAction.NONE
    assert plans[0].res_dr == 5


def test_adapt_missing_row_rejected():
    verdicts, _ = make_verdicts([{"name": "A", "dr": 10, "sd": "up", "max_r": 5, "res_req": 100}])
    with pytest.raises(KeyError):
        adapt(verdicts, {})


# --- exchanger composition ---


def test_exchanger_counts_invocations_and_records_trace():
    kb = KnowledgeBase()
    kb.register_run("r")
    exchanger = ResourceExchanger(kb=kb, run_id="r")
    verdicts, specs = make_verdicts(
        [
            {"name": "A", "dr": 7, "sd": "up", "max_r": 5, "res_req": 100},
            {"name": "B", "dr": 1, "sd": "down", "max_r": 5, "res_req": 100},
        ]
    )
    plans = exchanger.run(verdicts, specs, tick=30)
    assert exchanger.invocations == 1
    assert {p.name for p in plans} == {"A", "B"}
    traces = kb.events("r", EventKind.ARM_TRACE)
    assert len(traces) == 1
    assert traces[0].tick == 30
    assert traces[0].payload["initial_pool"] == 400


# --- randomized properties ---

SERVICE_REQS = (70, 100, 200)

instances = st.lists(
    st.tuples(
        st.integers(0, 20),  # dr
        st.integers(0, 20),  # max_r
        st.sampled_from(SERVICE_REQS),
        st.sampled_from(["up", "down", "none"]),
    ),
    min_size=0,
    max_size=12,
).map(
    lambda rows: [
        {"name": f"svc{i:02d}", "dr": dr, "max_r": mr, "res_req": req, "sd": sd}
        for i, (dr, mr, req, sd) in enumerate(rows)
    ]
)


@given(instances, st.booleans())
@settings(max_examples=400)
def test_balancer_bounds_hold(services, strict):
    verdicts, specs = make_verdicts(services)
    under, over = inspect(verdicts, specs)
    state, feasibility = balance(under, over, strict_conservation=strict)

    for entry in under:
        feasible_r, u_max_r = feasibility[entry.name]
        assert entry.max_r <= u_max_r <= entry.dr
        assert feasible_r == u_max_r
    for entry in over:
        feasible_r, u_max_r = feasibility[entry.name]
        assert entry.dr <= u_max_r <= entry.max_r
        assert feasible_r == entry.dr

    granted = sum((feasibility[e.name][1] - e.max_r) * e.res_req for e in under)
    assert granted <= state.initial_pool
    assert state.pool_after_under >= 0

    for row in state.rows:
        entry = next(e for e in under + over if e.name == row.name)
        assert row.used_res == abs(row.u_max_r - entry.max_r) * entry.res_req


@given(instances)
@settings(max_examples=400)
def test_strict_mode_exactly_conserves_capacity(services):
    verdicts, specs = make_verdicts(services)
    under, over = inspect(verdicts, specs)
    _, feasibility = balance(under, over, strict_conservation=True)
    before = sum(e.max_r * e.res_req for e in under + over)
    after = sum(feasibility[e.name][1] * e.res_req for e in under + over)
    assert after == before


@given(instances)
@settings(max_examples=200)
def test_plans_respect_capacity_bound(services):
    verdicts, specs = make_verdicts(services)
    plans = ResourceExchanger().run(verdicts, specs)
    for plan in plans:
        assert plan.res_dr <= plan.updated_max_r
