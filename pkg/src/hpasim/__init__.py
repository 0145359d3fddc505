"""Desk-scale horizontal pod autoscaling lab.

A resource-exchanging autoscaler and a clamped reference autoscaler run side
by side against a deterministic simulation of a small microservice
application, and their behavior is compared across a grid of capacity and
threshold scenarios.
"""

from .baseline import BaselineAutoscaler, baseline_plan
from .capacity import AllFeasible, FeasibilityOutcome, Infeasible, analyze
from .config import (
    ConfigError,
    MatrixConfig,
    ServiceConfig,
    default_matrix,
    expand_scenarios,
    load_config,
    scenario_id,
)
from .core import (
    ManagerVerdict,
    MicroserviceSpec,
    MilliCPU,
    PodMetrics,
    ResourcePlan,
    ScaleAction,
    SlaMetrics,
    milli,
)
from .exchange import (
    BalancerState,
    ProvisionEntry,
    ProvisionKind,
    ResourceExchanger,
    adapt,
    balance,
    inspect,
)
from .knowledge import CSV_COLUMNS, EventKind, KbEvent, KnowledgeBase
from .manager import ScalingPolicy, ThresholdPolicy, manage, plan_scaling, threshold_desired_replicas
from .metrics import ScenarioReport, compute_report
from .simulate import (
    AUTOSCALERS,
    BASELINE,
    SMART,
    ClusterSnapshot,
    ClusterState,
    DemandModel,
    LoadProfile,
    Scenario,
    ServiceDemand,
    SimFlags,
    apply_plans,
    run_scenario,
    service_demand,
    users_at,
    utilization,
)

__version__ = "0.1.0"
