"""Walk through the per-service manager: desired replicas and decisions.

Each microservice gets its own manager. Given the service's current
utilization (percent of its CPU request), replica count, and SLA, the
manager computes a desired replica count with the threshold policy and
turns it into a scale-up / scale-down / no-op decision. Note that the
desired count is NOT clamped to the capacity bound: returning the raw
demand is what lets the capacity gate downstream notice scarcity.
"""

from hpasim import (
    AllFeasible,
    MicroserviceSpec,
    PodMetrics,
    SlaMetrics,
    ThresholdPolicy,
    analyze,
    manage,
)

policy = ThresholdPolicy()
sla = SlaMetrics(tmv=50.0, min_r=1, max_r=5)

print("threshold policy: desired = ceil(replicas * utilization / threshold)\n")

cases = [
    ("busy frontend", MicroserviceSpec("frontend", 100, 200), PodMetrics(cmv=130, cr=5)),
    ("idle email", MicroserviceSpec("email", 100, 200), PodMetrics(cmv=10, cr=1)),
    ("at the threshold", MicroserviceSpec("currency", 100, 200), PodMetrics(cmv=50, cr=2)),
    ("cooling down", MicroserviceSpec("checkout", 100, 200), PodMetrics(cmv=10, cr=4)),
]

verdicts = []
for label, spec, pod in cases:
    verdict = manage(spec, pod, sla, policy)
    verdicts.append(verdict)
    print(
        f"{label:<17} cmv={pod.cmv:>5.1f}%  cr={pod.cr}  ->  "
        f"desired={verdict.dr:>2}  decision={verdict.sd.value}"
    )

print("\nfeasibility gate over the whole application:")
outcome = analyze(verdicts)
if isinstance(outcome, AllFeasible):
    print("  every service fits its capacity bound -> plans pass through unchanged")
else:
    over = [v.name for v in outcome.verdicts if v.dr > v.max_r]
    print(f"  over capacity: {', '.join(over)} -> escalate to the resource exchange")
    print("  (see 02_resource_exchange.py for what happens next)")
