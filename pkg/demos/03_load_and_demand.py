"""Plot the load profile and the per-service demand model it drives.

The default profile ramps from 0 to 600 concurrent users over 5 minutes
(2 users/s) and holds them for 10 more.  Each service's CPU demand is an
affine function of the user count; frontend and currency carry most of the
load and are the ones that outgrow their capacity under tight scenarios.

Writes demand_model.png next to this script.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from hpasim import LoadProfile, service_demand, users_at
from hpasim.config import DEFAULT_SERVICES, default_matrix, expand_scenarios

profile = LoadProfile()
scenario = expand_scenarios(default_matrix())[0]
t = np.arange(profile.total_duration)
users = np.array([users_at(profile, int(s)) for s in t])

fig, (ax_users, ax_demand) = plt.subplots(2, 1, figsize=(9, 7), sharex=True)
ax_users.plot(t, users, color="tab:blue")
ax_users.set_ylabel("concurrent users")
ax_users.set_title(
    f"ramp to {profile.peak_users} users at {profile.spawn_rate:g}/s, then sustain"
)

for svc in DEFAULT_SERVICES:
    demand = [service_demand(scenario.demand, svc.name, int(u)) for u in users]
    ax_demand.plot(t, demand, label=svc.name)
ax_demand.set_xlabel("time (s)")
ax_demand.set_ylabel("CPU demand (milliCPU)")
ax_demand.legend(fontsize="x-small", ncol=3)

out = Path(__file__).parent / "demand_model.png"
fig.tight_layout()
fig.savefig(out)
print(f"wrote {out}")

print("\npeak demand vs one replica's request:")
for svc in DEFAULT_SERVICES:
    peak = service_demand(scenario.demand, svc.name, profile.peak_users)
    print(f"  {svc.name:<15} {peak:>4}m  ({100 * peak / svc.cpu_request:>6.1f}% of request)")
