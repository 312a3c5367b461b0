"""Run the weekend demand profile end to end and plot the story.

Top panel: cooling demand vs the load the dispatcher allocated.
Bottom panel: true total power against the 1580 kW cap, with the
model's upper confidence bound on top.  The 2600 kW plateau near the
end is not servable under the cap, so the dispatcher sheds load there
by design.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chillrto import AlgoConfig, builtin, compute_metrics, default_plant, run

specs = default_plant()
algo = AlgoConfig()
scenario = builtin("weekend")

result = run(scenario, specs, algo, seed=0)
metrics = compute_metrics(result)

tr = result.trace
t_h = tr["t_s"] / 3600.0
served = sum(tr[f"setpoint_{i}_kw"] for i in range(1, len(specs) + 1))

fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(10, 6), sharex=True)
ax1.plot(t_h, tr["demand_kw"], "k-", lw=1, label="demand")
ax1.plot(t_h, served, "C0", lw=1, label="allocated load")
ax1.set_ylabel("cooling load [kW]")
ax1.legend(loc="upper left")

cap = algo.safety.power_cap_kw
ax2.plot(t_h, tr["true_total_kw"], "C2", lw=1, label="true power")
ax2.plot(t_h, tr["ucb_total_kw"], "C1", lw=0.8, alpha=0.7, label="model UCB")
ax2.axhline(cap, color="r", ls="--", lw=1, label=f"cap {cap:.0f} kW")
ax2.set_ylabel("total power [kW]")
ax2.set_xlabel("time [h]")
ax2.legend(loc="lower right", fontsize=8)
fig.tight_layout()
fig.savefig("weekend_run.png", dpi=130)

print("wrote weekend_run.png")
print(f"violations:    {metrics['violation_count_s']} s")
print(f"demand rmse:   {metrics['demand_rmse_kw']:.1f} kW")
print(f"energy:        {metrics['energy_kwh']:.0f} kWh")
print(f"explored on:   {metrics['z_on_instances']} of {result.instances['t_s'].size} instances")
worst = max(metrics["curve_rmse_kw"].items(), key=lambda kv: kv[1])
print(f"curve rmse:    worst {worst[0]} at {worst[1]:.2f} kW over visited range")
