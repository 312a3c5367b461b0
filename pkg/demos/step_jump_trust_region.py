"""Reproduce the unsafe-jump failure mode and its trust-region fix.

A long low-demand soak leaves the models confident only at low loads;
the optimistic bound up high goes stale.  When demand jumps from 1200
to 2600 kW in one step, the dispatcher leaps into that unexplored
region and the true power briefly breaches the cap before measurements
arrive and force a retreat.  Capping per-period setpoint moves at
100 kW per machine removes the breach: the plant walks up in steps
small enough for the model to keep up.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from chillrto import AlgoConfig, builtin, compute_metrics, default_plant, run

specs = default_plant()
scenario = builtin("step_jump")

plain = run(scenario, specs, AlgoConfig(), seed=0)
guarded = run(scenario, specs, AlgoConfig(trust_region_kw=100.0), seed=0)
m_plain = compute_metrics(plain)
m_guarded = compute_metrics(guarded)

cap = plain.algo.safety.power_cap_kw
lo, hi = 2300, 4500  # window around the jump at t=2500 s

fig, ax = plt.subplots(figsize=(9, 4))
sl = slice(lo, hi)
ax.plot(plain.trace["t_s"][sl], plain.trace["true_total_kw"][sl],
        "C3", lw=1.2, label="no trust region")
ax.plot(guarded.trace["t_s"][sl], guarded.trace["true_total_kw"][sl],
        "C0", lw=1.2, label="trust region 100 kW")
ax.axhline(cap, color="k", ls="--", lw=1, label=f"cap {cap:.0f} kW")
ax.axvline(2500, color="gray", lw=0.8, alpha=0.6)
ax.set_xlabel("time [s]")
ax.set_ylabel("true total power [kW]")
ax.legend()
fig.tight_layout()
fig.savefig("step_jump.png", dpi=130)

print("wrote step_jump.png")
print(f"no trust region: episodes {m_plain['violation_episodes_s']}, "
      f"peak excess {m_plain['max_violation_kw']:.1f} kW")
print(f"trust region:    {m_guarded['violation_count_s']} violation seconds")
