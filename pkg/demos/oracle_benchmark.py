"""Score the learning dispatcher against exact knowledge.

Same weekend scenario twice: once learning the curves from scratch,
once with the true polynomials handed over.  After the 10000 s
learning transient the two stay within a fraction of a percent on
energy; the plot shows rolling 30 min average power for both.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from chillrto import AlgoConfig, builtin, compute_metrics, default_plant, run

specs = default_plant()
algo = AlgoConfig()
scenario = builtin("weekend")

learner = run(scenario, specs, algo, seed=0)
oracle = run(scenario, specs, algo, seed=0, oracle=True)
metrics = compute_metrics(learner, oracle_result=oracle, burn_in_s=10000.0)

w = 1800  # rolling half hour
kern = np.ones(w) / w
t_h = learner.trace["t_s"][w - 1:] / 3600.0
roll = lambda x: np.convolve(x, kern, mode="valid")

fig, ax = plt.subplots(figsize=(9, 4))
ax.plot(t_h, roll(learner.trace["true_total_kw"]), "C0", label="learning dispatcher")
ax.plot(t_h, roll(oracle.trace["true_total_kw"]), "k--", lw=1, label="exact knowledge")
ax.axvline(10000 / 3600.0, color="gray", lw=0.8, alpha=0.7)
ax.set_xlabel("time [h]")
ax.set_ylabel("rolling mean power [kW]")
ax.legend()
fig.tight_layout()
fig.savefig("oracle_benchmark.png", dpi=130)

print("wrote oracle_benchmark.png")
print(f"post burn-in energy: {metrics['post_burn_in_energy_kwh']:.0f} kWh "
      f"vs oracle {metrics['oracle_post_burn_in_energy_kwh']:.0f} kWh")
print(f"relative gap: {100 * metrics['oracle_power_gap']:.2f}%")
