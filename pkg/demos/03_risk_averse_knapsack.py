"""Risk-averse versus average-case knapsack on random instances.

Run:  python3 demos/03_risk_averse_knapsack.py
"""
import statistics

from riskowa import RiskParams, compute_deltas, generate_instance, solve_msp, solve_naive
from riskowa.export import build_lp_model, write_lp_text

rp = RiskParams(beta=0.1, r=0.5)
inst = generate_instance(n_items=20, n_scenarios=10, n_criteria=3, seed=1)
print(f"{inst.n_items} items, capacity {inst.capacity:g}, "
      f"p = {inst.generator['p']:.3f} (about {inst.generator['p'] * inst.n_items:.0f} items fit)")

msp = solve_msp(inst, rp)
naive = solve_naive(inst)
print("risk-averse pick:", [i + 1 for i, t in enumerate(msp.x) if t], f"({msp.nodes} nodes)")
print("mean-value pick: ", [i + 1 for i, t in enumerate(naive.x) if t], f"({naive.nodes} nodes)")

d = compute_deltas(inst, rp, msp, naive)
print(f"h:    {d.z_msp:.4f} (risk-averse)  vs {d.f_msp_of_mip:.4f} (mean-value)")
print(f"mean: {d.f_mip_of_msp:.4f} (risk-averse)  vs {d.z_mip:.4f} (mean-value)")
print(f"the risk-averse pick gives up {d.delta_avg:.2f}% on the mean and gains {d.delta_tail:.2f}% on h")

# A small batch: the tail gain tends to exceed the average loss.
avg, tail = [], []
for seed in range(10):
    inst = generate_instance(25, 10, 3, seed)
    d = compute_deltas(inst, rp, solve_msp(inst, rp), solve_naive(inst))
    avg.append(d.delta_avg)
    tail.append(d.delta_tail)
print(f"\n10 instances of 25 items: median loss on mean {statistics.median(avg):.2f}%, "
      f"median gain on h {statistics.median(tail):.2f}%")

# The same model for an external MILP solver.
text = write_lp_text(build_lp_model(generate_instance(4, 2, 2, 0), rp))
print("\nLP export, first lines:")
print("\n".join(text.splitlines()[:12]))
