"""Picking one of four alternatives, and how the choice moves with (beta, r).

Run:  python3 demos/02_choosing_among_alternatives.py
"""
import numpy as np

from riskowa import RiskParams, solve_enumeration, sweep
from riskowa.datasets import dominated_example, illustrative_example

alts = illustrative_example()
rp = RiskParams(beta=0.3, r=0.17)
res = solve_enumeration(alts, rp)
print(f"beta={rp.beta}, r={rp.r}")
for name, ev in zip(alts.names, res.evaluations):
    g = " ".join(f"{v:.3f}" for v in ev.g)
    print(f"  {name}: g = [{g}]  h = {ev.h:.6f}")
print("  chosen:", res.winner)

# The optimum shifts across the parameter plane.
grid = np.round(np.linspace(0.1, 1.0, 10), 2)
cells = sweep(alts, grid, grid)
print("\nwinner by beta (rows) and r (columns)")
print("       " + " ".join(f"{r:4.1f}" for r in grid))
for beta, row in zip(grid, cells.winners):
    print(f"  {beta:4.1f} " + " ".join(f"{alts.names[i][-1]:>4}" for i in row))
print("optimal h is nonincreasing along both axes:",
      bool(np.all(np.diff(cells.values, axis=0) <= 1e-12) and np.all(np.diff(cells.values, axis=1) <= 1e-12)))

# Equal h does not mean equally good: the second phase removes the
# alternative whose g-vector is beaten everywhere.
pair = dominated_example()
res = solve_enumeration(pair, RiskParams(0.5, 2 / 3))
print("\nh of the pair:", np.round(res.h, 6), "-> tied", [pair.names[i] for i in res.argmin])
for name, ev in zip(pair.names, res.evaluations):
    print(f"  {name}: g = {np.round(ev.g, 3)}")
print("  kept:", res.winner)
