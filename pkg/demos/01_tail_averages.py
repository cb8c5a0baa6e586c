"""Tail averages over scenarios and over criteria.

Run:  python3 demos/01_tail_averages.py
"""
import numpy as np

from riskowa import beta_average, owa_weights, r_owa, r_owa_polytope_oracle, r_owa_weights

values = np.array([10.0, 7.0, 4.0, 3.0, 2.0])
mass = np.array([0.2, 0.1, 0.3, 0.25, 0.15])

# As a distribution over scenarios: mean of the worst tail of size beta.
print("beta   beta-average")
for beta in (0.1, 0.2, 0.3, 0.5, 0.8, 1.0):
    print(f"{beta:4.1f}   {beta_average(values, mass, beta):8.4f}")
print(f"expectation          {values @ mass:8.4f}")

# The same numbers read as criteria with importances give the r-OWA.
w = r_owa_weights(values, mass, 0.5)
print("\nr = 0.5 rank weights:", np.round(w.lambdas, 3), " cutoff at rank", w.cutoff_index)
print("r-OWA:", r_owa(values, mass, 0.5))

# Importances in rank order of the values drive the weights directly.
print("weights from sorted importances:", owa_weights(mass, 0.3).lambdas)

# The r-OWA is also the largest mean over sub-measures of w with total mass r.
rng = np.random.default_rng(3)
x = rng.normal(size=5)
w = rng.dirichlet(np.ones(5))
for r in (0.1, 0.4, 0.9):
    print(f"r={r}: sorted {r_owa(x, w, r):+.6f}   polytope {r_owa_polytope_oracle(x, w, r):+.6f}")

# Equal importances turn the r-OWA into the mean of the n largest values.
k = 6
y = rng.integers(0, 10, k).astype(float)
for n in range(1, k + 1):
    assert np.isclose(r_owa(y, np.full(k, 1 / k), n / k), np.sort(y)[::-1][:n].mean())
print("\nequal importances, r = n/K  ->  mean of the n largest: ok")
