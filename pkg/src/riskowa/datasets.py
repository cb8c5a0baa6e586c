"""Small worked examples with known answers.

Matrices are stored criteria x scenarios (K rows, J columns).
"""
from __future__ import annotations

import numpy as np

from .core import CriteriaSet, ScenarioSet
from .enumeration import AlternativeSet

# Four alternatives, five scenarios, six criteria. Rows below are scenarios
# (as usually tabulated) and are transposed on load.
_ILLUSTRATIVE_PROBS = (0.15, 0.20, 0.30, 0.25, 0.10)
_ILLUSTRATIVE_IMPORTANCES = (0.20, 0.10, 0.20, 0.25, 0.15, 0.10)
_ILLUSTRATIVE = {
    "alt1": [
        [0.51, 0.27, 0.39, 0.45, 0.75, 0.76],
        [0.58, 0.65, 0.47, 0.26, 0.90, 0.24],
        [0.48, 0.44, 0.90, 0.50, 0.93, 0.65],
        [0.76, 0.18, 0.01, 0.90, 0.56, 0.02],
        [0.86, 0.36, 0.21, 0.28, 0.63, 0.72],
    ],
    "alt2": [
        [0.40, 0.58, 0.39, 0.45, 0.54, 0.18],
        [0.68, 0.74, 0.70, 0.15, 0.54, 0.72],
        [0.93, 0.52, 0.23, 0.82, 0.21, 0.03],
        [0.37, 0.85, 0.07, 0.42, 0.52, 0.22],
        [0.92, 0.13, 0.71, 0.39, 0.90, 0.87],
    ],
    "alt3": [
        [0.80, 0.90, 0.61, 0.28, 0.94, 0.09],
        [0.29, 0.48, 0.26, 0.23, 0.21, 0.07],
        [0.73, 0.65, 0.32, 0.56, 0.95, 0.65],
        [0.58, 0.39, 0.21, 0.66, 0.70, 0.93],
        [0.73, 0.22, 0.33, 0.31, 0.32, 0.38],
    ],
    "alt4": [
        [0.30, 0.52, 0.12, 0.68, 0.46, 0.73],
        [1.00, 0.57, 0.46, 0.82, 0.90, 0.72],
        [0.18, 0.76, 0.30, 0.34, 0.54, 0.99],
        [0.53, 0.21, 0.13, 0.12, 0.66, 0.86],
        [0.98, 0.46, 0.50, 0.29, 0.27, 0.40],
    ],
}

_DOMINATED = {
    "alt1": [[0.80, 0.40, 0.30], [0.60, 0.20, 0.65]],
    "alt2": [[0.70, 0.45, 0.65], [0.80, 0.30, 0.50]],
}


def illustrative_example() -> AlternativeSet:
    """Four alternatives x 6 criteria x 5 scenarios; values in [0, 1]."""
    return AlternativeSet(
        names=list(_ILLUSTRATIVE),
        matrices=np.array([np.array(v).T for v in _ILLUSTRATIVE.values()]),
        scenarios=ScenarioSet(_ILLUSTRATIVE_PROBS),
        criteria=CriteriaSet(_ILLUSTRATIVE_IMPORTANCES),
    )


def dominated_example() -> AlternativeSet:
    """Two alternatives that tie on h (beta=1/2, r=2/3) although one
    Pareto-dominates the other in beta-average space."""
    return AlternativeSet(
        names=list(_DOMINATED),
        matrices=np.array([np.array(v).T for v in _DOMINATED.values()]),
        scenarios=ScenarioSet.uniform(2),
        criteria=CriteriaSet.uniform(3),
    )
