"""Risk-averse aggregation kernel.

Two tail operators are composed here:

* the beta-average of a row of scenario outcomes, i.e. the mean of the worst
  scenarios whose probabilities add up to ``beta``;
* the r-OWA of a vector of criterion values, i.e. the importance-weighted
  mean of the worst criteria whose importances add up to ``r``.

``evaluate_h`` applies the first to every criterion and the second to the
result.  All values are losses: larger is worse.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

TOL = 1e-9

ArrayLike = Union[Sequence[float], np.ndarray]


def _as_measure(values: ArrayLike, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{what} must be a non-empty vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{what} must be finite")
    if np.any(arr < 0):
        raise ValueError(f"{what} must be nonnegative")
    if abs(arr.sum() - 1.0) > TOL:
        raise ValueError(f"{what} must sum to 1 (got {arr.sum():.12g})")
    arr.setflags(write=False)
    return arr


def _check_level(value: float, name: str) -> float:
    value = float(value)
    if not (0.0 < value <= 1.0):
        raise ValueError(f"{name} must be in (0,1]")
    return value


@dataclass(frozen=True)
class ScenarioSet:
    """Probabilities of the J scenarios."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _as_measure(self.probs, "probs"))

    @classmethod
    def uniform(cls, n: int) -> "ScenarioSet":
        return cls(np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return self.probs.size


@dataclass(frozen=True)
class CriteriaSet:
    """Importances of the K criteria."""

    importances: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "importances", _as_measure(self.importances, "importances")
        )

    @classmethod
    def uniform(cls, n: int) -> "CriteriaSet":
        return cls(np.full(n, 1.0 / n))

    def __len__(self) -> int:
        return self.importances.size


@dataclass(frozen=True)
class RiskParams:
    """Tail levels: ``beta`` over scenarios, ``r`` over criteria."""

    beta: float
    r: float

    def __post_init__(self):
        object.__setattr__(self, "beta", _check_level(self.beta, "beta"))
        object.__setattr__(self, "r", _check_level(self.r, "r"))


@dataclass(frozen=True)
class OwaWeights:
    """Rank weights of an r-OWA.

    ``lambdas[i]`` multiplies the ``i``-th largest value, which is the entry
    ``order[i]`` of the original vector.  ``cutoff_index`` is the 0-based
    rank at which the cumulative importance first reaches ``r``.
    """

    lambdas: np.ndarray
    cumulative: np.ndarray
    cutoff_index: int
    order: np.ndarray


@dataclass(frozen=True)
class HEvaluation:
    g: np.ndarray
    h: float


def _scenarios(scen) -> ScenarioSet:
    return scen if isinstance(scen, ScenarioSet) else ScenarioSet(scen)


def _criteria(crit) -> CriteriaSet:
    return crit if isinstance(crit, CriteriaSet) else CriteriaSet(crit)


def _descending_order(values: np.ndarray, mass: np.ndarray) -> np.ndarray:
    # Value descending, then mass descending, then index. Equal (value, mass)
    # pairs are interchangeable, so any permutation of tied entries produces
    # the same sorted sequence and bit-identical sums.
    mass = np.broadcast_to(mass, values.shape)
    return np.lexsort((-mass, -values), axis=-1)


def _tail_mean(values: np.ndarray, mass: np.ndarray, level: float) -> np.ndarray:
    """Mean of the largest entries along the last axis, truncated at ``level``.

    Works on stacked inputs of shape (..., n); ``mass`` has shape (n,).
    """
    order = _descending_order(values, mass)
    sorted_vals = np.take_along_axis(values, order, axis=-1)
    cum = np.minimum(np.cumsum(mass[order], axis=-1), level)
    # total mass is 1 >= level up to rounding; pin the tail so weights sum to level
    cum[..., -1] = level
    weights = np.diff(cum, axis=-1, prepend=0.0)
    return np.einsum("...i,...i->...", weights, sorted_vals) / level


def _tail_weights(values: np.ndarray, mass: np.ndarray, level: float) -> np.ndarray:
    """Weights, in original positions, with ``sum(weights * values) == _tail_mean``."""
    order = _descending_order(values, mass)
    cum = np.minimum(np.cumsum(mass[order], axis=-1), level)
    cum[..., -1] = level
    out = np.empty(values.shape)
    np.put_along_axis(out, order, np.diff(cum, axis=-1, prepend=0.0) / level, axis=-1)
    return out


def _beta_averages(matrix: np.ndarray, probs: np.ndarray, beta: float) -> np.ndarray:
    return _tail_mean(matrix, probs, beta)


def _r_owa(values: np.ndarray, importances: np.ndarray, r: float) -> np.ndarray:
    return _tail_mean(values, importances, r)


def _h(matrix: np.ndarray, probs, importances, beta: float, r: float):
    """h for one (K, J) matrix or a stack (..., K, J); no validation."""
    return _r_owa(_beta_averages(matrix, probs, beta), importances, r)


def beta_average(row: ArrayLike, scen, beta: float) -> float:
    """Average of ``row`` over its worst scenarios of total probability ``beta``.

    The scenario straddling the cut contributes only the residual
    probability.  With ``beta = 1`` this is the expectation.

    >>> beta_average([10, 7, 4, 3, 2], [0.2, 0.1, 0.3, 0.25, 0.15], 0.5)
    7.0
    """
    scen = _scenarios(scen)
    beta = _check_level(beta, "beta")
    row = np.asarray(row, dtype=float)
    if row.shape != scen.probs.shape:
        raise ValueError(
            f"row has {row.size} entries but there are {len(scen)} scenarios"
        )
    if not np.all(np.isfinite(row)):
        raise ValueError("row must be finite")
    return float(_beta_averages(row, scen.probs, beta))


def owa_weights(sorted_importances: ArrayLike, r: float) -> OwaWeights:
    """Rank weights from importances already arranged in value-descending order.

    Uses the truncated-linear generating function ``min(t / r, 1)``.
    """
    imps = _as_measure(sorted_importances, "importances")
    r = _check_level(r, "r")
    cumulative = np.cumsum(imps)
    capped = np.minimum(cumulative, r)
    capped[-1] = r
    lambdas = np.diff(capped, prepend=0.0) / r
    cutoff = int(np.argmax(capped >= r))
    return OwaWeights(
        lambdas=lambdas,
        cumulative=cumulative,
        cutoff_index=cutoff,
        order=np.arange(imps.size),
    )


def r_owa(values: ArrayLike, crit, r: float) -> float:
    """Importance-weighted mean of the worst criteria up to total importance ``r``."""
    crit = _criteria(crit)
    r = _check_level(r, "r")
    values = np.asarray(values, dtype=float)
    if values.shape != crit.importances.shape:
        raise ValueError(
            f"got {values.size} values but there are {len(crit)} criteria"
        )
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    return float(_r_owa(values, crit.importances, r))


def r_owa_weights(values: ArrayLike, crit, r: float) -> OwaWeights:
    """The ``OwaWeights`` used by ``r_owa`` for this particular vector."""
    crit = _criteria(crit)
    values = np.asarray(values, dtype=float)
    order = _descending_order(values, crit.importances)
    w = owa_weights(crit.importances[order], r)
    return OwaWeights(w.lambdas, w.cumulative, w.cutoff_index, order)


def r_owa_polytope_oracle(values: ArrayLike, crit, r: float) -> float:
    """Brute-force r-OWA: maximize ``sum(l * values) / r`` over
    ``{0 <= l <= w, sum(l) = r}`` by enumerating the polytope's vertices.

    A vertex has every coordinate at a bound except at most one, so it is
    fixed by the set of coordinates sitting at ``w_k`` plus one free index.
    Exponential in K; meant for K <= 10.
    """
    crit = _criteria(crit)
    r = _check_level(r, "r")
    x = np.asarray(values, dtype=float)
    w = crit.importances
    k = w.size
    if x.shape != w.shape:
        raise ValueError("values and importances differ in length")
    if k > 10:
        raise ValueError("polytope oracle is limited to K <= 10")

    best = -np.inf
    for mask in itertools.product((False, True), repeat=k):
        full = np.array(mask)
        base = w[full].sum()
        base_val = float(x[full] @ w[full])
        if abs(base - r) <= TOL:
            best = max(best, base_val / r)
        for f in np.flatnonzero(~full):
            rest = r - base
            if -TOL <= rest <= w[f] + TOL:
                best = max(best, (base_val + rest * x[f]) / r)
    return float(best)


def evaluate_h(m: ArrayLike, scen, crit, rp: RiskParams) -> HEvaluation:
    """Beta-average every criterion row of ``m`` (K x J), then r-OWA the result."""
    scen = _scenarios(scen)
    crit = _criteria(crit)
    m = np.asarray(m, dtype=float)
    if m.shape != (len(crit), len(scen)):
        raise ValueError(
            f"outcome matrix has shape {m.shape}, expected "
            f"({len(crit)}, {len(scen)}) criteria x scenarios"
        )
    if not np.all(np.isfinite(m)):
        raise ValueError("outcome matrix must be finite")
    g = _beta_averages(m, scen.probs, rp.beta)
    h = float(_r_owa(g, crit.importances, rp.r))
    return HEvaluation(g=g, h=h)


def dominates(a: HEvaluation, b: HEvaluation) -> bool:
    """Weak dominance: ``a`` is at least as good as ``b``."""
    return a.h <= b.h
