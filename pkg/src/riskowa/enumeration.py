"""Solving over an explicit, finite list of alternatives."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .core import TOL, CriteriaSet, HEvaluation, RiskParams, ScenarioSet, evaluate_h


@dataclass(frozen=True)
class AlternativeSet:
    names: list
    matrices: np.ndarray  # (A, K, J)
    scenarios: ScenarioSet
    criteria: CriteriaSet

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=float)
        if mats.ndim != 3 or mats.shape[0] == 0:
            raise ValueError("need at least one alternative with a K x J matrix")
        if len(self.names) != mats.shape[0]:
            raise ValueError("one name per alternative is required")
        if mats.shape[1:] != (len(self.criteria), len(self.scenarios)):
            raise ValueError(
                f"matrices are {mats.shape[1]}x{mats.shape[2]}, expected "
                f"{len(self.criteria)}x{len(self.scenarios)} (criteria x scenarios)"
            )
        if not np.all(np.isfinite(mats)):
            raise ValueError("matrices must be finite")
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)
        object.__setattr__(self, "names", list(self.names))

    def __len__(self) -> int:
        return self.matrices.shape[0]

    @classmethod
    def from_dict(cls, data: dict) -> "AlternativeSet":
        """Build from the JSON layout used on disk::

            {"probs": [...], "importances": [...],
             "alternatives": [{"name": "a", "values": [[...K rows of J...]]}, ...]}
        """
        for key in ("probs", "importances", "alternatives"):
            if key not in data:
                raise ValueError(f"missing field '{key}'")
        alts = data["alternatives"]
        if not isinstance(alts, list) or not alts:
            raise ValueError("field 'alternatives' must be a non-empty list")
        try:
            names = [str(a["name"]) for a in alts]
            mats = [np.asarray(a["values"], dtype=float) for a in alts]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed entry in 'alternatives': {exc}") from None
        if len({m.shape for m in mats}) != 1:
            raise ValueError("all alternatives must share one K x J shape")
        return cls(
            names=names,
            matrices=np.array(mats),
            scenarios=ScenarioSet(data["probs"]),
            criteria=CriteriaSet(data["importances"]),
        )

    def to_dict(self) -> dict:
        return {
            "probs": self.scenarios.probs.tolist(),
            "importances": self.criteria.importances.tolist(),
            "alternatives": [
                {"name": n, "values": m.tolist()}
                for n, m in zip(self.names, self.matrices)
            ],
        }


@dataclass(frozen=True)
class RankedResult:
    names: list
    evaluations: list
    argmin: list
    representative: int

    @property
    def h(self) -> np.ndarray:
        return np.array([e.h for e in self.evaluations])

    @property
    def winner(self) -> str:
        return self.names[self.representative]

    @property
    def optimal_h(self) -> float:
        return self.evaluations[self.representative].h


@dataclass(frozen=True)
class SweepGrid:
    betas: list
    rs: list
    winners: np.ndarray  # (len(betas), len(rs)) alternative indices
    values: np.ndarray  # optimal h per cell
    names: list = field(default_factory=list)

    def rows(self):
        for a, beta in enumerate(self.betas):
            for b, r in enumerate(self.rs):
                idx = int(self.winners[a, b])
                name = self.names[idx] if self.names else str(idx)
                yield beta, r, name, float(self.values[a, b])

    def to_csv(self) -> str:
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["beta", "r", "winner", "h"])
        for beta, r, name, h in self.rows():
            out.writerow([repr(float(beta)), repr(float(r)), name, repr(h)])
        return buf.getvalue()


def normalize(alts: AlternativeSet) -> AlternativeSet:
    """Min-max rescale each criterion to [0, 1] across all alternatives and
    scenarios.  Constant criteria are left as they are."""
    m = alts.matrices
    lo = m.min(axis=(0, 2), keepdims=True)
    hi = m.max(axis=(0, 2), keepdims=True)
    span = hi - lo
    varying = span > 0
    scaled = np.where(varying, (m - lo) / np.where(varying, span, 1.0), m)
    return replace(alts, matrices=scaled)


def pareto_dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """``a`` is no worse everywhere and strictly better somewhere (minimizing)."""
    return bool(np.all(a <= b) and np.any(a < b))


def second_phase(tied: Sequence[HEvaluation]) -> int:
    """Pick an efficient member of a set of h-ties.

    Ties whose beta-average vector is Pareto-dominated by another tie are
    dropped; among the rest the smallest sum of beta-averages wins, then the
    lowest position.
    """
    if not tied:
        raise ValueError("no candidates")
    gs = [np.asarray(t.g) for t in tied]
    survivors = [
        i
        for i, gi in enumerate(gs)
        if not any(pareto_dominates(gj, gi) for j, gj in enumerate(gs) if j != i)
    ]
    return min(survivors, key=lambda i: (float(np.sum(gs[i])), i))


def solve_enumeration(
    alts: AlternativeSet, rp: RiskParams, normalize_first: bool = False
) -> RankedResult:
    if len(alts) == 0:
        raise ValueError("empty alternative set")
    if normalize_first:
        alts = normalize(alts)
    evals = [evaluate_h(m, alts.scenarios, alts.criteria, rp) for m in alts.matrices]
    hs = np.array([e.h for e in evals])
    best = hs.min()
    argmin = [int(i) for i in np.flatnonzero(hs <= best + TOL)]
    pick = second_phase([evals[i] for i in argmin])
    return RankedResult(
        names=list(alts.names),
        evaluations=evals,
        argmin=argmin,
        representative=argmin[pick],
    )


def sweep(
    alts: AlternativeSet,
    betas: Iterable[float],
    rs: Iterable[float],
    normalize_first: bool = False,
) -> SweepGrid:
    """Solve every (beta, r) cell of a grid."""
    betas, rs = [float(b) for b in betas], [float(r) for r in rs]
    if not betas or not rs:
        raise ValueError("beta and r grids must be non-empty")
    if normalize_first:
        alts = normalize(alts)
    winners = np.zeros((len(betas), len(rs)), dtype=int)
    values = np.zeros((len(betas), len(rs)))
    for a, beta in enumerate(betas):
        for b, r in enumerate(rs):
            res = solve_enumeration(alts, RiskParams(beta, r))
            winners[a, b] = res.representative
            values[a, b] = res.optimal_h
    return SweepGrid(betas=betas, rs=rs, winners=winners, values=values, names=list(alts.names))
