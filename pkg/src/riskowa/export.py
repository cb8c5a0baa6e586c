"""The knapsack model as a mixed-integer linear program.

Both tail operators are minima of piecewise-linear convex functions,

    beta-average(f) = min_t  t + (1/beta) * sum_j p_j (f_j - t)^+
    r-OWA(g)        = min_s  s + (1/r)    * sum_k w_k (g_k - s)^+

and h is increasing in every g_k, so minimizing h over a feasible set can
be written with one free threshold per operator plus nonnegative excess
variables:

    min  z + sum_k (w_k / r) v_k
    s.t. z + v_k - zk_k - sum_j (p_j / beta) y_kj >= 0        (owa_k)
         zk_k + y_kj + sum_i b_ikj x_i >= sum_i b_ikj         (beta_k_j)
         sum_i v_i x_i <= V                                    (cap)
         z, zk_k free;  v_k, y_kj >= 0;  x_i binary

Here ``v_k`` is the excess variable of criterion k, unrelated to the item
weight ``v_i`` in the capacity row.  The duals of the ``owa`` and ``beta``
rows are the rank weights that the tail operators assign.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Tuple

import numpy as np

from .core import RiskParams, _descending_order
from .knapsack import KnapsackInstance, objective_matrix

SENSES = ("<=", ">=", "=")


@dataclass(frozen=True)
class LinearRow:
    name: str
    terms: Tuple[Tuple[str, float], ...]
    sense: str
    rhs: float


@dataclass(frozen=True)
class LpModel:
    """A minimization model.  Variables are nonnegative unless listed in
    ``free``; ``binaries`` are 0/1."""

    variables: Tuple[str, ...]
    objective: Tuple[Tuple[str, float], ...]
    rows: Tuple[LinearRow, ...]
    free: Tuple[str, ...]
    binaries: Tuple[str, ...]

    def dense(self):
        """``(c, A, lo, hi, var_lo, var_hi, integrality)`` with row bounds
        ``lo <= A y <= hi``, in the order of ``variables``."""
        col = {name: i for i, name in enumerate(self.variables)}
        n = len(self.variables)
        c = np.zeros(n)
        for name, coef in self.objective:
            c[col[name]] += coef
        a = np.zeros((len(self.rows), n))
        lo = np.full(len(self.rows), -np.inf)
        hi = np.full(len(self.rows), np.inf)
        for i, row in enumerate(self.rows):
            for name, coef in row.terms:
                a[i, col[name]] += coef
            if row.sense in (">=", "="):
                lo[i] = row.rhs
            if row.sense in ("<=", "="):
                hi[i] = row.rhs
        var_lo = np.zeros(n)
        var_hi = np.full(n, np.inf)
        integrality = np.zeros(n, dtype=int)
        for name in self.free:
            var_lo[col[name]] = -np.inf
        for name in self.binaries:
            var_hi[col[name]] = 1.0
            integrality[col[name]] = 1
        return c, a, lo, hi, var_lo, var_hi, integrality


def _names(k: int, j: int, n: int):
    vs = [f"v_k{a + 1}" for a in range(k)]
    zks = [f"zk_k{a + 1}" for a in range(k)]
    ys = [[f"y_k{a + 1}_j{b + 1}" for b in range(j)] for a in range(k)]
    xs = [f"x_i{i + 1}" for i in range(n)]
    return vs, zks, ys, xs


def build_lp_model(inst: KnapsackInstance, rp: RiskParams) -> LpModel:
    n, k, j = inst.benefits.shape
    probs = inst.scenarios.probs
    imps = inst.criteria.importances
    vs, zks, ys, xs = _names(k, j, n)

    objective = [("z", 1.0)] + [
        (vs[a], float(imps[a] / rp.r)) for a in range(k) if imps[a] != 0
    ]
    rows = []
    for a in range(k):
        terms = [("z", 1.0), (vs[a], 1.0), (zks[a], -1.0)]
        terms += [(ys[a][b], -float(probs[b] / rp.beta)) for b in range(j) if probs[b] != 0]
        rows.append(LinearRow(f"owa_k{a + 1}", tuple(terms), ">=", 0.0))
    for a in range(k):
        for b in range(j):
            col = inst.benefits[:, a, b]
            terms = [(zks[a], 1.0), (ys[a][b], 1.0)]
            terms += [(xs[i], float(col[i])) for i in range(n) if col[i] != 0]
            rows.append(LinearRow(f"beta_k{a + 1}_j{b + 1}", tuple(terms), ">=", float(col.sum())))
    rows.append(LinearRow(
        "cap", tuple((xs[i], float(inst.weights[i])) for i in range(n)), "<=", float(inst.capacity)
    ))
    variables = ["z", *vs, *zks, *(y for row in ys for y in row), *xs]
    return LpModel(
        variables=tuple(variables),
        objective=tuple(objective),
        rows=tuple(rows),
        free=("z", *zks),
        binaries=tuple(xs),
    )


def _num(x: float) -> str:
    return format(x, ".17g")


def _term_lines(terms):
    out = []
    for name, coef in terms:
        sign = "-" if coef < 0 else "+"
        out.append(f"   {sign} {_num(abs(coef))} {name}")
    return out


def write_lp_text(model: LpModel) -> str:
    """CPLEX LP text, one term per line, 17 significant digits."""
    lines = ["Minimize", " obj:"]
    lines += _term_lines(model.objective)
    lines.append("Subject To")
    for row in model.rows:
        lines.append(f" {row.name}:")
        lines += _term_lines(row.terms)
        lines.append(f"   {row.sense} {_num(row.rhs)}")
    lines.append("Bounds")
    lines += [f" {name} free" for name in model.free]
    lines.append("Binaries")
    lines += [f" {name}" for name in model.binaries]
    lines.append("End")
    return "\n".join(lines) + "\n"


_SECTION = {"minimize": "obj", "subject to": "rows", "bounds": "bounds", "binaries": "bin", "end": "end"}
_LABEL = re.compile(r"^([A-Za-z_][\w.]*)\s*:\s*(.*)$")


def _parse_terms(tokens):
    terms, sign, coef = [], 1.0, None
    for tok in tokens:
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
            coef = None
        elif coef is None and re.fullmatch(r"[0-9.eE+-]+", tok):
            coef = float(tok)
        else:
            terms.append((tok, sign * (1.0 if coef is None else coef)))
            sign, coef = 1.0, None
    return tuple(terms)


def parse_lp_text(text: str) -> LpModel:
    """Read back the subset of the LP format that ``write_lp_text`` emits."""
    section = None
    obj_tokens = []
    rows = []  # [name, tokens]
    free, binaries = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        key = line.lower()
        if key in _SECTION:
            section = _SECTION[key]
            continue
        if section == "obj":
            m = _LABEL.match(line)
            obj_tokens += (m.group(2) if m else line).split()
        elif section == "rows":
            m = _LABEL.match(line)
            if m:
                rows.append([m.group(1), m.group(2).split()])
            elif rows:
                rows[-1][1] += line.split()
            else:
                raise ValueError(f"constraint without a name: {line!r}")
        elif section == "bounds":
            parts = line.split()
            if len(parts) != 2 or parts[1].lower() != "free":
                raise ValueError(f"unsupported bound: {line!r}")
            free.append(parts[0])
        elif section == "bin":
            binaries += line.split()
        else:
            raise ValueError(f"unexpected line: {line!r}")
    if section != "end":
        raise ValueError("missing End")

    parsed = []
    for name, tokens in rows:
        where = [i for i, t in enumerate(tokens) if t in SENSES]
        if len(where) != 1 or where[0] != len(tokens) - 2:
            raise ValueError(f"row {name}: expected '<sense> <rhs>' at the end")
        parsed.append(LinearRow(name, _parse_terms(tokens[:-2]), tokens[-2], float(tokens[-1])))
    objective = _parse_terms(obj_tokens)

    seen: Dict[str, None] = {}
    for name, _ in objective:
        seen.setdefault(name)
    for row in parsed:
        for name, _ in row.terms:
            seen.setdefault(name)
    for name in (*free, *binaries):
        seen.setdefault(name)
    return LpModel(
        variables=_canonical_order(list(seen)),
        objective=objective,
        rows=tuple(parsed),
        free=tuple(free),
        binaries=tuple(binaries),
    )


def _canonical_order(names):
    # z, v_k*, zk_k*, y_k*_j*, x_i*, then anything else in order of appearance
    def key(pos_name):
        pos, name = pos_name
        nums = tuple(int(d) for d in re.findall(r"\d+", name))
        for rank, prefix in enumerate(("z", "v_k", "zk_k", "y_k", "x_i")):
            if name == "z" and prefix == "z":
                return (0, (), pos)
            if prefix != "z" and name.startswith(prefix) and nums:
                return (rank, nums, pos)
        return (5, (), pos)

    return tuple(name for _, name in sorted(enumerate(names), key=key))


def _threshold(values: np.ndarray, mass: np.ndarray, level: float) -> np.ndarray:
    """Per row, the value at which cumulative tail mass first reaches ``level``."""
    order = _descending_order(values, mass)
    cum = np.cumsum(mass[order], axis=-1)
    idx = np.minimum(np.argmax(cum >= level - 1e-12, axis=-1), values.shape[-1] - 1)
    hit = np.any(cum >= level - 1e-12, axis=-1)
    idx = np.where(hit, idx, values.shape[-1] - 1)
    sorted_vals = np.take_along_axis(values, order, axis=-1)
    return np.take_along_axis(sorted_vals, idx[..., None], axis=-1)[..., 0]


def continuous_optimum(inst: KnapsackInstance, rp: RiskParams, x) -> Tuple[float, dict]:
    """Optimal continuous part of the model for a fixed selection ``x``.

    Thresholds sit at the order statistic where the tail mass is reached and
    the excess variables are the positive parts above them.  Returns the
    objective value and the variable assignment.
    """
    f = objective_matrix(inst, x)
    probs = inst.scenarios.probs
    imps = inst.criteria.importances
    zk = _threshold(f, probs, rp.beta)
    y = np.maximum(f - zk[:, None], 0.0)
    g = zk + y @ probs / rp.beta
    z = float(_threshold(g, imps, rp.r))
    v = np.maximum(g - z, 0.0)
    value = z + float(imps @ v) / rp.r

    k, j = f.shape
    vs, zks, ys, xs = _names(k, j, inst.n_items)
    sol = {"z": z}
    sol.update(zip(vs, v.tolist()))
    sol.update(zip(zks, zk.tolist()))
    for a in range(k):
        sol.update(zip(ys[a], y[a].tolist()))
    sol.update(zip(xs, (int(t) for t in np.asarray(x))))
    return value, sol
