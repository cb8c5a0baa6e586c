"""Multiobjective stochastic 0/1 knapsack.

Selecting item ``i`` earns benefit ``b[i, k, j]`` under criterion ``k`` and
scenario ``j``.  To keep everything a minimization, the loss of a selection
``x`` is the value left behind: ``f[k, j] = sum_i (1 - x_i) b[i, k, j]``.

Two exact solvers are provided:

* ``solve_msp`` minimizes the risk-averse scalarization h of that loss
  matrix (best-first branch and bound);
* ``solve_naive`` minimizes its importance/probability weighted mean, which
  is an ordinary 0/1 knapsack on aggregated item values.

``compute_deltas`` and ``run_experiment`` compare the two.
"""
from __future__ import annotations

import csv
import heapq
import itertools
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import CriteriaSet, RiskParams, ScenarioSet, _h, _tail_weights

CAP_TOL = 1e-9
PRUNE_TOL = 1e-9


@dataclass(frozen=True)
class KnapsackInstance:
    weights: np.ndarray  # (I,)
    capacity: float
    benefits: np.ndarray  # (I, K, J)
    scenarios: ScenarioSet
    criteria: CriteriaSet
    seed: Optional[int] = None
    generator: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.benefits, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("weights must be a non-empty vector")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("weights must be finite and positive")
        if not (math.isfinite(self.capacity) and self.capacity > 0):
            raise ValueError("capacity must be finite and positive")
        shape = (v.size, len(self.criteria), len(self.scenarios))
        if b.shape != shape:
            raise ValueError(f"benefits have shape {b.shape}, expected {shape}")
        if not np.all(np.isfinite(b)) or np.any(b < 0):
            raise ValueError("benefits must be finite and nonnegative")
        v.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", v)
        object.__setattr__(self, "benefits", b)
        object.__setattr__(self, "capacity", float(self.capacity))

    @property
    def n_items(self) -> int:
        return self.weights.size

    @property
    def n_criteria(self) -> int:
        return len(self.criteria)

    @property
    def n_scenarios(self) -> int:
        return len(self.scenarios)

    @property
    def item_values(self) -> np.ndarray:
        """Weighted mean benefit of each item: sum_kj w_k pi_j b[i, k, j]."""
        return np.einsum(
            "ikj,k,j->i", self.benefits, self.criteria.importances, self.scenarios.probs
        )

    def to_dict(self) -> dict:
        data = {
            "weights": self.weights.tolist(),
            "capacity": self.capacity,
            "benefits": self.benefits.tolist(),
            "probs": self.scenarios.probs.tolist(),
            "importances": self.criteria.importances.tolist(),
            "seed": self.seed,
        }
        if self.generator:
            data["generator"] = dict(self.generator)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "KnapsackInstance":
        for key in ("weights", "capacity", "benefits", "probs", "importances"):
            if key not in data:
                raise ValueError(f"missing field '{key}'")
        return cls(
            weights=np.asarray(data["weights"], dtype=float),
            capacity=float(data["capacity"]),
            benefits=np.asarray(data["benefits"], dtype=float),
            scenarios=ScenarioSet(data["probs"]),
            criteria=CriteriaSet(data["importances"]),
            seed=data.get("seed"),
            generator=dict(data.get("generator") or {}),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "KnapsackInstance":
        return cls.from_dict(json.loads(text))


@dataclass
class KnapsackSolution:
    x: np.ndarray
    objective: float
    model: str
    nodes: int = 0
    wall_time: float = 0.0
    bound: float = float("nan")
    gap: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.gap <= 0.0

    def to_dict(self) -> dict:
        # wall_time deliberately left out: files must be reproducible
        return {
            "model": self.model,
            "x": [int(v) for v in self.x],
            "objective": self.objective,
            "bound": self.bound,
            "gap": self.gap,
            "nodes": self.nodes,
        }


def generate_instance(
    n_items: int,
    n_scenarios: int,
    n_criteria: int,
    seed: int,
    capacity: Optional[float] = None,
) -> KnapsackInstance:
    """Random instance with equiprobable scenarios and equally important criteria.

    A fill ratio ``p ~ U(0.25, 0.75)`` sets the mean item weight to ``1/p``;
    weights are ``U(0.5/p, 1.5/p)`` and benefits ``U(0, 1)``.  The default
    capacity is ``n_items`` so that ``p * n_items`` items fit on average.
    Draws come from ``numpy.random.default_rng(seed)`` (PCG64).
    """
    for name, n in (("n_items", n_items), ("n_scenarios", n_scenarios), ("n_criteria", n_criteria)):
        if int(n) < 1:
            raise ValueError(f"{name} must be >= 1")
    if seed is None or int(seed) < 0:
        raise ValueError("seed must be a nonnegative integer")
    rng = np.random.default_rng(int(seed))
    p = rng.uniform(0.25, 0.75)
    mean_weight = 1.0 / p
    weights = rng.uniform(0.5 * mean_weight, 1.5 * mean_weight, size=n_items)
    benefits = rng.uniform(0.0, 1.0, size=(n_items, n_criteria, n_scenarios))
    return KnapsackInstance(
        weights=weights,
        capacity=float(n_items) if capacity is None else float(capacity),
        benefits=benefits,
        scenarios=ScenarioSet.uniform(n_scenarios),
        criteria=CriteriaSet.uniform(n_criteria),
        seed=int(seed),
        generator={
            "bit_generator": "PCG64",
            "p": p,
            "capacity_rule": "n_items" if capacity is None else "explicit",
        },
    )


def _as_selection(inst: KnapsackInstance, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (inst.n_items,):
        raise ValueError(f"x has shape {x.shape}, expected ({inst.n_items},)")
    if not np.all((x == 0) | (x == 1)):
        raise ValueError("x must be binary")
    return x.astype(float)


def objective_matrix(inst: KnapsackInstance, x) -> np.ndarray:
    """(K, J) matrix of benefit left out of the knapsack."""
    x = _as_selection(inst, x)
    return np.tensordot(1.0 - x, inst.benefits, axes=1)


def msp_objective(inst: KnapsackInstance, x, rp: RiskParams) -> float:
    f = objective_matrix(inst, x)
    return float(_h(f, inst.scenarios.probs, inst.criteria.importances, rp.beta, rp.r))


def naive_objective(inst: KnapsackInstance, x) -> float:
    f = objective_matrix(inst, x)
    return float(inst.criteria.importances @ f @ inst.scenarios.probs)


def is_feasible(inst: KnapsackInstance, x) -> bool:
    x = _as_selection(inst, x)
    return float(x @ inst.weights) <= inst.capacity + CAP_TOL


class _MspBounder:
    """Lower bounds on h over the feasible completions of partial selections.

    h(F) is the largest of the linear forms <M, F> over a polytope of weight
    matrices M (scenario tail weights scaled by criterion tail weights).  For
    a fixed M, minimizing <M, F(x)> over the fractional knapsack is greedy
    and bounds h from below.  M is improved by Frank-Wolfe steps whose
    linear oracle is "the weights attaining h at the current fractional
    loss"; at convergence this is the LP relaxation bound, and every M tried
    on the way is already valid.

    All methods work on a batch of C nodes at once: ``base`` (C, KJ) is each
    node's loss if nothing more is taken, ``avail`` (C, n) marks the items
    it may still take and ``room`` (C,) its free capacity.
    """

    gammas = np.array([1.0, 0.5, 0.2, 0.05])

    def __init__(self, inst: KnapsackInstance, rp: RiskParams, iters: int = 8):
        n, k, j = inst.benefits.shape
        self.shape = (k, j)
        self.v = inst.weights
        self.cells = inst.benefits.reshape(n, k * j).T.copy()  # (KJ, n)
        self.probs = inst.scenarios.probs
        self.imps = inst.criteria.importances
        self.beta, self.r = rp.beta, rp.r
        self.iters = iters
        self.mean_weights = np.outer(self.imps, self.probs).ravel()

    def h(self, flat_cells: np.ndarray) -> np.ndarray:
        f = flat_cells.reshape(flat_cells.shape[:-1] + self.shape)
        return _h(f, self.probs, self.imps, self.beta, self.r)

    def weights_at(self, flat_cells: np.ndarray) -> np.ndarray:
        """M with <M, F> = h(F), row by row."""
        f = flat_cells.reshape(flat_cells.shape[:-1] + self.shape)
        u = _tail_weights(f, self.probs, self.beta)
        lam = _tail_weights(np.sum(u * f, axis=-1), self.imps, self.r)
        return (lam[..., None] * u).reshape(flat_cells.shape)

    def relaxed(self, ms, base, avail, room):
        """For weights ``ms`` (C, G, KJ): min over the fractional knapsack of
        <M, base - cells @ x>.  Returns values (C, G) and minimizers (C, G, n)."""
        cm = ms @ self.cells
        mask = np.broadcast_to(avail[:, None, :], cm.shape)
        ratio = np.where(mask, cm / self.v, -np.inf)
        order = np.argsort(-ratio, axis=-1, kind="stable")
        a = np.take_along_axis(mask, order, axis=-1)
        vs = self.v[order]
        wv = vs * a
        before = np.cumsum(wv, axis=-1) - wv
        frac = np.clip((room[:, None, None] - before) / vs, 0.0, 1.0) * a
        xs = np.empty_like(frac)
        np.put_along_axis(xs, order, frac, axis=-1)
        vals = np.einsum("cgk,ck->cg", ms, base) - np.sum(cm * xs, axis=-1)
        return vals, xs

    def bound(self, base, avail, room, m, target=np.inf, iters=None):
        """Best bounds reachable from starting weights ``m`` (C, KJ).

        Rows stop improving once they reach ``target``.  Returns bounds (C,),
        the weights that produced them and the matching fractional x.
        """
        iters = self.iters if iters is None else iters
        vals, xs = self.relaxed(m[:, None, :], base, avail, room)
        best, x = vals[:, 0], xs[:, 0]
        step = np.ones(len(best))
        for _ in range(iters):
            act = np.flatnonzero(best < target)
            if act.size == 0:
                break
            b_, a_, r_, m_ = base[act], avail[act], room[act], m[act]
            mp = self.weights_at(b_ - x[act] @ self.cells.T)
            g = step[act, None] * self.gammas
            ms = (1.0 - g)[..., None] * m_[:, None, :] + g[..., None] * mp[:, None, :]
            vals, xs = self.relaxed(ms, b_, a_, r_)
            pick = np.argmax(vals, axis=1)
            rows = np.arange(act.size)
            new = vals[rows, pick]
            up = new > best[act]
            best[act[up]] = new[up]
            m[act[up]] = ms[rows[up], pick[up]]
            x[act[up]] = xs[rows[up], pick[up]]
            step[act[~up]] *= 0.25
        return best, m, x


def msp_lower_bound(
    inst: KnapsackInstance, rp: RiskParams, fixed_in, fixed_out, iters: int = 50
) -> float:
    """Lower bound on h over all feasible selections that contain ``fixed_in``
    and avoid ``fixed_out`` (index collections)."""
    n = inst.n_items
    taken = np.zeros(n, dtype=bool)
    taken[list(fixed_in)] = True
    free = np.ones(n, dtype=bool)
    free[list(fixed_in)] = False
    free[list(fixed_out)] = False
    room = inst.capacity - float(inst.weights @ taken)
    if room < -CAP_TOL:
        return np.inf
    b = _MspBounder(inst, rp)
    base = b.cells @ ~taken
    avail = free & (inst.weights <= room + CAP_TOL)
    if not avail.any():
        return float(b.h(base))
    val, _, _ = b.bound(
        base[None], avail[None], np.array([room]), b.mean_weights[None].copy(), iters=iters
    )
    return float(val[0])


def solve_msp(
    inst: KnapsackInstance,
    rp: RiskParams,
    node_limit: Optional[int] = None,
    rel_gap: float = 0.0,
    batch: int = 32,
) -> KnapsackSolution:
    """Minimize h of the left-out benefit by best-first branch and bound.

    Items are fixed in decreasing order of weighted-mean benefit per unit
    weight, "take" before "leave"; items that no longer fit are left out at
    once.  Up to ``batch`` best nodes are expanded together so that their
    children are bounded in one vectorized pass.  Each child's fractional
    relaxation is also rounded to a feasible selection to improve the
    incumbent.  With ``node_limit`` the search may stop early; the solution
    then carries the best remaining bound and the relative gap.
    """
    start = time.perf_counter()
    n = inst.n_items
    cap = inst.capacity
    v = inst.weights
    bounder = _MspBounder(inst, rp)
    cells = bounder.cells
    order = np.argsort(-inst.item_values / v, kind="stable")
    undecided_at = np.ones((n + 1, n), dtype=bool)
    for lvl in range(n + 1):
        undecided_at[lvl, order[:lvl]] = False

    # greedy incumbent
    x_best = np.zeros(n, dtype=bool)
    tw = 0.0
    for i in order:
        if tw + v[i] <= cap + CAP_TOL:
            x_best[i] = True
            tw += v[i]
    best = float(bounder.h(cells @ ~x_best))

    def cutoff():
        return best - max(PRUNE_TOL, rel_gap * abs(best))

    def offer(selections: np.ndarray, losses: np.ndarray):
        nonlocal best, x_best
        if len(selections) == 0:
            return
        vals = bounder.h(losses)
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, x_best = float(vals[i]), selections[i].copy()

    counter = itertools.count()
    root_avail = v <= cap + CAP_TOL
    lb, m, _ = bounder.bound(
        cells.sum(axis=1)[None], root_avail[None], np.array([cap]),
        bounder.mean_weights[None].copy(), target=cutoff(), iters=4 * bounder.iters,
    )
    heap = [(float(lb[0]), next(counter), 0, np.zeros(n, dtype=bool), m[0])]
    nodes = 0
    stopped = False
    while heap:
        if node_limit is not None and nodes >= node_limit:
            stopped = True
            break
        popped = []
        while heap and len(popped) < batch:
            entry = heapq.heappop(heap)
            if entry[0] < cutoff():
                popped.append(entry)
        if not popped:
            break
        nodes += len(popped)

        leaves, kids = [], []
        for _, _, level, taken, m in popped:
            room = cap - float(v @ taken)
            while level < n and v[order[level]] > room + CAP_TOL:
                level += 1
            if level == n:
                leaves.append(taken)
                continue
            with_item = taken.copy()
            with_item[order[level]] = True
            kids.append((with_item, level + 1, m))
            kids.append((taken, level + 1, m))
        if leaves:
            leaves = np.array(leaves)
            offer(leaves, (~leaves) @ cells.T)
        if not kids:
            continue

        taken = np.array([k[0] for k in kids])
        levels = np.array([k[1] for k in kids])
        ms = np.array([k[2] for k in kids])
        room = cap - taken @ v
        avail = undecided_at[levels] & (v <= room[:, None] + CAP_TOL)
        base = (~taken) @ cells.T
        done = ~avail.any(axis=1)
        offer(taken[done], base[done])
        open_ = np.flatnonzero(~done)
        if open_.size == 0:
            continue
        taken, levels, room, avail, base = (
            taken[open_], levels[open_], room[open_], avail[open_], base[open_]
        )
        lbs, ms, xs = bounder.bound(base, avail, room, ms[open_], target=cutoff())

        # round each relaxation: keep its whole items, then fill greedily
        keep = taken | (xs >= 1.0 - 1e-9)
        left = room - (keep & ~taken) @ v
        cand = avail & ~keep
        ratio = np.where(cand, (ms @ cells) / v, -np.inf)
        o = np.argsort(-ratio, axis=1, kind="stable")
        wsorted = v[o] * np.take_along_axis(cand, o, axis=1)
        fill_sorted = np.take_along_axis(cand, o, axis=1) & (
            np.cumsum(wsorted, axis=1) <= left[:, None] + CAP_TOL
        )
        fill = np.zeros_like(cand)
        np.put_along_axis(fill, o, fill_sorted, axis=1)
        rounded = keep | fill
        offer(rounded, (~rounded) @ cells.T)

        for i in np.flatnonzero(lbs < cutoff()):
            heapq.heappush(heap, (float(lbs[i]), next(counter), int(levels[i]), taken[i], ms[i]))

    x_best = x_best.astype(int)
    objective = msp_objective(inst, x_best, rp)
    if stopped and heap:
        lower = min(min(e[0] for e in heap), objective)
    else:
        lower = objective
    gap = max(0.0, (objective - lower) / max(abs(objective), 1e-12))
    return KnapsackSolution(
        x=x_best,
        objective=objective,
        model="msp",
        nodes=nodes,
        wall_time=time.perf_counter() - start,
        bound=lower,
        gap=gap,
    )


def solve_naive(inst: KnapsackInstance, node_limit: Optional[int] = None) -> KnapsackSolution:
    """Exact 0/1 knapsack on aggregated item values, depth-first with the
    fractional (Dantzig) upper bound."""
    start = time.perf_counter()
    c = inst.item_values
    v = inst.weights
    cap = inst.capacity
    n = inst.n_items
    order = np.argsort(-c / v, kind="stable")
    cs, vs = c[order].tolist(), v[order].tolist()

    def upper(pos, weight, value):
        room = cap - weight
        for q in range(pos, n):
            if vs[q] <= room + CAP_TOL:
                room -= vs[q]
                value += cs[q]
            else:
                return value + cs[q] * max(room, 0.0) / vs[q]
        return value

    best_val, best_set = -1.0, ()
    stack = [(0, 0.0, 0.0, ())]
    nodes = 0
    stopped = False
    while stack:
        if node_limit is not None and nodes >= node_limit:
            stopped = True
            break
        pos, weight, value, chosen = stack.pop()
        nodes += 1
        if value > best_val:
            best_val, best_set = value, chosen
        if pos == n or upper(pos, weight, value) <= best_val + 1e-12:
            continue
        # pushed last, popped first: take
        stack.append((pos + 1, weight, value, chosen))
        if weight + vs[pos] <= cap + CAP_TOL:
            stack.append((pos + 1, weight + vs[pos], value + cs[pos], chosen + (pos,)))

    x = np.zeros(n, dtype=int)
    x[order[list(best_set)]] = 1
    objective = naive_objective(inst, x)
    total = float(c.sum())
    if stopped and stack:
        best_upper = max(upper(p, w, val) for p, w, val, _ in stack)
        lower = min(objective, total - max(best_upper, best_val))
    else:
        lower = objective
    gap = max(0.0, (objective - lower) / max(abs(objective), 1e-12))
    return KnapsackSolution(
        x=x,
        objective=objective,
        model="naive",
        nodes=nodes,
        wall_time=time.perf_counter() - start,
        bound=lower,
        gap=gap,
    )


def exhaustive_oracle(
    inst: KnapsackInstance, rp: Optional[RiskParams] = None, model: str = "msp"
) -> KnapsackSolution:
    """Enumerate all 2^I selections; for testing only (I <= 20).

    ``model="msp"`` minimizes h (needs ``rp``), ``model="naive"`` the mean.
    Among equal objectives the selection with the smallest bitmask wins.
    """
    n = inst.n_items
    if n > 20:
        raise ValueError("exhaustive enumeration is limited to 20 items")
    if model == "msp" and rp is None:
        raise ValueError("risk parameters are required for the msp model")
    if model not in ("msp", "naive"):
        raise ValueError(f"unknown model {model!r}")
    start = time.perf_counter()
    k, j = inst.n_criteria, inst.n_scenarios
    flat = inst.benefits.reshape(n, k * j)
    total = flat.sum(axis=0)
    bits = np.arange(n)
    best_val, best_mask = np.inf, 0
    chunk = 1 << 14
    for lo in range(0, 1 << n, chunk):
        masks = np.arange(lo, min(lo + chunk, 1 << n))
        xs = ((masks[:, None] >> bits) & 1).astype(float)
        ok = xs @ inst.weights <= inst.capacity + CAP_TOL
        if not ok.any():
            continue
        masks, xs = masks[ok], xs[ok]
        losses = ((1.0 - xs) @ flat).reshape(-1, k, j)
        if model == "msp":
            vals = _h(losses, inst.scenarios.probs, inst.criteria.importances, rp.beta, rp.r)
        else:
            vals = losses @ inst.scenarios.probs @ inst.criteria.importances
        i = int(np.argmin(vals))
        if vals[i] < best_val:
            best_val, best_mask = float(vals[i]), int(masks[i])
    x = ((best_mask >> bits) & 1).astype(int)
    objective = msp_objective(inst, x, rp) if model == "msp" else naive_objective(inst, x)
    return KnapsackSolution(
        x=x,
        objective=objective,
        model=model,
        nodes=1 << n,
        wall_time=time.perf_counter() - start,
        bound=objective,
    )


@dataclass(frozen=True)
class DeltaReport:
    t_msp: float
    t_mip: float
    delta_time: float
    delta_avg: float
    delta_tail: float
    z_msp: float
    z_mip: float
    f_msp_of_mip: float
    f_mip_of_msp: float
    degenerate: bool = False


def _percent(num: float, den: float):
    if abs(den) <= 1e-12:
        return (0.0, False) if abs(num) <= 1e-12 else (float("nan"), True)
    return 100.0 * num / den, False


def compute_deltas(
    inst: KnapsackInstance,
    rp: RiskParams,
    msp_sol: KnapsackSolution,
    naive_sol: KnapsackSolution,
    t_msp: Optional[float] = None,
    t_mip: Optional[float] = None,
) -> DeltaReport:
    """Cross-evaluate both optima.

    ``delta_avg`` is the percentage the risk-averse choice loses on the mean
    objective; ``delta_tail`` the percentage it gains on h.
    """
    t_msp = msp_sol.wall_time if t_msp is None else t_msp
    t_mip = naive_sol.wall_time if t_mip is None else t_mip
    z_msp = msp_objective(inst, msp_sol.x, rp)
    z_mip = naive_objective(inst, naive_sol.x)
    f_msp_of_mip = msp_objective(inst, naive_sol.x, rp)
    f_mip_of_msp = naive_objective(inst, msp_sol.x)
    d_avg, bad_avg = _percent(f_mip_of_msp - z_mip, z_mip)
    d_tail, bad_tail = _percent(f_msp_of_mip - z_msp, f_msp_of_mip)
    d_time = t_msp / t_mip if t_mip > 0 else float("inf")
    return DeltaReport(
        t_msp=t_msp,
        t_mip=t_mip,
        delta_time=d_time,
        delta_avg=d_avg,
        delta_tail=d_tail,
        z_msp=z_msp,
        z_mip=z_mip,
        f_msp_of_mip=f_msp_of_mip,
        f_mip_of_msp=f_mip_of_msp,
        degenerate=bad_avg or bad_tail,
    )


REPORT_COLUMNS = (
    "n_items", "n_scenarios", "n_criteria", "beta", "r", "seed",
    "t_msp", "t_mip", "delta_time", "delta_avg", "delta_tail", "gap",
)
TIMING_COLUMNS = ("t_msp", "t_mip", "delta_time")


@dataclass(frozen=True)
class ExperimentConfig:
    n_items: Sequence[int] = (30,)
    n_scenarios: Sequence[int] = (10,)
    n_criteria: Sequence[int] = (3,)
    betas: Sequence[float] = (0.1,)
    rs: Sequence[float] = (0.5,)
    seeds: Sequence[int] = (0,)
    exact_cap: int = 30
    node_limit: int = 200_000
    rel_gap: float = 0.0
    capacity: Optional[float] = None
    workers: int = 1


def _run_instance(task):
    (n, j, k, seed), cfg = task
    inst = generate_instance(n, j, k, seed, capacity=cfg.capacity)
    limit = None if n <= cfg.exact_cap else cfg.node_limit
    naive = solve_naive(inst, node_limit=limit)
    rows = []
    for beta, r in itertools.product(cfg.betas, cfg.rs):
        rp = RiskParams(beta, r)
        msp = solve_msp(inst, rp, node_limit=limit, rel_gap=cfg.rel_gap)
        d = compute_deltas(inst, rp, msp, naive)
        rows.append({
            "n_items": n, "n_scenarios": j, "n_criteria": k,
            "beta": float(beta), "r": float(r), "seed": seed,
            "t_msp": d.t_msp, "t_mip": d.t_mip, "delta_time": d.delta_time,
            "delta_avg": d.delta_avg, "delta_tail": d.delta_tail,
            "gap": max(msp.gap, naive.gap),
        })
    return rows


def worker_count(requested: int) -> int:
    env = os.environ.get("RISKOWA_THREADS")
    n = max(1, int(requested))
    if env:
        n = min(n, max(1, int(env)))
    return n


def run_experiment(cfg: ExperimentConfig) -> list:
    """Full factorial run; one row per (instance, beta, r).

    Each (n_items, n_scenarios, n_criteria, seed) instance is generated once
    and shared by all (beta, r) pairs.  Rows come back in configuration order
    whatever the number of workers.
    """
    tasks = [
        (key, cfg)
        for key in itertools.product(cfg.n_items, cfg.n_scenarios, cfg.n_criteria, cfg.seeds)
    ]
    workers = worker_count(cfg.workers)
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_run_instance, tasks))
    else:
        chunks = [_run_instance(t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def write_report_csv(rows, fh, include_timings: bool = True) -> None:
    cols = [c for c in REPORT_COLUMNS if include_timings or c not in TIMING_COLUMNS]
    out = csv.writer(fh, lineterminator="\n")
    out.writerow(cols)
    for row in rows:
        out.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in cols])
