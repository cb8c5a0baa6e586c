"""Acceptance criteria, one test per criterion.

Each test carries a ``criterion`` mark; conftest prints a PASS/FAIL line per
criterion at the end of the run.
"""
import json
import statistics
import time
from pathlib import Path

import numpy as np
import pytest

from riskowa.cli import main as cli_main
from riskowa.core import (
    CriteriaSet,
    RiskParams,
    ScenarioSet,
    beta_average,
    evaluate_h,
    r_owa,
    r_owa_polytope_oracle,
)
from riskowa.datasets import dominated_example, illustrative_example
from riskowa.enumeration import solve_enumeration
from riskowa.export import build_lp_model, continuous_optimum, parse_lp_text, write_lp_text
from riskowa.knapsack import (
    compute_deltas,
    exhaustive_oracle,
    generate_instance,
    msp_objective,
    solve_msp,
    solve_naive,
)

DATA = Path(__file__).parent / "data"
VALUES = [10, 7, 4, 3, 2]
MASS = [0.2, 0.1, 0.3, 0.25, 0.15]

PRINTED_G = {
    "alt1": [0.793, 0.580, 0.900, 0.833, 0.930, 0.728],
    "alt2": [0.930, 0.832, 0.703, 0.820, 0.660, 0.770],
    "alt3": [0.765, 0.775, 0.468, 0.643, 0.950, 0.883],
    "alt4": [0.993, 0.760, 0.473, 0.773, 0.820, 0.990],
}
PRINTED_H = {"alt1": 0.927, "alt2": 0.930, "alt3": 0.943, "alt4": 0.993}


@pytest.mark.criterion("AC1", "beta-average small example: 10, 9, 7")
def test_ac1_beta_average_table():
    for beta, want in [(0.2, 10), (0.3, 9), (0.5, 7)]:
        t0 = time.perf_counter()
        got = beta_average(VALUES, MASS, beta)
        elapsed = time.perf_counter() - t0
        assert abs(got - want) <= 1e-9
        assert elapsed < 1e-3


@pytest.mark.criterion("AC2", "r-OWA small example: 10, 9, 7")
def test_ac2_r_owa_table():
    for r, want in [(0.2, 10), (0.3, 9), (0.5, 7)]:
        assert abs(r_owa(VALUES, MASS, r) - want) <= 1e-9


@pytest.mark.criterion("AC3", "four-alternative example: 24 g values, 4 h values, winner")
@pytest.mark.xfail(
    strict=True,
    reason="at r=0.17 h(alt1)=0.926471 and h(alt3)=0.942157 miss the printed "
    "0.927/0.943 by more than 5e-4; the printed values correspond to r=1/6",
)
def test_ac3_illustrative_example():
    alts = illustrative_example()
    rp = RiskParams(0.3, 0.17)
    res = solve_enumeration(alts, rp)
    for name, ev in zip(alts.names, res.evaluations):
        assert np.max(np.abs(ev.g - PRINTED_G[name])) <= 5e-4, name
    assert res.winner == "alt1"
    for name, ev in zip(alts.names, res.evaluations):
        assert abs(ev.h - PRINTED_H[name]) <= 5e-4, (name, ev.h)


@pytest.mark.criterion("AC4", "dominated pair: h = 0.725 twice, second phase picks alt1")
def test_ac4_dominated_example():
    alts = dominated_example()
    res = solve_enumeration(alts, RiskParams(0.5, 2 / 3))
    assert np.all(np.abs(res.h - 0.725) <= 1e-9)
    assert res.argmin == [0, 1]
    assert res.winner == "alt1"


@pytest.mark.criterion("AC5", "B&B solvers equal exhaustive enumeration on 50 instances, < 60 s")
def test_ac5_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    for seed in range(50):
        n = int(rng.integers(1, 16))
        j = int(rng.integers(1, 11))
        k = int(rng.integers(1, 5))
        inst = generate_instance(n, j, k, seed)
        rp = RiskParams(float(rng.choice([0.05, 0.1, 0.3, 0.5, 1.0])),
                        float(rng.choice([0.2, 0.33, 0.5, 1.0])))
        msp = solve_msp(inst, rp)
        assert abs(msp.objective - exhaustive_oracle(inst, rp).objective) <= 1e-9, seed
        naive = solve_naive(inst)
        assert abs(naive.objective - exhaustive_oracle(inst, model="naive").objective) <= 1e-9, seed
    assert time.perf_counter() - t0 < 60


@pytest.mark.criterion("AC6", "r-OWA equals the polytope maximum on 200 random cases")
def test_ac6_polytope_oracle():
    rng = np.random.default_rng(6)
    for _ in range(200):
        k = int(rng.integers(1, 7))
        vals = rng.choice([rng.uniform(-5, 5, k), rng.integers(0, 3, k).astype(float)])
        w = rng.dirichlet(np.ones(k))
        r = float(rng.uniform(0.01, 1.0))
        crit = CriteriaSet(w / w.sum())
        assert abs(r_owa(vals, crit, r) - r_owa_polytope_oracle(vals, crit, r)) <= 1e-9


@pytest.mark.criterion("AC7", "h nonincreasing in beta and in r on 100 random matrices")
def test_ac7_monotonicity():
    rng = np.random.default_rng(7)
    grid = np.round(np.arange(1, 21) * 0.05, 10)
    for _ in range(100):
        k, j = rng.integers(1, 7, size=2)
        m = rng.uniform(0, 1, (k, j))
        scen = ScenarioSet(rng.dirichlet(np.ones(j)))
        crit = CriteriaSet(rng.dirichlet(np.ones(k)))
        fixed = float(rng.choice(grid))
        along_beta = [evaluate_h(m, scen, crit, RiskParams(b, fixed)).h for b in grid]
        along_r = [evaluate_h(m, scen, crit, RiskParams(fixed, r)).h for r in grid]
        assert np.all(np.diff(along_beta) <= 1e-12)
        assert np.all(np.diff(along_r) <= 1e-12)


@pytest.mark.criterion("AC8", "equiprobable beta-average equals mean of the beta*J largest")
def test_ac8_cvar_coincidence():
    rng = np.random.default_rng(8)
    scen = ScenarioSet.uniform(10)
    for _ in range(50):
        row = rng.normal(size=10)
        top = np.sort(row)[::-1]
        for n in range(1, 11):
            assert abs(beta_average(row, scen, n / 10) - top[:n].mean()) <= 1e-12


@pytest.mark.criterion("AC9", "delta signs on 30 instances (30 items, 10 scen., 3 crit.)")
def test_ac9_delta_signs():
    fixture = json.loads((DATA / "ac9_batch.json").read_text())
    rp = RiskParams(0.1, 0.5)
    avg, tail = [], []
    for seed in range(30):
        inst = generate_instance(30, 10, 3, seed)
        msp, naive = solve_msp(inst, rp), solve_naive(inst)
        assert msp.optimal and naive.optimal
        d = compute_deltas(inst, rp, msp, naive)
        assert d.delta_avg >= -1e-7 and d.delta_tail >= -1e-7, seed
        avg.append(d.delta_avg)
        tail.append(d.delta_tail)
    med_avg, med_tail = statistics.median(avg), statistics.median(tail)
    print(f"median delta_avg {med_avg:.4f}  median delta_tail {med_tail:.4f}")
    assert med_tail >= med_avg
    assert med_avg == pytest.approx(fixture["median_delta_avg"], abs=1e-9)
    assert med_tail == pytest.approx(fixture["median_delta_tail"], abs=1e-9)


@pytest.mark.criterion("AC10", "LP export: golden bytes, re-parse, closed form = h on 20 pairs")
def test_ac10_lp_export():
    model = build_lp_model(generate_instance(5, 3, 2, 11), RiskParams(0.3, 0.5))
    text = write_lp_text(model)
    assert text == (DATA / "export_5items.lp").read_text()
    assert parse_lp_text(text) == model
    rng = np.random.default_rng(10)
    for seed in range(20):
        inst = generate_instance(int(rng.integers(1, 9)), int(rng.integers(1, 8)),
                                 int(rng.integers(1, 5)), 100 + seed)
        rp = RiskParams(float(rng.uniform(0.05, 1)), float(rng.uniform(0.05, 1)))
        x = rng.integers(0, 2, inst.n_items)
        value, _ = continuous_optimum(inst, rp, x)
        assert abs(value - msp_objective(inst, x, rp)) <= 1e-9


@pytest.mark.criterion("AC11", "gen + solve + experiment reruns are byte-identical")
def test_ac11_determinism(tmp_path, capsys):
    outputs = []
    for run in ("a", "b"):
        d = tmp_path / run
        d.mkdir()
        assert cli_main(["gen", "--items", "12", "--scenarios", "5", "--criteria", "3",
                         "--seed", "7", "-o", str(d / "inst.json")]) == 0
        assert cli_main(["solve", str(d / "inst.json"), "--both", "--beta", "0.1",
                         "--r", "0.5", "-o", str(d / "sol.json")]) == 0
        assert cli_main(["experiment", "--items", "10,12", "--seeds", "0-2", "--betas", "0.1,0.5",
                         "--no-timings", "-o", str(d / "exp.csv")]) == 0
        outputs.append([(d / f).read_bytes() for f in ("inst.json", "sol.json", "exp.csv")])
        outputs[-1].append(capsys.readouterr().out.encode())
    assert outputs[0] == outputs[1]
