import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from riskowa.core import (
    CriteriaSet,
    HEvaluation,
    RiskParams,
    ScenarioSet,
    beta_average,
    dominates,
    evaluate_h,
    owa_weights,
    r_owa,
    r_owa_polytope_oracle,
    r_owa_weights,
)
from riskowa.datasets import illustrative_example

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
level = st.floats(1e-3, 1.0)


@st.composite
def measure(draw, n):
    raw = draw(arrays(float, n, elements=st.floats(0.0, 1.0)))
    # keep some zeros and some ties in the mix
    raw = np.where(raw < 0.05, 0.0, np.round(raw, 1))
    if raw.sum() == 0:
        raw[0] = 1.0
    return raw / raw.sum()


@st.composite
def vector_case(draw, max_n=8):
    n = draw(st.integers(1, max_n))
    vals = draw(arrays(float, n, elements=st.integers(-3, 3).map(float) | finite))
    return vals, draw(measure(n)), draw(level)


# -- worked values --------------------------------------------------------

def test_illustrative_g_first_criterion():
    row = [0.51, 0.58, 0.48, 0.76, 0.86]
    assert beta_average(row, [0.15, 0.20, 0.30, 0.25, 0.10], 0.3) == pytest.approx(
        (0.1 * 0.86 + 0.2 * 0.76) / 0.3, abs=1e-12
    )


def test_beta_one_is_expectation():
    p = np.array([0.15, 0.20, 0.30, 0.25, 0.10])
    row = np.array([3.0, -1.0, 2.5, 0.0, 7.0])
    assert beta_average(row, p, 1.0) == pytest.approx(row @ p, abs=1e-12)


def test_owa_weights_sorted_example():
    w = owa_weights([0.2, 0.1, 0.3, 0.25, 0.15], 0.5)
    np.testing.assert_allclose(w.lambdas, [0.4, 0.2, 0.4, 0, 0], atol=1e-12)
    assert w.cutoff_index == 2
    np.testing.assert_allclose(w.cumulative, [0.2, 0.3, 0.6, 0.85, 1.0])


def test_owa_weights_special_levels():
    imps = [0.1, 0.4, 0.2, 0.3]
    np.testing.assert_allclose(owa_weights(imps, 1.0).lambdas, imps, atol=1e-12)
    np.testing.assert_allclose(owa_weights([0.25] * 4, 0.25).lambdas, [1, 0, 0, 0], atol=1e-12)


def test_r_owa_weights_record_the_order():
    w = r_owa_weights([1.0, 5.0, 3.0], [0.5, 0.25, 0.25], 0.5)
    assert list(w.order) == [1, 2, 0]
    np.testing.assert_allclose(w.lambdas, [0.5, 0.5, 0.0])


def test_r_owa_dominated_example_value():
    assert r_owa([0.8, 0.4, 0.65], CriteriaSet.uniform(3), 2 / 3) == pytest.approx(0.725, abs=1e-12)


def test_single_cell_matrix():
    ev = evaluate_h([[4.2]], [1.0], [1.0], RiskParams(0.3, 0.6))
    assert ev.h == 4.2 and list(ev.g) == [4.2]


def test_illustrative_reproduces_printed_h_at_one_sixth():
    # The printed h column is matched exactly by r = 1/6 (shown rounded as 0.17).
    alts = illustrative_example()
    rp = RiskParams(0.3, 1 / 6)
    hs = [evaluate_h(m, alts.scenarios, alts.criteria, rp).h for m in alts.matrices]
    np.testing.assert_allclose(hs, [0.927, 0.930, 0.943, 0.993], atol=5e-4)


def test_illustrative_at_017_exact_values():
    alts = illustrative_example()
    ev = evaluate_h(alts.matrices[0], alts.scenarios, alts.criteria, RiskParams(0.3, 0.17))
    # worst criterion 0.93 (importance 0.15), then 0.02 of the 0.90 one
    assert ev.h == pytest.approx((0.15 * 0.93 + 0.02 * 0.90) / 0.17, abs=1e-12)


def test_dominates_relation():
    a, b = HEvaluation(np.zeros(1), 0.927), HEvaluation(np.zeros(1), 0.930)
    assert dominates(a, b) and not dominates(b, a)
    assert dominates(a, a)
    c = HEvaluation(np.zeros(1), 0.725)
    d = HEvaluation(np.ones(1), 0.725)
    assert dominates(c, d) and dominates(d, c)


# -- validation -------------------------------------------------------------

@pytest.mark.parametrize("bad", [0.0, -0.1, 1.5, float("nan")])
def test_levels_rejected(bad):
    with pytest.raises(ValueError, match=r"beta must be in \(0,1\]"):
        RiskParams(bad, 0.5)
    with pytest.raises(ValueError, match=r"r must be in \(0,1\]"):
        RiskParams(0.5, bad)


@pytest.mark.parametrize("probs", [[0.5, 0.4], [1.2, -0.2], [], [np.nan, 1.0], [[0.5, 0.5]]])
def test_bad_measures_rejected(probs):
    with pytest.raises(ValueError):
        ScenarioSet(probs)


def test_measure_tolerance_is_tight():
    ScenarioSet([0.5, 0.5 + 5e-10])
    with pytest.raises(ValueError):
        ScenarioSet([0.5, 0.5 + 5e-9])


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="scenarios"):
        beta_average([1, 2, 3], [0.5, 0.5], 0.5)
    with pytest.raises(ValueError, match="criteria"):
        evaluate_h(np.ones((2, 3)), ScenarioSet.uniform(3), CriteriaSet.uniform(3), RiskParams(1, 1))


def test_polytope_oracle_size_limit():
    with pytest.raises(ValueError):
        r_owa_polytope_oracle(np.zeros(11), CriteriaSet.uniform(11), 0.5)


# -- properties ---------------------------------------------------------------

@given(vector_case(), st.randoms(use_true_random=False))
def test_tie_independence(case, rnd):
    vals, w, lvl = case
    vals = np.round(vals)  # plenty of ties
    # relabel the entries; each value keeps its own weight
    perm = list(range(vals.size))
    rnd.shuffle(perm)
    a = beta_average(vals, w, lvl)
    b = beta_average(vals[perm], w[perm], lvl)
    assert a == pytest.approx(b, abs=1e-12)
    assert r_owa(vals, w, lvl) == pytest.approx(r_owa(vals[perm], w[perm], lvl), abs=1e-12)


@given(st.integers(2, 8), st.data())
def test_tied_entries_are_interchangeable_bitwise(n, data):
    vals = np.array(data.draw(st.lists(st.sampled_from([0.1, 0.7, 2.0]), min_size=n, max_size=n)))
    w = np.full(n, 1.0 / n)
    lvl = data.draw(level)
    base = r_owa(vals, w, lvl)
    for v in np.unique(vals):
        idx = np.flatnonzero(vals == v)
        perm = np.arange(n)
        perm[idx] = idx[::-1]
        assert r_owa(vals[perm], w, lvl) == base
        assert beta_average(vals[perm], w, lvl) == beta_average(vals, w, lvl)


@given(vector_case(), st.floats(0, 10), st.floats(-10, 10))
def test_affine_equivariance(case, c, d):
    vals, w, lvl = case
    scale = 1 + np.abs(vals).max() * c + abs(d)
    for op in (beta_average, r_owa):
        assert op(c * vals + d, w, lvl) == pytest.approx(c * op(vals, w, lvl) + d, abs=1e-9 * scale)


@given(vector_case())
def test_bounds(case):
    vals, w, lvl = case
    for op in (beta_average, r_owa):
        got = op(vals, w, lvl)
        assert vals.min() - 1e-9 <= got <= vals.max() + 1e-9


@given(vector_case(), level)
def test_monotone_in_level(case, other):
    vals, w, lvl = case
    lo, hi = sorted((lvl, other))
    assert beta_average(vals, w, hi) <= beta_average(vals, w, lo) + 1e-9


@given(st.integers(1, 12), st.data())
def test_cvar_coincidence(j, data):
    row = data.draw(arrays(float, j, elements=finite))
    n = data.draw(st.integers(1, j))
    top = np.sort(row)[::-1][:n]
    assert beta_average(row, ScenarioSet.uniform(j), n / j) == pytest.approx(top.mean(), abs=1e-9)


@given(vector_case())
def test_special_owa_levels(case):
    vals, w, _ = case
    assert r_owa(vals, w, 1.0) == pytest.approx(vals @ w, abs=1e-9)
    positive = w[w > 0]
    assert r_owa(vals, w, float(positive.min())) == pytest.approx(vals[w > 0].max(), abs=1e-9)


@given(st.integers(1, 8), st.data())
def test_n_centrum(k, data):
    vals = data.draw(arrays(float, k, elements=finite))
    n = data.draw(st.integers(1, k))
    assert r_owa(vals, CriteriaSet.uniform(k), n / k) == pytest.approx(
        np.sort(vals)[::-1][:n].mean(), abs=1e-9
    )


@settings(max_examples=200)
@given(vector_case(max_n=6))
def test_polytope_oracle_agrees(case):
    vals, w, lvl = case
    assert r_owa(vals, w, lvl) == pytest.approx(r_owa_polytope_oracle(vals, w, lvl), abs=1e-9)


def test_polytope_oracle_constant_vector():
    assert r_owa_polytope_oracle([3.0] * 4, [0.1, 0.2, 0.3, 0.4], 0.35) == pytest.approx(3.0)


@given(st.data())
def test_h_bounds_and_monotonicity(data):
    k, j = data.draw(st.integers(1, 5)), data.draw(st.integers(1, 6))
    m = data.draw(arrays(float, (k, j), elements=st.floats(0, 1)))
    scen, crit = ScenarioSet(data.draw(measure(j))), CriteriaSet(data.draw(measure(k)))
    b1, b2, r1, r2 = (data.draw(level) for _ in range(4))
    assume(b1 != b2 and r1 != r2)
    (b1, b2), (r1, r2) = sorted((b1, b2)), sorted((r1, r2))
    ev = evaluate_h(m, scen, crit, RiskParams(b1, r1))
    assert np.all(ev.g >= m.min(axis=1) - 1e-12) and np.all(ev.g <= m.max(axis=1) + 1e-12)
    assert ev.g.min() - 1e-12 <= ev.h <= ev.g.max() + 1e-12
    assert evaluate_h(m, scen, crit, RiskParams(b2, r1)).h <= ev.h + 1e-12
    assert evaluate_h(m, scen, crit, RiskParams(b1, r2)).h <= ev.h + 1e-12


@given(st.lists(finite, min_size=3, max_size=3))
def test_dominance_transitive(hs):
    a, b, c = (HEvaluation(np.zeros(1), h) for h in hs)
    if dominates(a, b) and dominates(b, c):
        assert dominates(a, c)
