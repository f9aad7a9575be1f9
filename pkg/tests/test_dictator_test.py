import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kcsp import fourier as F
from kcsp.dictator_test import (
    RFunction,
    TestParams,
    averaged_projection,
    averaged_projections,
    default_parameters,
    dictator_closed_form,
    exceeds,
    fold,
    folded_random,
    projection_influences,
    quasirandomness_check,
    run_test_exact,
    run_test_mc,
    shift,
)
from kcsp.errors import BudgetError, ValidationError

from conftest import all_points


def brute_acceptance(f: RFunction, k: int, rho: float) -> float:
    """Sum over z, every k-tuple of noisy copies and every k-tuple of shifts."""
    R, pts = f.R, all_points(f.n, f.R)
    index = {p: i for i, p in enumerate(pts)}

    def fc(c, x):
        moved = tuple((v + c) % R for v in x)
        return (f.table[index[moved]] - c) % R

    # probability that the k shifted answers agree, given the k query points
    def agree(xs):
        hits = sum(len({fc(c, x) for c, x in zip(cs, xs)}) == 1 for cs in itertools.product(range(R), repeat=k))
        return hits / R**k

    total = []
    for z in pts:
        for xs in itertools.product(pts, repeat=k):
            w = math.prod(rho * (a == b) + (1 - rho) / R for x in xs for a, b in zip(x, z))
            if w:
                total.append(w * agree(xs))
    return math.fsum(total) / len(pts)


def test_default_parameters_natural_log():
    rho, d, log_delta = default_parameters(2, 16)
    assert rho == pytest.approx(1 / math.sqrt(math.log(16)))
    assert rho == pytest.approx(0.60056, abs=1e-5)
    assert d == math.ceil(20 * math.log(16))
    assert log_delta == pytest.approx(-(10 + 200 * math.log(16)) * math.log(16))
    assert default_parameters(2, 2)[0] == 1.0  # capped
    with pytest.raises(ValidationError):
        default_parameters(1, 3)


def test_params_overrides_and_validation():
    p = TestParams(3, 4, rho=0.2, d=5, log_delta=-3.0)
    assert (p.rho, p.d, p.delta) == (0.2, 5, pytest.approx(math.exp(-3)))
    with pytest.raises(ValidationError):
        TestParams(2, 3, rho=1.2)
    with pytest.raises(ValidationError):
        TestParams(2, 3, trials=0)


def test_rfunction_validation_and_json():
    with pytest.raises(ValidationError):
        RFunction(2, 3, [0] * 8)
    with pytest.raises(ValidationError):
        RFunction(1, 3, [0, 1, 3])
    f = RFunction.random(2, 3, 1)
    assert RFunction.from_dict(f.to_dict()) == f
    with pytest.raises(ValidationError, match="table"):
        RFunction.from_dict({"n": 2, "R": 3})


# ---------------------------------------------------------------- shifts

def test_shift_zero_is_identity():
    f = RFunction.random(3, 4, 0)
    assert shift(f, 0) == f


def test_dictator_is_shift_invariant():
    f = RFunction.dictator(3, 5, 1)
    assert all(shift(f, c) == f for c in range(5))


def test_shift_projection_identity():
    f, R = RFunction.random(2, 4, 3), 4
    pts = all_points(2, R)
    for c in range(R):
        fc = shift(f, c)
        for i in range(R):
            for j, x in enumerate(pts):
                moved = pts.index(tuple((v + c) % R for v in x))
                assert (fc.table[j] == i) == (f.table[moved] == (i + c) % R)


@given(st.integers(0, 10**6), st.integers(0, 4), st.integers(0, 4))
def test_shift_composes(seed, a, b):
    f = RFunction.random(2, 5, seed)
    assert shift(shift(f, a), b) == shift(f, a + b)


# ---------------------------------------------------------------- averaged projections

@given(st.integers(0, 10**6))
def test_averaged_projection_mean(seed):
    f = RFunction.random(2, 3, seed)
    for i in range(3):
        assert F.exact_mean(averaged_projection(f, i).values) == pytest.approx(1 / 3, abs=1e-15)
    sums = sum(g.values for g in averaged_projections(f))
    np.testing.assert_allclose(sums, 1.0)


def test_averaged_projections_agree_with_single():
    f = RFunction.random(2, 4, 8)
    for i, g in enumerate(averaged_projections(f)):
        np.testing.assert_array_equal(g.values, averaged_projection(f, i).values)


def test_averaged_projection_influence_bound():
    for seed in range(10):
        f = RFunction.random(2, 3, seed)
        fmax = projection_influences(f, 2).max(axis=0)
        for g in averaged_projections(f):
            assert np.all(F.influences(F.transform(g), 2) <= fmax + 1e-12)


# ---------------------------------------------------------------- acceptance

def test_dictator_exact_half():
    assert run_test_exact(RFunction.dictator(3, 3, 0), TestParams(2, 3, rho=0.5)) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("k, R", [(2, 2), (2, 3), (3, 3), (2, 4)])
def test_exact_matches_brute_enumeration(k, R):
    rho = 0.45
    n = 1 if k == 3 else 2
    for f in (RFunction.random(n, R, k + R), RFunction.constant(n, R, 1), RFunction.dictator(n, R, n - 1)):
        assert run_test_exact(f, TestParams(k, R, rho=rho)) == pytest.approx(brute_acceptance(f, k, rho), abs=1e-12)


def test_constant_function_acceptance():
    for k, R in [(2, 3), (3, 4)]:
        p = TestParams(k, R, rho=0.7, trials=50_000, seed=2)
        f = RFunction.constant(2, R, 2)
        assert run_test_exact(f, p) == pytest.approx(1 / R ** (k - 1), abs=1e-12)
        est, se = run_test_mc(f, p)
        assert abs(est - 1 / R ** (k - 1)) <= 3 * se


def test_mc_dictator_within_three_sigma():
    est, se = run_test_mc(RFunction.dictator(3, 3, 2), TestParams(2, 3, rho=0.5, trials=100_000, seed=4))
    assert abs(est - 0.5) <= 3 * se


@pytest.mark.parametrize("seed", range(4))
def test_mc_agrees_with_exact(seed):
    f = RFunction.random(2, 3, seed)
    p = TestParams(2, 3, trials=100_000, seed=seed)
    est, se = run_test_mc(f, p)
    assert abs(est - run_test_exact(f, p)) <= 3 * se


def test_mc_independent_of_workers():
    f, p = RFunction.random(2, 4, 1), TestParams(3, 4, trials=70_000, seed=6)
    assert run_test_mc(f, p, workers=1) == run_test_mc(f, p, workers=3)


def test_exact_budget():
    with pytest.raises(BudgetError):
        run_test_exact(RFunction.random(3, 4, 0), TestParams(2, 4), budget=10)


@given(st.integers(0, 10**6), st.integers(2, 4), st.floats(0, 1))
def test_exact_is_probability(seed, k, rho):
    p = run_test_exact(RFunction.random(2, 3, seed), TestParams(k, 3, rho=rho))
    assert -1e-12 <= p <= 1 + 1e-12


def test_closed_form_examples():
    assert dictator_closed_form(2, 3, 0.5) == pytest.approx(0.5)
    for k, R in [(2, 3), (4, 7)]:
        assert dictator_closed_form(k, R, 0.0) == pytest.approx(1 / R ** (k - 1))
    with pytest.raises(ValidationError):
        dictator_closed_form(2, 3, -0.1)


def test_closed_form_dominates_rho_power():
    for k in range(2, 7):
        for R in (2, 3, 5, 8, 16, 64):
            for rho in np.linspace(0, 1, 11):
                assert dictator_closed_form(k, R, rho) >= rho**k


@pytest.mark.parametrize("k", [2, 3, 4])
@pytest.mark.parametrize("R", [2, 3, 5, 8])
def test_completeness_default_rho(k, R):
    p = TestParams(k, R)
    n = 2 if R**2 <= 64 else 1
    acc = run_test_exact(RFunction.dictator(n, R, n - 1), p)
    assert acc == pytest.approx(dictator_closed_form(k, R, p.rho), abs=1e-9)
    assert acc >= p.rho**k


# ---------------------------------------------------------------- folding and quasirandomness

def test_fold_balanced_and_fixes_dictators():
    for seed in range(5):
        h = folded_random(3, 4, seed)
        assert h.is_balanced()
    for j in range(3):
        d = RFunction.dictator(3, 4, j)
        assert fold(d) == d


def test_dictator_influences():
    R = 4
    q = quasirandomness_check(RFunction.dictator(2, R, 1), d=3, log_delta=default_parameters(2, R)[2])
    assert not q.is_quasirandom
    assert q.max_influence == pytest.approx((1 / R) * (1 - 1 / R))
    assert q.argmax[1] == 1
    np.testing.assert_allclose(q.influences[:, 1], (1 / R) * (1 - 1 / R))
    np.testing.assert_allclose(q.influences[:, 0], 0.0, atol=1e-15)


def test_constant_is_quasirandom():
    q = quasirandomness_check(RFunction.constant(3, 3, 1), d=5, log_delta=-1000.0)
    assert q.is_quasirandom and q.max_influence == pytest.approx(0.0, abs=1e-20)


def test_sum_function_symmetric_influences():
    R = 3
    f = RFunction.from_callable(2, R, lambda x: x[0] + x[1])
    infl = quasirandomness_check(f, d=2, log_delta=-5.0).influences
    np.testing.assert_allclose(infl[:, 0], infl[:, 1], atol=1e-12)
    assert np.all(infl > 0)


def test_exceeds_log_space():
    assert exceeds(1e-300, -700.0)
    assert not exceeds(1e-300, -600.0)
    assert not exceeds(0.0, -1e9)
    assert exceeds(0.0, -math.inf, strict=False)
    assert exceeds(math.exp(-5.0), -5.0, strict=False)
