import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st


from sparseq.selftest import fdr_threshold_scan, sure_lambda_scan
from sparseq.baselines import (
    ThresholdSpec,
    fdr_estimate,
    fdr_threshold,
    hard_threshold,
    soft_threshold,
    sure_estimate,
    sure_lambda,
    sure_risk,
    universal_lambda,
)

vectors = st.lists(st.floats(-20, 20), min_size=2, max_size=60).map(np.array)


def test_soft_examples():
    assert soft_threshold([5.0], 2)[0] == 3.0
    assert soft_threshold([-1.0], 3)[0] == 0.0
    x = np.array([-2.0, 0.0, 0.5, 7.0])
    np.testing.assert_array_equal(soft_threshold(x, 0), x)


def test_hard_examples():
    assert hard_threshold([5.0], 2)[0] == 5.0
    assert hard_threshold([2.0], 2)[0] == 0.0
    x = np.array([-2.0, 0.0, 0.5])
    np.testing.assert_array_equal(hard_threshold(x, 0), x)


def test_negative_threshold_rejected():
    with pytest.raises(ValueError):
        soft_threshold([1.0], -1)
    with pytest.raises(ValueError):
        hard_threshold([1.0], -1)


def test_universal_lambda():
    assert universal_lambda(200) == pytest.approx(3.2552472614, abs=1e-9)
    assert universal_lambda(1000) == pytest.approx(3.7169221888, abs=1e-9)
    assert universal_lambda(math.e**2) == pytest.approx(2.0, abs=1e-15)
    with pytest.raises(ValueError):
        universal_lambda(1)


@given(vectors, st.floats(0, 10))
def test_soft_shrinks(x, lam):
    y = soft_threshold(x, lam)
    assert np.linalg.norm(y) <= np.linalg.norm(x) + 1e-12


@given(vectors, st.floats(-3, 3), st.floats(0, 10))
def test_soft_lipschitz(x, dx, lam):
    a = soft_threshold(x, lam)
    b = soft_threshold(x + dx, lam)
    assert np.all(np.abs(a - b) <= abs(dx) + 1e-12)


@given(vectors, st.floats(0, 10))
def test_hard_keeps_or_kills(x, lam):
    y = hard_threshold(x, lam)
    assert np.all((y == 0) | (y == x))


def test_sure_large_signals_keep_data():
    x = np.array([25.0, -30.0, 40.0, 22.0, -27.0, 33.0, 50.0, -45.0, 28.0, 36.0])
    assert sure_lambda_scan(x) == 0.0
    assert sure_lambda(x) == 0.0


def test_sure_two_points():
    x = np.array([0.1, 5.0])
    # candidates 0, 0.1, 5: risks 2.0, 0.01 + 0.01 = 0.02, 25.01 - 2
    assert sure_risk(x, 0.0) == pytest.approx(2.0)
    assert sure_risk(x, 0.1) == pytest.approx(0.02)
    assert sure_lambda(x) == sure_lambda_scan(x) == 0.1


def test_sure_noise_range():
    x = np.random.default_rng(0).normal(size=500)
    lam = sure_lambda(x)
    assert lam == sure_lambda_scan(x)
    assert 1.0 <= lam <= math.sqrt(2 * math.log(500))


def test_sure_needs_two():
    with pytest.raises(ValueError):
        sure_lambda([1.0])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-8, 8), min_size=2, max_size=200))
def test_sure_matches_scan(xs):
    assert sure_lambda(np.array(xs)) == sure_lambda_scan(xs)


def test_sure_with_ties():
    x = np.array([1.0, -1.0, 1.0, 3.0, 0.0, 0.0])
    assert sure_lambda(x) == sure_lambda_scan(x)


def test_fdr_all_strong():
    x = np.full(100, 10.0)
    assert fdr_threshold(x, 0.1) == 10.0
    np.testing.assert_array_equal(fdr_estimate(x, 0.1), x)


def test_fdr_all_weak():
    x = np.full(100, 0.1)
    assert fdr_threshold(x, 0.1) == math.inf
    assert np.all(fdr_estimate(x, 0.1) == 0)


def test_fdr_mixed_instance():
    x = np.array([4.5, -0.3, 2.9, 1.2, -3.4])
    for q in (0.01, 0.1, 0.4):
        assert fdr_threshold(x, q) == fdr_threshold_scan(x, q)
    lam = fdr_threshold(x, 0.1)
    kept = fdr_estimate(x, 0.1) != 0
    np.testing.assert_array_equal(kept, np.abs(x) >= lam)


def test_fdr_level_validation():
    with pytest.raises(ValueError):
        fdr_threshold([1.0, 2.0], 0.0)
    with pytest.raises(ValueError):
        ThresholdSpec("fdr", q=4)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-7, 7), min_size=1, max_size=200), st.sampled_from([0.01, 0.1, 0.4]))
def test_fdr_matches_scan(xs, q):
    assert fdr_threshold(np.array(xs), q) == fdr_threshold_scan(xs, q)


@given(vectors, st.floats(0.001, 0.5), st.floats(0.001, 0.49))
def test_fdr_keep_set_monotone(x, q, dq):
    small = fdr_estimate(x, q) != 0
    big = fdr_estimate(x, q + dq) != 0
    assert np.all(big[small])


def test_threshold_spec_dispatch():
    x = np.random.default_rng(1).normal(size=50) + np.r_[np.full(5, 6.0), np.zeros(45)]
    lam = universal_lambda(50)
    np.testing.assert_array_equal(ThresholdSpec("soft").apply(x), soft_threshold(x, lam))
    np.testing.assert_array_equal(ThresholdSpec("hard").apply(x), hard_threshold(x, lam))
    np.testing.assert_array_equal(ThresholdSpec("sure").apply(x), sure_estimate(x))
    np.testing.assert_array_equal(ThresholdSpec("fdr", 0.4).apply(x), fdr_estimate(x, 0.4))
    with pytest.raises(ValueError):
        ThresholdSpec("median")
