import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from abx.mathutil import logit, logsumexp, sigmoid, softplus


def test_sigmoid_known_values():
    assert sigmoid(0.0) == 0.5
    assert sigmoid(1000.0) == pytest.approx(1.0)
    assert sigmoid(-1000.0) == pytest.approx(0.0)
    # no overflow warnings at extreme inputs
    assert np.isfinite(sigmoid(np.array([-1e4, 0.0, 1e4]))).all()


@given(st.floats(min_value=-30, max_value=30))
def test_logit_inverts_sigmoid(x):
    # recovering x from the probability loses ~eps * e^|x| of precision
    # (the 1 - p subtraction), so the bound grows with |x|
    assert logit(sigmoid(x)) == pytest.approx(x, abs=1e-12 * math.exp(abs(x)) + 1e-9)


@given(st.floats(min_value=1e-9, max_value=1 - 1e-9))
def test_sigmoid_inverts_logit(p):
    assert sigmoid(logit(p)) == pytest.approx(p, rel=1e-9)


def test_softplus_matches_reference():
    for z in (-100.0, -2.0, 0.0, 2.0, 100.0):
        assert softplus(z) == pytest.approx(np.logaddexp(0.0, z), rel=1e-12)
    assert softplus(0.0) == pytest.approx(math.log(2.0), rel=1e-15)


def test_logsumexp_two_zeros_is_ln2():
    assert logsumexp([0.0, 0.0]) == pytest.approx(math.log(2.0), rel=1e-15)


def test_logsumexp_no_overflow_at_1000():
    assert logsumexp([1000.0, 1000.0]) == pytest.approx(1000.0 + math.log(2.0), rel=1e-15)


def test_logsumexp_empty_raises():
    with pytest.raises(ValueError):
        logsumexp([])


@given(st.lists(st.floats(min_value=-100, max_value=100), min_size=1, max_size=20))
def test_logsumexp_matches_numpy_reduce(values):
    expected = np.logaddexp.reduce(np.asarray(values, dtype=float))
    assert logsumexp(values) == pytest.approx(float(expected), rel=1e-12, abs=1e-12)


@given(st.lists(st.floats(min_value=-100, max_value=100), min_size=1, max_size=20))
def test_logsumexp_bounds(values):
    # max <= LSE <= max + log(n)
    result = logsumexp(values)
    assert result >= max(values) - 1e-12
    assert result <= max(values) + math.log(len(values)) + 1e-12
