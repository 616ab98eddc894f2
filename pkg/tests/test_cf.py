import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hitlab import cf as cfm
from hitlab.cf import ContinuedFraction, convergents, norm_q_alpha, type_estimate, value
from hitlab.errors import DepthError, HorizonError

from conftest import cfs


def test_golden_denominators_are_fibonacci():
    c = ContinuedFraction.from_list([0, 1, 1, 1, 1, 1])
    assert [cv.q for cv in convergents(c, 5)] == [1, 1, 2, 3, 5, 8]
    assert all(c.q(k) >= cfm.fibonacci(k) for k in range(6))


def test_sqrt2_convergents():
    c = ContinuedFraction.from_list([1, 2, 2, 2])
    assert [cv.q for cv in convergents(c, 3)] == [1, 2, 5, 12]
    assert value(c) == Fraction(17, 12)


def _nested(terms):
    x = Fraction(terms[-1])
    for a in reversed(terms[:-1]):
        x = a + 1 / x
    return x


def test_golden_value():
    terms = [0, 1, 1, 1, 1, 1]
    assert value(ContinuedFraction.from_list(terms)) == _nested(terms) == Fraction(5, 8)
    assert value(ContinuedFraction.from_list(terms + [1])) == Fraction(8, 13)


@given(cfs(min_depth=1, max_depth=12))
def test_value_matches_nested_evaluation(c):
    assert value(c) == _nested([c.a0, *c.quotients])


def test_norm_example():
    c = ContinuedFraction.from_list([0, 1, 1, 1, 1, 1, 1, 1])
    assert value(c) == Fraction(13, 21)
    assert norm_q_alpha(c, 2) == Fraction(5, 21)


def test_bounds_on_pi_like_expansion():
    c = ContinuedFraction.from_list([0, 3, 1, 4, 1, 5, 9, 2, 6])
    for n in range(5):
        th = norm_q_alpha(c, n)
        assert Fraction(1, c.q(n) + c.q(n + 1)) < th < Fraction(1, c.q(n + 1))


def test_first_link_is_equality_at_zero_when_a1_is_one():
    c = ContinuedFraction(0, (1, 3, 2, 5))
    assert cfm.bounds_chain(c, 0) == (False, True, True)
    assert cfm.bounds_chain(ContinuedFraction(0, (2, 3, 2, 5)), 0) == (True, True, True)


@given(cfs(min_depth=3, max_depth=20))
def test_bounds_chain_holds_from_index_one(c):
    for n in range(1, c.N - 1):
        assert all(cfm.bounds_chain(c, n))
    # the middle and right links hold at n = 0 as well
    if c.N >= 2:
        assert cfm.bounds_chain(c, 0)[1:] == (True, True)


@given(cfs(min_depth=2, max_depth=15))
def test_determinant_identity(c):
    for k in range(1, c.N + 1):
        assert c.p(k) * c.q(k - 1) - c.p(k - 1) * c.q(k) == (-1) ** (k + 1)


@given(cfs(min_depth=1, max_depth=15))
def test_from_fraction_round_trip(c):
    back = ContinuedFraction.from_fraction(value(c))
    assert value(back) == value(c)
    assert ContinuedFraction.from_json(c.to_json()) == c


def test_type_estimates():
    assert abs(type_estimate(cfm.golden(20)) - 1) < 0.15
    assert type_estimate(ContinuedFraction.from_list([0, 2, 4, 16, 256])) >= 1.8
    assert abs(type_estimate(cfm.squaring_cf([20, 20, 401], 14)) - 2) < 0.05


def test_squaring_recursion():
    c = cfm.squaring_cf([2], 5)
    for k in range(1, c.N):
        assert c.a(k + 1) == c.q(k)


def test_depth_errors():
    c = cfm.golden(5)
    with pytest.raises(DepthError):
        norm_q_alpha(c, 4)
    with pytest.raises(DepthError):
        c.q(6)
    with pytest.raises(ValueError):
        ContinuedFraction(0, (1, 0, 2))


def test_horizon_invariant():
    c = cfm.golden(10)
    with pytest.raises(HorizonError):
        cfm.check_horizon(c, 10**6, Fraction(1, 100))
    cfm.check_horizon(cfm.golden(40), 10**6, Fraction(1, 100))
    p = cfm.shortest_prefix(cfm.golden(60), 1000, Fraction(1, 50))
    cfm.check_horizon(p, 1000, Fraction(1, 50))
    assert p.N < 60


@given(st.integers(1, 30))
def test_fibonacci_recurrence(n):
    assert cfm.fibonacci(n + 1) == cfm.fibonacci(n) + cfm.fibonacci(n - 1) if n >= 1 else True
    assert math.isclose(cfm.golden(n).q(n), cfm.fibonacci(n))
