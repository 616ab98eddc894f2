import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hitlab import cf as cfm, certified, indicators
from hitlab.errors import EstimationError
from hitlab.indicators import RatioEntry, Schedule, estimate_indicators, summarize


def test_schedule_radii_are_certified():
    s = Schedule(2, 6)
    for n, r in s.radii():
        assert abs(float(r) / math.exp(-n) - 1) < 1e-3
    assert Schedule(1, 3, Fraction(2)).radius(3) == Fraction(1, 8)
    with pytest.raises(ValueError):
        Schedule(5, 2)


@given(st.integers(1, 10**6), st.integers(1, 400))
def test_ceil_root(y, k):
    k = k % 7 + 1
    m = certified.ceil_root(y, k)
    assert m ** k >= y and (m - 1) ** k < y


@given(st.fractions(Fraction(1, 100), 50), st.fractions(Fraction(-3), 3))
def test_power_bounds_enclose(base, exponent):
    lo, hi = certified.power_bounds(base, exponent)
    v = float(base) ** float(exponent)
    assert lo <= hi
    assert float(lo) <= v * (1 + 1e-12) and float(hi) >= v * (1 - 1e-12)


@given(st.fractions(Fraction(1, 10), 40))
def test_rational_exp_neg(x):
    r = certified.rational_exp_neg(x)
    assert abs(float(r) / math.exp(-float(x)) - 1) < 1e-5
    assert certified.fraction_from_str(certified.fraction_to_str(r)) == r


def test_ceil_exp():
    assert certified.ceil_exp(3) == 21
    assert certified.ceil_exp(Fraction(1, 2)) == 2


def test_summarize_censoring():
    es = [RatioEntry(n, Fraction(1, 10 ** n), 10 ** n if n < 4 else None, 10 ** (n + 1)) for n in range(1, 6)]
    est = summarize(es, {}, 8)
    assert est.censored_count == 2
    assert est.R_up == pytest.approx(1.0)
    assert est.R_low == pytest.approx(1.0)
    with pytest.raises(EstimationError):
        summarize([RatioEntry(1, Fraction(1, 10), None, 10)], {}, 8)


def test_golden_circle_indicators_close_to_one():
    alpha = cfm.golden(200)
    x = Fraction(3141592653, 10**10)
    est = estimate_indicators(indicators.circle_source(alpha, x, 0), Schedule(2, 20), 8)
    assert 0.6 < est.R_low <= 1.2
    assert est.censored_count == 0


def test_recurrence_on_type_two_angle():
    alpha = cfm.squaring_cf([20, 20, 401], 14)
    est = indicators.recurrence_indicators(alpha, Fraction(1, 3), Schedule(2, 30), 8)
    assert est.R_low <= 0.65


def test_loglaw_crosscheck_golden():
    rep = indicators.loglaw_crosscheck(cfm.golden(60), Fraction(271828, 10**6), 0, 10**4)
    assert rep.gap < 0.05


def test_exponent_identities_power_law():
    n = np.arange(1, 10**5 + 1, dtype=float)
    rep = indicators.exponent_identities(n ** -2.0)
    assert abs(rep.beta_liminf_zero - 2) < 0.05 and abs(rep.beta_limsup_zero - 2) < 0.05
    assert rep.gap_first < 0.05 and rep.gap_second < 0.05


def test_orbit_exponents_agree():
    rep = indicators.orbit_exponents(cfm.golden(60), Fraction(1, 7), 0, 5000)
    assert rep.gap < 0.05
