import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hitlab import cf as cfm, corr
from hitlab.corr import HatObservable, MapSpec, TrigObservable, correlation
from hitlab.errors import EstimationError, InconsistentInputsError
from hitlab.indicators import Schedule

GOLDEN = cfm.golden(40)


@given(st.integers(0, 200))
def test_rotation_closed_form(n):
    c = correlation(MapSpec.rotation(GOLDEN), TrigObservable.cos(), TrigObservable.cos(), n)
    want = abs(math.cos(2 * math.pi * float((n * GOLDEN.frac) % 1))) / 2
    assert c.value == pytest.approx(want, abs=1e-12)
    assert c.error == 0


def test_closed_form_against_grid():
    spec = MapSpec.rotation(GOLDEN)
    phi = TrigObservable.cos()
    x = (np.arange(2**16) + 0.5) / 2**16
    for n in (1, 5, 13):
        y = spec.iterate(x[:, None], n)
        grid = float((phi(y) * phi(x[:, None])).mean())
        assert correlation(spec, phi, phi, n).signed == pytest.approx(grid, abs=1e-9)


@given(st.integers(1, 40))
def test_doubling_correlations_vanish(n):
    c = correlation(MapSpec.doubling(), TrigObservable.cos(), TrigObservable.cos(), n)
    assert c.value == 0


def test_quadrature_error_bound_covers_truth():
    spec = MapSpec.rotation(GOLDEN)
    hat = HatObservable((Fraction(1, 2),), Fraction(1, 4))
    for n in (1, 3, 8):
        c = correlation(spec, hat, hat, n)
        fine = correlation(spec, hat, hat, n, points=2**18)
        assert abs(c.signed - fine.signed) <= c.error + fine.error


def test_nonmixing_witness():
    rows = corr.nonmixing_witness(GOLDEN, 8, 0.05)
    assert rows
    for row in rows:
        assert row.distance < Fraction(1, 20)
        assert row.correlation >= 0.4
        assert row.correlation >= 0.5 * math.cos(2 * math.pi * float(row.distance)) - 1e-12


def test_decay_fit_synthetic():
    ns = list(range(1, 200))
    fit = corr.decay_exponent_fit(corr.synthetic_series(lambda n: n ** -3.0, ns))
    assert fit.p == pytest.approx(3.0, abs=1e-6)
    fit = corr.decay_exponent_fit(corr.synthetic_series(lambda n: math.exp(-n), ns))
    # faster than any power: both the slope and the censored lower bound are large
    assert fit.p_lower > 3 and (fit.p is None or fit.p > 3)


def test_rotation_fit_rejected_or_flat():
    spec = MapSpec.rotation(GOLDEN)
    obs = TrigObservable.cos()
    series = corr.correlation_series(spec, obs, obs, range(1, 400))
    fit = corr.decay_exponent_fit(series)
    assert fit.p is None or abs(fit.p) < 0.1


def test_doubling_fit_censored():
    series = corr.correlation_series(MapSpec.doubling(), TrigObservable.cos(), TrigObservable.cos(), range(0, 20))
    fit = corr.decay_exponent_fit(series)
    assert fit.p is None


def test_bounds():
    assert corr.equal_dimension_bound(1, 2) == 3
    assert corr.theorem1_bound(2, 2, 4) == 1.75
    assert corr.corollary_bound(2, 4) == 3
    assert corr.corollary_bound(3, math.inf) == 0
    assert corr.theorem1_bound(1, 1, 0) == math.inf
    assert corr.theorem1_bound(1, 1, math.inf) == 1
    with pytest.raises(InconsistentInputsError):
        corr.corollary_bound(2, 2)
    with pytest.raises(InconsistentInputsError):
        corr.theorem1_bound(2, 1, 3)


@given(st.floats(0.5, 3), st.floats(0.1, 50))
def test_bounds_are_inverse(d, p):
    R = corr.equal_dimension_bound(d, p)
    assert corr.corollary_bound(d, R) == pytest.approx(p, rel=1e-9)


def test_doubling_hitting_matches_float_iteration():
    rng = np.random.default_rng(3)
    orbit = corr.BitOrbit(rng, 2000)
    x0, r = Fraction(1, 3), Fraction(1, 50)
    rec = corr.doubling_hit(orbit, x0, r, 2000)
    x = Fraction(orbit.digits(0, 2200), 1 << 2200)
    for n in range(1, (rec.tau or 2000) + 1):
        y = (x * (1 << n)) % 1
        inside = min((y - x0) % 1, (x0 - y) % 1) < r
        assert inside == (n == rec.tau)
        if inside:
            break


def test_doubling_indicators_band():
    est = corr.doubling_indicators(np.random.default_rng(0), Fraction(1, 3), Schedule(2, 12), 8)
    assert est.R_low > 0.3
    assert est.R_up < 3
