from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from hitlab import cf as cfm, kernels, orbit
from hitlab.builder import build_pair
from hitlab.errors import DegenerateBallError, HorizonError
from hitlab.orbit import (
    brute_entries, brute_hit, d_n_sequence, first_in_window, hit_circle, hit_torus, hit_torus2,
    next_entries, recurrence_time,
)

from conftest import cfs, unit_fractions

radii = st.integers(1, 49).map(lambda k: Fraction(k, 100))


def test_golden_example():
    alpha = cfm.ContinuedFraction.from_list([0] + [1] * 10)
    # depth 10 keeps the horizon invariant only up to 24 steps at this radius
    rec = hit_circle(alpha, 0, Fraction(1, 2), Fraction(1, 20), 24)
    assert rec.tau == brute_hit([alpha], (0,), (Fraction(1, 2),), Fraction(1, 20), 24)
    assert rec.tau is not None


def test_next_entries_golden():
    alpha = cfm.golden(40)
    x = Fraction(123456, 1000003)
    got = next_entries(alpha, x, 0, Fraction(1, 30), 10, 10**5)
    assert got == brute_entries(alpha, x, 0, Fraction(1, 30), 10, 10**5)
    assert len(got) == 10 and got == sorted(got)


def test_parity_clash_never_hits():
    angles = [Fraction(1, 4), Fraction(1, 6)]
    x, x0, r = (0, 0), (Fraction(1, 2), Fraction(1, 2)), Fraction(1, 10)
    assert brute_hit(angles, x, x0, r, 120) is None
    assert hit_torus2(angles, x, x0, r, 10**6).tau is None


def test_y2_pair_matches_oracle():
    pair = build_pair(2, 3)
    r = Fraction(1, 20)         # close to e^-3
    for i in range(5):
        x = (Fraction(37 * i + 11, 997), Fraction(91 * i + 5, 1009))
        got = hit_torus2(pair, x, (0, 0), r, 3000).tau
        assert got == brute_hit([pair.alpha, pair.alpha_prime], x, (0, 0), r, 3000)


def test_recurrence_times_are_denominators():
    alpha = cfm.golden(40)
    rec = recurrence_time(alpha, Fraction(1, 7), Fraction(1, 50), 10**4)
    assert rec.tau == brute_hit([alpha], (Fraction(1, 7),), (Fraction(1, 7),), Fraction(1, 50), 10**4)
    assert rec.tau in alpha.pq[1]


@given(cfs(min_depth=4, max_depth=10), unit_fractions(), unit_fractions(), radii, st.integers(1, 2000))
def test_circle_matches_brute_force(alpha, x, x0, r, H):
    alpha = alpha.__class__(0, alpha.quotients, truncated=False)
    assert hit_circle(alpha, x, x0, r, H).tau == brute_hit([alpha], (x,), (x0,), r, H)


@given(cfs(min_depth=4, max_depth=10), unit_fractions(), unit_fractions(), radii, st.integers(1, 20))
def test_entries_match_brute_force(alpha, x, x0, r, count):
    alpha = alpha.__class__(0, alpha.quotients, truncated=False)
    assert next_entries(alpha, x, x0, r, count, 3000) == brute_entries(alpha, x, x0, r, count, 3000)


@given(cfs(min_depth=4, max_depth=9), cfs(min_depth=4, max_depth=9),
       st.tuples(unit_fractions(), unit_fractions()), st.tuples(unit_fractions(), unit_fractions()),
       radii, st.sampled_from(sorted(kernels.BACKENDS)))
def test_torus_matches_brute_force(a, b, x, x0, r, backend):
    a = a.__class__(0, a.quotients, truncated=False)
    b = b.__class__(0, b.quotients, truncated=False)
    H = 3000
    assert hit_torus2([a, b], x, x0, r, H, backend=backend).tau == brute_hit([a, b], x, x0, r, H)


@given(st.lists(st.integers(2, 400), min_size=3, max_size=3), st.tuples(*[unit_fractions(1000)] * 3),
       st.integers(1, 49))
def test_three_torus_matches_brute_force(dens, x, k):
    angles = [Fraction(1 + d // 3, d) for d in dens]
    r = Fraction(k, 100)
    assert hit_torus(angles, x, (0, 0, 0), r, 2000).tau == brute_hit(angles, x, (0, 0, 0), r, 2000)


@given(cfs(min_depth=4, max_depth=10), unit_fractions(), unit_fractions(), radii, radii)
def test_monotone_in_radius(alpha, x, x0, r1, r2):
    alpha = alpha.__class__(0, alpha.quotients, truncated=False)
    lo, hi = sorted((r1, r2))
    t_small = hit_circle(alpha, x, x0, lo, 5000).tau
    t_big = hit_circle(alpha, x, x0, hi, 5000).tau
    if t_small is not None:
        assert t_big is not None and t_big <= t_small


@given(cfs(min_depth=4, max_depth=10), unit_fractions(), unit_fractions(), radii, st.integers(1, 50))
def test_shift_equivariance(alpha, x, x0, r, m):
    alpha = alpha.__class__(0, alpha.quotients, truncated=False)
    v = orbit.angle_value(alpha)
    ent = next_entries(alpha, x, x0, r, 60, 5000)
    shifted = next_entries(alpha, x + m * v, x0, r, 60, 5000)
    # entries of T^m x are those of x shifted back by m
    later = [t - m for t in ent if t > m]
    assert shifted[:len(later)] == later[:len(shifted)]


@given(cfs(min_depth=4, max_depth=10), unit_fractions(), unit_fractions(), st.integers(1, 300))
def test_dn_characterises_hitting(alpha, x, x0, n):
    alpha = alpha.__class__(0, alpha.quotients, truncated=False)
    ds = d_n_sequence(alpha, x, x0, n)
    assert all(b <= a for a, b in zip(ds, ds[1:]))
    for r in (ds[-1], ds[-1] + Fraction(1, 10**6)):
        assume(0 < r < Fraction(1, 2))
        tau = hit_circle(alpha, x, x0, r, n).tau
        # open balls: d_n < r exactly when some i <= n hits
        assert (ds[-1] < r) == (tau is not None)


@given(st.integers(1, 10**6), st.integers(0, 10**6), st.integers(2, 10**6), st.integers(0, 10**6), st.integers(0, 10**6))
def test_first_in_window_matches_scan(a, c, m, lo, width):
    a, c = a % m, c % m
    lo = lo % m
    hi = min(m - 1, lo + width % 50)
    got = first_in_window(a, c, m, lo, hi)
    want = None
    for x in range(m):
        if lo <= (c + x * a) % m <= hi:
            want = x
            break
        if x > 5000:
            want = "skip"
            break
    if want != "skip":
        assert got == want


def test_degenerate_and_horizon_errors():
    with pytest.raises(DegenerateBallError):
        hit_circle(cfm.golden(30), 0, 0, Fraction(1, 2), 10)
    with pytest.raises(DegenerateBallError):
        hit_circle(cfm.golden(30), 0, 0, 0, 10)
    with pytest.raises(HorizonError):
        hit_circle(cfm.golden(8), 0, Fraction(1, 3), Fraction(1, 1000), 10**6)
