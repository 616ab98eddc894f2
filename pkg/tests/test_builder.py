import math

import pytest
from hypothesis import given, strategies as st

from hitlab import builder, cf as cfm, certified
from hitlab.builder import IntertwinedPair, build_exponential_pair, build_pair, verify_membership
from hitlab.errors import ResourceError


def test_gamma_two_greedy_values():
    pair = build_pair(2, 3)
    a, ap = pair.alpha, pair.alpha_prime
    assert a.q(1) == 2
    assert (ap.a(1), ap.q(1)) == (4, 4)
    assert (a.a(2), a.q(2)) == (8, 17)
    assert (ap.a(2), ap.q(2)) == (72, 289)
    assert ap.q(1) >= a.q(1) ** 2 and a.q(2) >= ap.q(1) ** 2 and ap.q(2) >= a.q(2) ** 2


@pytest.mark.parametrize("gamma", [1.5, 2, 3])
def test_membership_and_minimality(gamma):
    pair = build_pair(gamma, 5)
    assert verify_membership(pair).all_pass
    assert builder.minimality_violations(pair) == []


@given(st.floats(1.05, 3.0), st.integers(1, 4))
def test_builder_output_always_verifies(gamma, levels):
    pair = build_pair(gamma, levels)
    rep = verify_membership(pair)
    assert rep.enforced_pass
    for lv in rep.levels:
        q, qp = pair.alpha.q(lv.level), pair.alpha_prime.q(lv.level)
        assert qp >= builder.threshold(q, gamma, pair.regime)


def test_golden_pair_fails_first_level():
    g = cfm.golden(12)
    rep = verify_membership(IntertwinedPair(g, g, 1.5, 5))
    # q_1 = q'_1 = 1 satisfies 1 >= 1**gamma, so the first violation is at level 2
    assert rep.levels[0].ok
    assert rep.first_failure == 2


def test_exponential_first_level():
    pair = build_exponential_pair(1)
    assert pair.alpha.q(1) == 1
    assert certified.ceil_exp(3) == 21
    assert pair.alpha_prime.a(1) == 21
    assert verify_membership(pair).all_pass


def test_exponential_second_slot_is_e_to_63():
    pair = build_exponential_pair(1)
    assert pair.alpha.N >= 2
    q2 = pair.alpha.q(2)
    assert q2 >= certified.ceil_exp(63) > 2 * 10**27
    assert math.isclose(math.log(q2), 63, rel_tol=1e-9)


def test_exponential_depth_limit():
    with pytest.raises(ResourceError):
        build_exponential_pair(2, bit_budget=1 << 12)


def test_json_round_trip():
    pair = build_pair(2, 3)
    assert IntertwinedPair.from_json(pair.to_json()) == pair


def test_bit_budget_enforced():
    with pytest.raises(ResourceError):
        build_pair(3, 8, bit_budget=1 << 10)
