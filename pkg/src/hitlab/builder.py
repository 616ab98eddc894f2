"""Greedy construction of pairs with intertwined convergent denominators.

A pair ``(alpha, alpha')`` is built slot by slot in the order
``q_1, q'_1, q_2, q'_2, ...``.  Level ``n`` consists of the two conditions

    q'_n    >= q_n ** gamma      (power regime)
    q_{n+1} >= q'_n ** gamma

or ``q'_n >= exp(3 q_n)``, ``q_{n+1} >= exp(3 q'_n)`` in the exponential
regime.  Each free slot receives the smallest admissible partial quotient.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import gmpy2

from . import certified
from .cf import ContinuedFraction
from .errors import ResourceError

DEFAULT_BIT_BUDGET = 1 << 20


class Regime(str, Enum):
    POWER = "power"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class IntertwinedPair:
    alpha: ContinuedFraction
    alpha_prime: ContinuedFraction
    gamma: float
    levels: int
    regime: Regime = Regime.POWER
    # slots filled by the caller's prefix are not enforced
    prefix_slots: int = 0

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha.to_json(),
            "alpha_prime": self.alpha_prime.to_json(),
            "gamma": self.gamma,
            "levels": self.levels,
            "regime": self.regime.value,
            "prefix_slots": self.prefix_slots,
        }

    @classmethod
    def from_json(cls, data: dict) -> "IntertwinedPair":
        return cls(
            ContinuedFraction.from_json(data["alpha"]),
            ContinuedFraction.from_json(data["alpha_prime"]),
            float(data["gamma"]),
            int(data["levels"]),
            Regime(data.get("regime", "power")),
            int(data.get("prefix_slots", 0)),
        )


def threshold(q: int, gamma: float, regime: Regime) -> int:
    """Smallest integer denominator allowed after ``q``."""
    if regime is Regime.POWER:
        return certified.ceil_power(q, gamma)
    return certified.ceil_exp(3 * q)


def greedy_quotient(target: int, q_prev: int, q_prevprev: int) -> int:
    """Minimal ``a >= 1`` with ``a*q_prev + q_prevprev >= target``."""
    need = gmpy2.mpz(target) - q_prevprev
    return max(1, int(-(-need // q_prev)))


def _step(a: int, q_prev: int, q_prevprev: int) -> int:
    # gmpy2 multiplies multi-million-bit integers far faster than int
    return int(gmpy2.mpz(a) * q_prev + q_prevprev)


def _slot(k: int) -> tuple[int, int]:
    """Slot ``k`` (0-based) -> (which, index): which 0 is alpha, 1 is alpha'."""
    # order: q_1, q'_1, q_2, q'_2, ...
    return k % 2, k // 2 + 1


def _check_prefix(alpha: Sequence[int], alpha_p: Sequence[int]):
    if not alpha:
        raise ValueError("alpha prefix needs at least a_1")
    if not (len(alpha_p) <= len(alpha) <= len(alpha_p) + 1):
        raise ValueError("prefix must be an initial segment of the slot order q_1, q'_1, q_2, ...")


def _build(gamma: float, levels: int, regime: Regime, seed_alpha, seed_alpha_prime,
           a0: int, a0_prime: int, bit_budget: int) -> IntertwinedPair:
    if levels < 1:
        raise ValueError("levels must be >= 1")
    alpha = [int(a) for a in seed_alpha]
    alpha_p = [int(a) for a in seed_alpha_prime]
    _check_prefix(alpha, alpha_p)
    qs = [0, 1]   # q_{-1}, q_0, q_1, ...
    qps = [0, 1]
    for a in alpha:
        qs.append(_step(a, qs[-1], qs[-2]))
    for a in alpha_p:
        qps.append(_step(a, qps[-1], qps[-2]))

    prefix_slots = len(alpha) + len(alpha_p)
    # level containing the first free slot (slot 2n-1 is q'_n, slot 2n is q_{n+1})
    first_level = (prefix_slots + 1) // 2
    last_level = first_level + levels - 1
    # fill slots up to and including q_{last_level+1}
    last_slot = 2 * last_level   # 0-based index of slot q_{last_level+1}
    for k in range(prefix_slots, last_slot + 1):
        which, idx = _slot(k)
        if which == 1:
            # q'_idx >= f(q_idx)
            src = qs[idx + 1]
            if regime is Regime.EXPONENTIAL and certified.exp_bit_length(3 * src) > bit_budget:
                raise ResourceError(
                    f"level {idx}: q'_{idx} >= exp(3*{src}) needs ~{certified.exp_bit_length(3 * src)} "
                    f"bits, budget {bit_budget}; reached level {idx - 1}")
            target = threshold(src, gamma, regime)
            a = greedy_quotient(target, qps[-1], qps[-2])
            alpha_p.append(a)
            qps.append(_step(a, qps[-1], qps[-2]))
            new = qps[-1]
        else:
            # q_idx >= f(q'_{idx-1})
            src = qps[idx]
            if regime is Regime.EXPONENTIAL and certified.exp_bit_length(3 * src) > bit_budget:
                raise ResourceError(
                    f"level {idx - 1}: q_{idx} >= exp(3*{src}) needs ~{certified.exp_bit_length(3 * src)} "
                    f"bits, budget {bit_budget}; reached level {idx - 2}")
            target = threshold(src, gamma, regime)
            a = greedy_quotient(target, qs[-1], qs[-2])
            alpha.append(a)
            qs.append(_step(a, qs[-1], qs[-2]))
            new = qs[-1]
        if new.bit_length() > bit_budget:
            lvl = idx if which == 1 else idx - 1
            raise ResourceError(
                f"denominator at level {lvl} has {new.bit_length()} bits, budget {bit_budget}; "
                f"reached level {lvl - 1}")
    return IntertwinedPair(
        ContinuedFraction(a0, tuple(alpha)),
        ContinuedFraction(a0_prime, tuple(alpha_p)),
        float(gamma), levels, regime, prefix_slots,
    )


def build_pair(gamma: float, levels: int, seed_alpha: Sequence[int] = (2,),
               seed_alpha_prime: Sequence[int] = (), *, a0: int = 0, a0_prime: int = 0,
               bit_budget: int = DEFAULT_BIT_BUDGET) -> IntertwinedPair:
    """Greedy member of the power-regime class, enforced on ``levels`` levels.

    The default seed ``alpha = [0; 2]`` gives ``q_1 = 2``; for ``gamma = 2``
    the next slots are ``q'_1 = 4, q_2 = 17, q'_2 = 289``.
    """
    if not gamma > 1:
        raise ValueError("gamma must be > 1")
    return _build(gamma, levels, Regime.POWER, seed_alpha, seed_alpha_prime,
                  a0, a0_prime, bit_budget)


def build_exponential_pair(levels: int, seed_alpha: Sequence[int] = (1,),
                           seed_alpha_prime: Sequence[int] = (), *,
                           bit_budget: int = DEFAULT_BIT_BUDGET) -> IntertwinedPair:
    """Greedy member of the exponential-regime class (``q' >= e^{3q}``).

    Level 2 already demands ``q'_2 >= exp(3 q_2)`` with ``q_2 ~ 2.3e27``,
    far past any bit budget, so only ``levels = 1`` completes in practice;
    deeper requests fail with a :class:`ResourceError` naming the level.
    """
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if levels > 3:
        raise ResourceError(f"exponential regime limited to 3 levels, asked for {levels}")
    return _build(1.0, levels, Regime.EXPONENTIAL, seed_alpha, seed_alpha_prime,
                  0, 0, bit_budget)


@dataclass
class LevelCheck:
    level: int
    first_ok: bool | None       # q'_n >= f(q_n)
    second_ok: bool | None      # q_{n+1} >= f(q'_n)
    first_margin: float | None  # log-ratio margin
    second_margin: float | None
    enforced: bool

    @property
    def ok(self) -> bool:
        return all(v is not False for v in (self.first_ok, self.second_ok))


@dataclass
class MembershipReport:
    gamma: float
    regime: Regime
    levels: list[LevelCheck] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(lv.ok for lv in self.levels)

    @property
    def enforced_pass(self) -> bool:
        return all(lv.ok for lv in self.levels if lv.enforced)

    @property
    def first_failure(self) -> int | None:
        for lv in self.levels:
            if not lv.ok:
                return lv.level
        return None

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "regime": self.regime.value,
            "all_pass": self.all_pass,
            "levels": [lv.__dict__ for lv in self.levels],
        }


def _margin(big: int, small: int, gamma: float, regime: Regime) -> float:
    if regime is Regime.POWER:
        return math.log(big) - gamma * math.log(small)
    return math.log(big) - 3 * small


def verify_membership(pair: IntertwinedPair) -> MembershipReport:
    """Exact re-check of every level whose denominators are stored."""
    a, ap = pair.alpha, pair.alpha_prime
    qs, qps = a.pq[1], ap.pq[1]
    rep = MembershipReport(pair.gamma, pair.regime)
    n = 1
    while n < len(qps) and n < len(qs):
        qn, qpn = qs[n], qps[n]
        t1 = threshold(qn, pair.gamma, pair.regime)
        first = qpn >= t1
        m1 = _margin(qpn, qn, pair.gamma, pair.regime)
        second = m2 = None
        if n + 1 < len(qs):
            t2 = threshold(qpn, pair.gamma, pair.regime)
            second = qs[n + 1] >= t2
            m2 = _margin(qs[n + 1], qpn, pair.gamma, pair.regime)
        # slot of q'_n is 2n-1 (0-based), of q_{n+1} is 2n
        enforced = 2 * n - 1 >= pair.prefix_slots
        rep.levels.append(LevelCheck(n, first, second, m1, m2, enforced))
        n += 1
    return rep


def minimality_violations(pair: IntertwinedPair) -> list[str]:
    """Constructed quotients that could be decreased by one and still pass.

    Quotients equal to 1 are clamped and count as minimal when the
    unclamped greedy value is <= 1.
    """
    bad = []
    a, ap = pair.alpha, pair.alpha_prime
    for k in range(pair.prefix_slots, a.N + ap.N):
        which, idx = _slot(k)
        if which == 1:
            target = threshold(a.q(idx), pair.gamma, pair.regime)
            cf, name = ap, f"a'_{idx}"
        else:
            target = threshold(ap.q(idx - 1), pair.gamma, pair.regime)
            cf, name = a, f"a_{idx}"
        aq, q_prev, q_pp = cf.a(idx), cf.q(idx - 1), cf.q(idx - 2)
        if aq > 1:
            if (aq - 1) * q_prev + q_pp >= target:
                bad.append(name)
        elif target - q_pp > q_prev:
            bad.append(name)
    return bad
