"""Exact continued-fraction arithmetic.

Convergents use the initialisation ``p_{-1}=1, p_0=0, q_{-1}=0, q_0=1`` so that
``p_n/q_n`` converges to the *fractional part* of the number; :func:`value`
re-adds the integer part.  No floating point is used except in the final
division of :func:`type_estimate`.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import gmpy2

from .errors import DepthError, HorizonError


def coprime_fraction(p: int, q: int) -> Fraction:
    """Fraction from a pair already known to be coprime (skips the gcd)."""
    try:
        return Fraction(p, q, _normalize=False)
    except TypeError:
        return Fraction(p, q)


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class ContinuedFraction:
    """Finite continued fraction ``[a0; a_1, ..., a_N]``.

    ``truncated`` marks the value as a stand-in for an irrational; rational
    angles used as test systems set it to False, which exempts them from
    the horizon invariant.
    """

    a0: int
    quotients: tuple[int, ...]
    truncated: bool = True

    def __post_init__(self):
        qs = tuple(int(a) for a in self.quotients)
        if any(a < 1 for a in qs):
            raise ValueError("partial quotients a_k (k >= 1) must be positive")
        object.__setattr__(self, "quotients", qs)
        object.__setattr__(self, "a0", int(self.a0))

    @classmethod
    def from_list(cls, terms: Sequence[int], truncated: bool = True) -> "ContinuedFraction":
        terms = list(terms)
        if not terms:
            raise ValueError("need at least a0")
        return cls(terms[0], tuple(terms[1:]), truncated)

    @classmethod
    def from_fraction(cls, x: Fraction, truncated: bool = False) -> "ContinuedFraction":
        """Expansion of an exact rational, last quotient >= 2."""
        x = Fraction(x)
        a0 = math.floor(x)
        rest = x - a0
        qs = []
        while rest:
            rest = 1 / rest
            a = math.floor(rest)
            qs.append(a)
            rest -= a
        return cls(a0, tuple(qs), truncated)

    @property
    def N(self) -> int:
        return len(self.quotients)

    @property
    def depth(self) -> int:
        return len(self.quotients)

    def a(self, k: int) -> int:
        """Partial quotient a_k (a_0 is the integer part)."""
        if k == 0:
            return self.a0
        if not 1 <= k <= self.N:
            raise DepthError(f"a_{k} not stored (depth {self.N})")
        return self.quotients[k - 1]

    @cached_property
    def pq(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """All (p_k) and (q_k) for k = 0..N."""
        big = any(a.bit_length() > 4096 for a in self.quotients)
        conv = gmpy2.mpz if big else int
        p_prev, p = conv(1), conv(0)
        q_prev, q = conv(0), conv(1)
        ps, qs = [0], [1]
        for a in self.quotients:
            a = conv(a)
            p_prev, p = p, a * p + p_prev
            q_prev, q = q, a * q + q_prev
            ps.append(int(p))
            qs.append(int(q))
        return tuple(ps), tuple(qs)

    def q(self, k: int) -> int:
        if k == -1:
            return 0
        self._check(k)
        return self.pq[1][k]

    def p(self, k: int) -> int:
        if k == -1:
            return 1
        self._check(k)
        return self.pq[0][k]

    def _check(self, k: int):
        if not 0 <= k <= self.N:
            raise DepthError(f"index {k} outside 0..{self.N}")

    @cached_property
    def frac(self) -> Fraction:
        """Exact fractional part ``p_N / q_N``."""
        ps, qs = self.pq
        return coprime_fraction(ps[-1], qs[-1])

    def extend(self, more: Iterable[int]) -> "ContinuedFraction":
        return ContinuedFraction(self.a0, self.quotients + tuple(more), self.truncated)

    def prefix(self, n: int) -> "ContinuedFraction":
        """Truncation keeping a_1..a_n."""
        if not 0 <= n <= self.N:
            raise DepthError(f"prefix length {n} outside 0..{self.N}")
        return ContinuedFraction(self.a0, self.quotients[:n], self.truncated)

    def to_json(self) -> dict:
        return {
            "a0": str(self.a0),
            "quotients": [str(a) for a in self.quotients],
            "truncated": self.truncated,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "ContinuedFraction":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(int(data["a0"]), tuple(int(a) for a in data["quotients"]),
                   bool(data.get("truncated", True)))


def convergents(cf: ContinuedFraction, n: int | None = None) -> list[Convergent]:
    """Convergents ``(p_k, q_k)`` for ``k = 0..n``."""
    if n is None:
        n = cf.N
    if n < 0 or n > cf.N:
        raise DepthError(f"depth {n} exceeds stored quotients ({cf.N})")
    ps, qs = cf.pq
    return [Convergent(ps[k], qs[k], k) for k in range(n + 1)]


def value(cf: ContinuedFraction) -> Fraction:
    """Exact rational ``a0 + p_N/q_N`` standing in for the irrational."""
    return cf.a0 + cf.frac


def dist_to_int(x: Fraction) -> Fraction:
    """``||x||``, the distance to the nearest integer."""
    f = x - math.floor(x)
    return min(f, 1 - f)


def signed_error(cf: ContinuedFraction, n: int) -> Fraction:
    """``q_n * frac - p_n`` (sign alternates with n)."""
    if n == -1:
        return Fraction(-1)
    return cf.q(n) * cf.frac - cf.p(n)


def theta(cf: ContinuedFraction, n: int) -> Fraction:
    """``|q_n * frac - p_n|`` for any stored index, no depth margin required."""
    return abs(signed_error(cf, n))


def norm_q_alpha(cf: ContinuedFraction, n: int) -> Fraction:
    """``||q_n alpha||`` as ``|q_n * frac - p_n|``; needs two quotients past ``n``.

    For ``n >= 1`` this is the distance to the nearest integer.  For ``n = 0``
    it is ``frac`` itself, which differs from ``||frac||`` only when
    ``a_1 = 1``.
    """
    if n < 0 or n > cf.N - 2:
        raise DepthError(f"norm at index {n} needs depth >= {n + 2}, have {cf.N}")
    return theta(cf, n)


def bounds_chain(cf: ContinuedFraction, n: int) -> tuple[bool, bool, bool]:
    """Each strict link of ``1/(2q_{n+1}) < 1/(q_n+q_{n+1}) < ||q_n alpha|| < 1/q_{n+1}``.

    The first link is ``q_n < q_{n+1}``, which is an equality at ``n = 0``
    whenever ``a_1 = 1``.
    """
    th = norm_q_alpha(cf, n)
    q0, q1 = cf.q(n), cf.q(n + 1)
    mid = Fraction(1, q0 + q1)
    return Fraction(1, 2 * q1) < mid, mid < th, th < Fraction(1, q1)


def type_estimate(cf: ContinuedFraction, start: int | None = None) -> float:
    """Finite-depth surrogate of ``limsup log q_{n+1} / log q_n``.

    The maximum is taken over the trailing indices ``n >= start`` (default
    ``N // 2``) with ``q_n >= 2``; early ratios of small denominators say
    nothing about the limsup.
    """
    if cf.N < 3:
        raise DepthError("type estimate needs depth >= 3")
    qs = cf.pq[1]
    if start is None:
        start = max(1, cf.N // 2)
    best = None
    for n in range(max(1, start), cf.N):
        if qs[n] < 2:
            continue
        ratio = math.log(qs[n + 1]) / math.log(qs[n])
        best = ratio if best is None else max(best, ratio)
    if best is None:
        # every trailing denominator is 1: fall back to the whole ladder
        return type_estimate(cf, 1) if start > 1 else 1.0
    return best


def fibonacci(n: int) -> int:
    """``f_n`` with ``f_0 = f_1 = 1`` (the denominators of [0;1,1,...])."""
    a, b = 1, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def check_horizon(cf: ContinuedFraction, steps: int, radius: Fraction) -> None:
    """Enforce ``steps / (q_N q_{N-1}) < radius / 10`` for truncated numbers."""
    if not cf.truncated:
        return
    if cf.N < 1:
        raise HorizonError("a truncated number needs at least one quotient")
    qs = cf.pq[1]
    if Fraction(steps, qs[-1] * qs[-2]) >= Fraction(radius) / 10:
        raise HorizonError(
            f"horizon {steps} too long for depth {cf.N} at radius {float(radius):.3g}: "
            f"need q_N*q_(N-1) > {float(10 * steps / Fraction(radius)):.3g}, "
            f"have {qs[-1] * qs[-2]:.3g}"
        )


def shortest_prefix(cf: ContinuedFraction, steps: int, radius: Fraction) -> ContinuedFraction:
    """Shortest truncation of ``cf`` that still satisfies the horizon invariant.

    Shorter truncations have smaller denominators, which keeps exact
    arithmetic cheap.  Falls back to ``cf`` itself (raising) if none does.
    """
    if not cf.truncated:
        return cf
    qs = cf.pq[1]
    bound = Fraction(radius) / 10
    for n in range(2, cf.N + 1):
        if Fraction(steps, qs[n] * qs[n - 1]) < bound:
            return cf.prefix(n)
    check_horizon(cf, steps, radius)
    return cf


def golden(depth: int) -> ContinuedFraction:
    """``[0; 1, 1, ..., 1]``, the golden-ratio fractional part truncated."""
    return ContinuedFraction(0, (1,) * depth)


def random_cf(rng, depth: int, max_quotient: int = 10, canonical: bool = True) -> ContinuedFraction:
    """Pseudo-random expansion; ``canonical`` forces the last quotient >= 2."""
    qs = [int(a) for a in rng.integers(1, max_quotient + 1, size=depth)]
    if canonical and qs and qs[-1] == 1:
        qs[-1] = int(rng.integers(2, max_quotient + 1))
    return ContinuedFraction(0, tuple(qs))


def squaring_cf(seed: Sequence[int], depth: int) -> ContinuedFraction:
    """``seed`` followed by ``a_{k+1} = q_k``, so ``q_{k+1} ~ q_k^2`` (type 2)."""
    cf = ContinuedFraction(0, tuple(int(a) for a in seed))
    while cf.N < depth:
        cf = cf.extend([cf.q(cf.N)])
    return cf
