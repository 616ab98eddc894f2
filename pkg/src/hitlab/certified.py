"""Certified real arithmetic for exact-vs-real comparisons.

Everything here returns exact rationals or integers. Real quantities such as
``q**gamma`` or ``exp(3q)`` are enclosed in mpmath intervals whose endpoints
are converted to :class:`~fractions.Fraction`, and precision is raised until
the requested integer (ceil/floor) or comparison is unambiguous.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from numbers import Rational

import gmpy2
from mpmath import iv
from mpmath.libmp import to_rational

from .errors import ResourceError

MAX_PREC = 1 << 16
_lock = threading.Lock()

RealLike = int | float | Fraction


def as_fraction(x: RealLike) -> Fraction:
    """Exact rational value of an int, float or Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {x!r}")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _iv_of(x: Fraction):
    return iv.mpf(x.numerator) / iv.mpf(x.denominator)


def _endpoints(v) -> tuple[Fraction, Fraction]:
    lo, hi = v._mpi_
    # mpmath may hand back gmpy2 integers; keep Fractions on plain ints
    (a, b), (c, d) = to_rational(lo), to_rational(hi)
    return Fraction(int(a), int(b)), Fraction(int(c), int(d))


def enclose(fn, prec: int = 128) -> tuple[Fraction, Fraction]:
    """Evaluate ``fn(iv, to_iv)`` at interval precision ``prec``.

    ``to_iv`` converts exact rationals to point intervals. Returns the
    enclosing endpoints as exact rationals.
    """
    with _lock:
        saved = iv.prec
        iv.prec = prec
        try:
            value = fn(iv, lambda x: _iv_of(as_fraction(x)))
        finally:
            iv.prec = saved
    return _endpoints(value)


def _refine(fn, decide, start_prec: int = 96):
    prec = start_prec
    while prec <= MAX_PREC:
        lo, hi = enclose(fn, prec)
        out = decide(lo, hi)
        if out is not None:
            return out
        prec *= 2
    raise ResourceError(f"interval precision exceeded {MAX_PREC} bits without deciding")


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def param_fraction(x: RealLike) -> Fraction:
    """Exact rational for a user-facing real parameter.

    Floats are read as the shortest rational that rounds to them, so
    ``1.8`` means ``9/5`` rather than its binary expansion.
    """
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"non-finite parameter {x!r}")
        for den in (10 ** k for k in range(0, 16)):
            f = Fraction(x).limit_denominator(den)
            if float(f) == x:
                return f
        return Fraction(x)
    return as_fraction(x)


def ceil_root(y: int, k: int) -> int:
    """Smallest integer ``m >= 0`` with ``m**k >= y``."""
    if y <= 0:
        return 0
    r, exact = gmpy2.iroot(gmpy2.mpz(y), k)
    return int(r) if exact else int(r) + 1


# exact integer-root path is used while b**num stays below this many bits
_EXACT_BITS = 1 << 26


def ceil_power(base: RealLike, exponent: RealLike) -> int:
    """Exact ``ceil(base ** exponent)`` for positive rational ``base``."""
    b = as_fraction(base)
    e = param_fraction(exponent)
    if b <= 0:
        raise ValueError("base must be positive")
    if e < 0:
        b, e = 1 / b, -e
    num, den = e.numerator, e.denominator
    size = num * max(b.numerator.bit_length(), b.denominator.bit_length())
    if size <= _EXACT_BITS:
        u = gmpy2.mpz(b.numerator) ** num
        v = gmpy2.mpz(b.denominator) ** num
        # m**den >= u/v  <=>  m**den >= ceil(u/v)
        return ceil_root(int(-(-u // v)), den)

    def decide(lo, hi):
        a, c = _ceil_frac(lo), _ceil_frac(hi)
        if a == c and lo.denominator != 1:
            return a
        return None

    start = max(96, int(float(e) * max(b.numerator.bit_length(), b.denominator.bit_length())) + 64)
    return _refine(lambda c, t: c.exp(t(e) * c.log(t(b))), decide, start)


def ceil_exp(x: RealLike) -> int:
    """Exact ``ceil(exp(x))`` for rational ``x != 0``."""
    xf = as_fraction(x)
    if xf == 0:
        return 1

    def decide(lo, hi):
        a, c = _ceil_frac(lo), _ceil_frac(hi)
        return a if a == c and lo.denominator != 1 else None

    start = max(96, int(abs(float(xf)) * 1.5) + 64)
    return _refine(lambda c, t: c.exp(t(xf)), decide, start)


def exp_bit_length(x: RealLike) -> int:
    """Upper bound on the bit length of ``ceil(exp(x))`` without computing it."""
    return int(math.ceil(float(as_fraction(x)) / math.log(2))) + 2


def power_bounds(base: RealLike, exponent: RealLike, prec: int = 128) -> tuple[Fraction, Fraction]:
    """Rational enclosure of ``base ** exponent``."""
    b, e = as_fraction(base), param_fraction(exponent)
    if e.denominator == 1:
        v = b ** int(e)
        return v, v
    return enclose(lambda c, t: c.exp(t(e) * c.log(t(b))), prec)


def less_equal(exact: Fraction, fn, prec: int = 128) -> bool:
    """True iff ``exact <= value`` holds against the certified lower bound of ``fn``."""
    lo, _ = enclose(fn, prec)
    return as_fraction(exact) <= lo


def greater_equal(exact: Fraction, fn, prec: int = 128) -> bool:
    """True iff ``exact >= value`` holds against the certified upper bound of ``fn``."""
    _, hi = enclose(fn, prec)
    return as_fraction(exact) >= hi


def rational_exp_neg(n: RealLike, rel: float = 1e-6) -> Fraction:
    """Dyadic rational within relative error ``rel`` of ``exp(-n)``.

    The rounding is certified: the returned value ``v`` satisfies
    ``|v - exp(-n)| <= rel * exp(-n)`` against an interval enclosure.
    """
    nf = as_fraction(n)
    lo, hi = enclose(lambda c, t: c.exp(-t(nf)), 128 + int(abs(float(nf)) * 2))
    bits = max(0, int(math.ceil(float(nf) / math.log(2)))) + int(math.ceil(-math.log2(rel))) + 4
    scale = 1 << bits
    mid = (lo + hi) / 2
    v = Fraction(round(mid * scale), scale)
    err = max(abs(v - lo), abs(v - hi))
    if err > Fraction(rel) * lo:
        raise ResourceError("could not certify the rounding of exp(-n)")
    return v


def fraction_to_str(x: Fraction) -> str:
    """``num/den`` rendering used by every report."""
    x = as_fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fraction_from_str(s: str) -> Fraction:
    return Fraction(s)
