"""Exact orbits of circle rotations and torus translations.

Points carry exact rational coordinates. A rotation angle is either a
:class:`ContinuedFraction` (a truncated irrational, subject to the horizon
invariant) or an exact rational (a genuinely periodic test system).

Everything is reduced to integer arithmetic over a common denominator
``L``: the orbit position becomes ``(C + n*A) mod L`` and the open ball
becomes an integer window ``1 <= y <= W-1``. First hits are then found with a
Euclid-like search, so ``hit_circle`` costs O(log L) regardless of the
horizon.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .cf import ContinuedFraction, check_horizon
from .errors import DegenerateBallError, HorizonError

Angle = Union[ContinuedFraction, Fraction, int]


def _frac01(x) -> Fraction:
    x = Fraction(x)
    return x - math.floor(x)


@dataclass(frozen=True)
class CirclePoint:
    coordinate: Fraction

    def __post_init__(self):
        object.__setattr__(self, "coordinate", _frac01(self.coordinate))

    def __float__(self):
        return float(self.coordinate)


@dataclass(frozen=True)
class TorusPoint:
    coordinates: tuple[Fraction, ...]

    def __post_init__(self):
        cs = tuple(_frac01(c) for c in self.coordinates)
        if len(cs) not in (1, 2, 3):
            raise ValueError("torus points have 1, 2 or 3 coordinates")
        object.__setattr__(self, "coordinates", cs)

    @property
    def d(self) -> int:
        return len(self.coordinates)

    def __getitem__(self, i):
        return self.coordinates[i]


@dataclass(frozen=True)
class HittingRecord:
    """``tau`` is None when no hit occurs within ``horizon`` (censored)."""

    radius: Fraction
    tau: int | None
    horizon: int

    @property
    def censored(self) -> bool:
        return self.tau is None

    def to_row(self, instance_id) -> dict:
        r = Fraction(self.radius)
        return {
            "instance_id": instance_id,
            "r_num": r.numerator,
            "r_den": r.denominator,
            "tau": "" if self.tau is None else self.tau,
            "horizon": self.horizon,
            "censored_flag": int(self.censored),
        }


def _coord(p) -> Fraction:
    if isinstance(p, CirclePoint):
        return p.coordinate
    return _frac01(p)


def _coords(p) -> tuple[Fraction, ...]:
    if isinstance(p, TorusPoint):
        return p.coordinates
    return tuple(_frac01(c) for c in p)


def angle_value(alpha: Angle) -> Fraction:
    """Fractional part of the exact rational standing in for the angle."""
    if isinstance(alpha, ContinuedFraction):
        return alpha.frac
    return _frac01(alpha)


def check_ball(r) -> Fraction:
    r = Fraction(r)
    if not 0 < r < Fraction(1, 2):
        raise DegenerateBallError(f"radius {r} outside (0, 1/2)")
    return r


def check_angle(alpha: Angle, steps: int, r) -> None:
    """Horizon invariant for truncated irrationals; rationals are exempt."""
    if isinstance(alpha, ContinuedFraction):
        check_horizon(alpha, steps, Fraction(r))


# ---------------------------------------------------------------------------
# modular range search

def first_multiple_in(a: int, m: int, lo: int, hi: int) -> int | None:
    """Least ``x >= 0`` with ``lo <= (a*x) mod m <= hi``, for ``0 <= lo <= hi < m``.

    Euclid-like descent: each level swaps ``(a, m)`` for ``(m mod a, a)``.
    Runs iteratively so very deep descents do not hit the recursion limit.
    """
    stack = []
    while True:
        if lo == 0:
            y = 0
            break
        a %= m
        if a == 0:
            y = None
            break
        k = -(-lo // a)
        if a * k <= hi:
            y = k
            break
        # no multiple of a in [lo, hi]; solve for the wrap count instead
        stack.append((a, m, lo))
        a, m, lo, hi = m % a, a, (-hi) % a, (-lo) % a
    while stack:
        if y is None:
            return None
        a, m, lo = stack.pop()
        y = -(-(lo + m * y) // a)
    return y


def first_in_window(a: int, c: int, m: int, lo: int, hi: int) -> int | None:
    """Least ``x >= 0`` with ``lo <= (a*x + c) mod m <= hi`` (``0 <= lo <= hi < m``)."""
    c %= m
    if lo <= c <= hi:
        return 0
    # shift the window by -c; it may wrap into two pieces
    l2, h2 = (lo - c) % m, (hi - c) % m
    if l2 <= h2:
        return first_multiple_in(a % m, m, l2, h2)
    best = None
    for l3, h3 in ((l2, m - 1), (0, h2)):
        x = first_multiple_in(a % m, m, l3, h3)
        if x is not None and (best is None or x < best):
            best = x
    return best


class IntegerCircle:
    """One coordinate of an orbit in integer form.

    Position at time ``n`` is ``(C + n*A) mod L``; the orbit point lies in the
    open ball iff that position is in ``[1, W-1]``.
    """

    __slots__ = ("A", "C", "L", "W", "_gaps")

    def __init__(self, alpha: Fraction, x: Fraction, x0: Fraction, r: Fraction, L: int | None = None):
        c = _frac01(x - x0 + r)
        if L is None:
            L = math.lcm(alpha.denominator, c.denominator, (2 * r).denominator)
        self.L = L
        self.A = int(alpha * L) % L
        self.C = int(c * L)
        self.W = int(2 * r * L)
        self._gaps = None
        if self.A != alpha * L or self.C != c * L or self.W != 2 * r * L:
            raise ValueError("common denominator does not clear all fractions")

    def pos(self, n: int) -> int:
        return (self.C + n * self.A) % self.L

    def inside(self, n: int) -> bool:
        return 1 <= self.pos(n) <= self.W - 1

    def first_after(self, t: int) -> int | None:
        """Least ``n > t`` whose orbit point is in the ball."""
        x = first_in_window(self.A, self.pos(t + 1), self.L, 1, self.W - 1)
        return None if x is None else t + 1 + x

    def gaps(self) -> tuple[int | None, int | None]:
        """``(m_plus, m_minus)``: first returns moving up / down by less than the window."""
        if self._gaps is None:
            span = self.W - 2
            up = first_in_window(self.A, self.A, self.L, 0, span)
            down = None
            if span >= 1:
                down = first_in_window(self.A, self.A, self.L, self.L - span, self.L - 1)
            self._gaps = (None if up is None else up + 1, None if down is None else down + 1)
        return self._gaps

    def candidates(self) -> list[int] | None:
        """Sorted candidate gaps between successive entries, or None if not three-gap."""
        up, down = self.gaps()
        if up is None or down is None:
            return None
        return sorted({up, down, up + down})

    def next_entry(self, t: int) -> int | None:
        """Next entry after an in-ball time ``t``, via the three-gap candidates."""
        cands = self.candidates()
        if cands is not None:
            y = self.pos(t)
            for m in cands:
                z = (y + m * self.A) % self.L
                if 1 <= z <= self.W - 1:
                    return t + m
        return self.first_after(t)


def _circle(alpha: Angle, x, x0, r) -> IntegerCircle:
    return IntegerCircle(angle_value(alpha), _coord(x), _coord(x0), Fraction(r))


def _prepare(alpha: Angle, r, horizon: int) -> Fraction:
    r = check_ball(r)
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    check_angle(alpha, horizon, r)
    return r


def hit_circle(alpha: Angle, x, x0, r, horizon: int) -> HittingRecord:
    """First ``n >= 1`` with ``||x + n*alpha - x0|| < r``, exact."""
    r = _prepare(alpha, r, horizon)
    n = _circle(alpha, x, x0, r).first_after(0)
    return HittingRecord(r, n if n is not None and n <= horizon else None, horizon)


def next_entries(alpha: Angle, x, x0, r, count: int, horizon: int) -> list[int]:
    """The first ``count`` entry times (at most ``horizon``), strictly increasing."""
    r = _prepare(alpha, r, horizon)
    if count <= 0:
        return []
    circ = _circle(alpha, x, x0, r)
    out = []
    t = circ.first_after(0)
    while t is not None and t <= horizon and len(out) < count:
        out.append(t)
        t = circ.next_entry(t)
    return out


def recurrence_time(alpha: Angle, x, r, horizon: int) -> HittingRecord:
    """First return of the orbit of ``x`` into the ball around ``x``."""
    return hit_circle(alpha, x, x, r, horizon)


def _angles2(pair_or_angles) -> tuple[Angle, Angle]:
    if hasattr(pair_or_angles, "alpha_prime"):
        return pair_or_angles.alpha, pair_or_angles.alpha_prime
    a, b = pair_or_angles
    return a, b


def hit_torus2(angles, x, x0, r, horizon: int, *, backend=None) -> HittingRecord:
    """First ``n >= 1`` with both coordinates within ``r`` (sup metric).

    Walks the entry times of one coordinate with three-gap steps and tests
    the other at each entry. The walk runs in the selected kernel on 128-bit
    fixed point with a certified error bound; whenever a test is too close to
    call, control returns here and the step is settled exactly.
    """
    a1, a2 = _angles2(angles)
    r = check_ball(r)
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    check_angle(a1, horizon, r)
    check_angle(a2, horizon, r)
    xs, x0s = _coords(x), _coords(x0)
    if len(xs) != 2 or len(x0s) != 2:
        raise ValueError("hit_torus2 needs 2-dimensional points")
    c1 = _circle(a1, xs[0], x0s[0], r)
    c2 = _circle(a2, xs[1], x0s[1], r)
    t1, t2 = c1.first_after(0), c2.first_after(0)
    if t1 is None or t2 is None or max(t1, t2) > horizon:
        return HittingRecord(r, None, horizon)
    # walk the coordinate that enters later; the other is the checker
    walker, checker = (c1, c2) if t1 >= t2 else (c2, c1)
    t = max(t1, t2)
    if not walker.inside(t):
        t = walker.first_after(t - 1)
    tau = _walk(walker, checker, t, horizon, backend)
    if __debug__ and tau is not None:
        assert tau >= max(t1, t2)
    return HittingRecord(r, tau, horizon)


def _walk(walker: IntegerCircle, checker: IntegerCircle, t: int | None, horizon: int, backend) -> int | None:
    from . import kernels
    kern = kernels.get(backend)
    if horizon >= 1 << 62:
        # compiled walk counts time in signed 64-bit
        kern = kernels.get("python")
    cands = walker.candidates()
    while t is not None and t <= horizon:
        if checker.inside(t):
            return t
        if cands is None:
            t = walker.next_entry(t)
            continue
        status, t_new = kern.walk_entries(
            kernels.encode(walker, t), kernels.encode(checker, t),
            kernels.window(walker.W, walker.L), kernels.window(checker.W, checker.L),
            cands,
            [kernels.shift(walker, m) for m in cands],
            [kernels.shift(checker, m) for m in cands],
            t, horizon,
        )
        if status == kernels.FOUND:
            return t_new
        if status == kernels.HORIZON:
            return None
        # ambiguous: settle from t_new exactly
        t = t_new
        if checker.inside(t):
            return t
        t = walker.next_entry(t)
    return None


def hit_torus(angles: Sequence[Angle], x, x0, r, horizon: int) -> HittingRecord:
    """Hitting time for a translation of any dimension (1 to 3)."""
    angles = list(angles)
    if len(angles) == 2:
        return hit_torus2(angles, x, x0, r, horizon)
    r = check_ball(r)
    for a in angles:
        check_angle(a, horizon, r)
    xs, x0s = _coords(x), _coords(x0)
    circs = [_circle(a, xi, yi, r) for a, xi, yi in zip(angles, xs, x0s)]
    if len(circs) == 1:
        t = circs[0].first_after(0)
        return HittingRecord(r, t if t is not None and t <= horizon else None, horizon)
    firsts = [c.first_after(0) for c in circs]
    if any(f is None for f in firsts):
        return HittingRecord(r, None, horizon)
    k = max(range(len(circs)), key=lambda i: firsts[i])
    walker, others = circs[k], [c for i, c in enumerate(circs) if i != k]
    t = firsts[k]
    while t is not None and t <= horizon:
        if all(c.inside(t) for c in others):
            return HittingRecord(r, t, horizon)
        t = walker.next_entry(t)
    return HittingRecord(r, None, horizon)


def d_n_sequence(angles, x, x0, n_max: int, resolution=None) -> list[Fraction]:
    """``d_n = min_{1<=i<=n} dist(T^i x, x0)`` for ``n = 1..n_max`` (sup metric).

    ``angles`` is one angle (circle) or a sequence of angles (torus). The
    horizon invariant is checked at ``resolution`` (default ``1/n_max``).
    """
    if isinstance(angles, (ContinuedFraction, Fraction, int)):
        angles = [angles]
        xs, x0s = (_coord(x),), (_coord(x0),)
    else:
        angles = list(angles)
        xs, x0s = _coords(x), _coords(x0)
    res = Fraction(1, max(n_max, 3)) if resolution is None else Fraction(resolution)
    for a in angles:
        check_angle(a, n_max, res)
    vals = [angle_value(a) for a in angles]
    diffs = [_frac01(xi - yi) for xi, yi in zip(xs, x0s)]
    L = math.lcm(*[v.denominator for v in vals], *[d.denominator for d in diffs])
    A = [int(v * L) for v in vals]
    P = [int(d * L) for d in diffs]
    out = []
    best = L
    for _ in range(n_max):
        worst = 0
        for i in range(len(A)):
            P[i] = (P[i] + A[i]) % L
            y = P[i]
            dist = y if y <= L - y else L - y
            if dist > worst:
                worst = dist
        if worst < best:
            best = worst
        out.append(best)
    return [Fraction(b, L) for b in out]


# ---------------------------------------------------------------------------
# brute-force oracles (used by the test-suite and by shadow checks)

def _dist1(v: Fraction) -> Fraction:
    f = _frac01(v)
    return min(f, 1 - f)


def brute_hit(angles: Sequence[Angle], x, x0, r, horizon: int) -> int | None:
    """Naive exact iteration: first ``n <= horizon`` with the orbit in the ball."""
    vals = [angle_value(a) for a in angles]
    xs, x0s = _coords(x), _coords(x0)
    r = Fraction(r)
    L = math.lcm(*[v.denominator for v in vals], *[Fraction(c).denominator for c in xs + x0s])
    A = [int(v * L) for v in vals]
    P = [int((xi - yi) * L) % L for xi, yi in zip(xs, x0s)]
    R = r * L
    for n in range(1, horizon + 1):
        ok = True
        for i in range(len(A)):
            P[i] = (P[i] + A[i]) % L
            y = P[i]
            if min(y, L - y) >= R:
                ok = False
        if ok:
            return n
    return None


def brute_entries(alpha: Angle, x, x0, r, count: int, horizon: int) -> list[int]:
    out = []
    v = angle_value(alpha)
    x, x0, r = _coord(x), _coord(x0), Fraction(r)
    for n in range(1, horizon + 1):
        if len(out) >= count:
            break
        if _dist1(x + n * v - x0) < r:
            out.append(n)
    return out


def translate(angles: Sequence[Angle], x, n: int = 1) -> TorusPoint:
    """``T^n x`` for the translation by ``angles``."""
    vals = [angle_value(a) for a in angles]
    return TorusPoint(tuple(xi + n * v for xi, v in zip(_coords(x), vals)))


__all__ = [
    "CirclePoint", "TorusPoint", "HittingRecord", "hit_circle", "next_entries",
    "hit_torus2", "hit_torus", "recurrence_time", "d_n_sequence", "brute_hit",
    "brute_entries", "translate", "first_in_window", "first_multiple_in",
    "IntegerCircle", "HorizonError",
]
