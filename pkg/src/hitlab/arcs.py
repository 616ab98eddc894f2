"""Exact finite unions of circle arcs with rational endpoints."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable


def _norm(pieces: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    """Sort, drop empties and merge overlapping or touching pieces in ``[0, 1]``."""
    ps = sorted((a, b) for a, b in pieces if a < b)
    out: list[list[Fraction]] = []
    for a, b in ps:
        if out and a <= out[-1][1]:
            if b > out[-1][1]:
                out[-1][1] = b
        else:
            out.append([a, b])
    return tuple((a, b) for a, b in out)


@dataclass(frozen=True)
class ArcUnion:
    """Disjoint sorted arcs ``(left, right)`` with ``0 <= left < right <= 1``.

    An arc crossing 0 is stored as two pieces ``(l, 1)`` and ``(0, r)``.
    Only measure is tracked, so open and closed arcs are not distinguished.
    """

    arcs: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "arcs", _norm((Fraction(a), Fraction(b)) for a, b in self.arcs))

    @classmethod
    def arc(cls, left, length) -> "ArcUnion":
        """The arc ``[left, left + length)`` taken mod 1 (``length <= 1``)."""
        left, length = Fraction(left), Fraction(length)
        if length >= 1:
            return cls(((Fraction(0), Fraction(1)),))
        left -= math.floor(left)
        right = left + length
        if right <= 1:
            return cls(((left, right),))
        return cls(((left, Fraction(1)), (Fraction(0), right - 1)))

    @classmethod
    def ball(cls, center, radius) -> "ArcUnion":
        return cls.arc(Fraction(center) - Fraction(radius), 2 * Fraction(radius))

    @cached_property
    def total_measure(self) -> Fraction:
        return sum((b - a for a, b in self.arcs), Fraction(0))

    @property
    def measure(self) -> Fraction:
        return self.total_measure

    def __bool__(self):
        return bool(self.arcs)

    def union(self, other: "ArcUnion") -> "ArcUnion":
        return ArcUnion(self.arcs + other.arcs)

    __or__ = union

    def complement(self) -> "ArcUnion":
        out, cur = [], Fraction(0)
        for a, b in self.arcs:
            if a > cur:
                out.append((cur, a))
            cur = b
        if cur < 1:
            out.append((cur, Fraction(1)))
        return ArcUnion(tuple(out))

    def intersection(self, other: "ArcUnion") -> "ArcUnion":
        out = []
        i = j = 0
        A, B = self.arcs, other.arcs
        while i < len(A) and j < len(B):
            lo = max(A[i][0], B[j][0])
            hi = min(A[i][1], B[j][1])
            if lo < hi:
                out.append((lo, hi))
            if A[i][1] < B[j][1]:
                i += 1
            else:
                j += 1
        return ArcUnion(tuple(out))

    __and__ = intersection

    def difference(self, other: "ArcUnion") -> "ArcUnion":
        return self.intersection(other.complement())

    __sub__ = difference

    def shift(self, by) -> "ArcUnion":
        """Rotate every arc by ``by`` (preimage under rotation by ``-by``)."""
        by = Fraction(by)
        pieces: list[tuple[Fraction, Fraction]] = []
        for a, b in self.arcs:
            pieces.extend(ArcUnion.arc(a + by, b - a).arcs)
        return ArcUnion(tuple(pieces))

    def contains(self, x) -> bool:
        """Membership of ``x`` in the interiors of the arcs."""
        x = Fraction(x) - math.floor(Fraction(x))
        return any(a < x < b for a, b in self.arcs)

    def to_json(self) -> dict:
        return {
            "arcs": [[f"{a.numerator}/{a.denominator}", f"{b.numerator}/{b.denominator}"] for a, b in self.arcs],
            "measure": f"{self.total_measure.numerator}/{self.total_measure.denominator}",
        }
