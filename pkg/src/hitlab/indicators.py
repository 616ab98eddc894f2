"""Finite-scale surrogates of the upper and lower hitting-time indicators.

For radii ``r_n`` on a geometric schedule the ratios ``log tau / -log r``
are computed exactly from hitting times. ``R_low`` and ``R_up`` are the
minimum and maximum over a trailing window of the schedule. A censored
entry (no hit within the horizon) still proves ``tau > horizon``; it enters
``R_low`` as a lower bound and never enters ``R_up``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import certified
from .errors import EstimationError
from .orbit import HittingRecord, d_n_sequence, hit_circle, hit_torus, recurrence_time

HitSource = Callable[[Fraction, int], HittingRecord]


def neg_log(r: Fraction) -> float:
    """``-log r`` for an exact rational, safe for huge numerators/denominators."""
    r = Fraction(r)
    return math.log(r.denominator) - math.log(r.numerator)


@dataclass(frozen=True)
class Schedule:
    """Radii ``r_n = base^(-n / per_unit)`` for ``n = start..stop``.

    ``base="e"`` uses certified dyadic roundings of ``e^{-n/per_unit}``;
    a rational base gives exact radii.
    """

    start: int
    stop: int
    base: str | Fraction = "e"
    per_unit: int = 1

    def __post_init__(self):
        if self.stop < self.start:
            raise ValueError("empty schedule")
        if self.base != "e":
            b = Fraction(self.base)
            if b <= 1:
                raise ValueError("schedule base must exceed 1")
            object.__setattr__(self, "base", b)

    def radius(self, n: int) -> Fraction:
        if self.base == "e":
            return certified.rational_exp_neg(Fraction(n, self.per_unit))
        if self.per_unit != 1:
            raise ValueError("fractional steps need base 'e'")
        return Fraction(1) / self.base ** n

    def radii(self) -> list[tuple[int, Fraction]]:
        return [(n, self.radius(n)) for n in range(self.start, self.stop + 1)]

    @property
    def contraction(self) -> float:
        """``c`` with ``r_{n+1} = c r_n``; the discretisation lemma needs ``0 < c < 1``."""
        if self.base == "e":
            return math.exp(-1 / self.per_unit)
        return 1 / float(self.base)

    def describe(self) -> dict:
        return {"base": str(self.base), "start": self.start, "stop": self.stop, "per_unit": self.per_unit}


@dataclass(frozen=True)
class RatioEntry:
    n: int
    radius: Fraction
    tau: int | None
    horizon: int

    @property
    def censored(self) -> bool:
        return self.tau is None

    @property
    def ratio(self) -> float:
        """``log tau / -log r``; for censored entries the lower bound ``log horizon / -log r``."""
        t = self.horizon if self.tau is None else self.tau
        return math.log(t) / neg_log(self.radius)


@dataclass
class IndicatorEstimate:
    entries: list[RatioEntry]
    R_low: float
    R_up: float | None
    schedule: dict
    window: int
    censored_count: int
    low_is_bound: bool = False   # R_low attained at a censored entry

    @property
    def ratios(self) -> list[tuple[int, float]]:
        return [(e.n, e.ratio) for e in self.entries]

    def to_json(self) -> dict:
        return {
            "R_low": self.R_low,
            "R_up": self.R_up,
            "censored_count": self.censored_count,
            "low_is_bound": self.low_is_bound,
            "window": self.window,
            "schedule": self.schedule,
            "ratios": [
                {"n": e.n, "r": certified.fraction_to_str(e.radius), "tau": e.tau,
                 "horizon": e.horizon, "ratio": e.ratio, "censored": e.censored}
                for e in self.entries
            ],
        }


def power_horizon(exponent: float, cap: int | None = None) -> Callable[[Fraction], int]:
    """Horizon ``ceil(r^-exponent)`` (optionally capped)."""
    def h(r: Fraction) -> int:
        v = math.ceil(math.exp(exponent * neg_log(r)))
        return min(v, cap) if cap else v
    return h


def summarize(entries: Sequence[RatioEntry], schedule: dict, window: int) -> IndicatorEstimate:
    """Window min/max with the censoring policy applied."""
    entries = list(entries)
    if not entries:
        raise EstimationError("no ratio entries")
    if all(e.censored for e in entries):
        raise EstimationError("every entry is censored; indicators cannot be estimated")
    tail = entries[-window:] if window else entries
    low_e = min(tail, key=lambda e: e.ratio)
    live = [e for e in tail if not e.censored]
    up = max(e.ratio for e in live) if live else None
    return IndicatorEstimate(entries, low_e.ratio, up, schedule, window,
                             sum(e.censored for e in entries), low_e.censored)


def estimate_indicators(source: HitSource, schedule: Schedule, tail_window: int = 8,
                        horizon: Callable[[Fraction], int] | int | None = None) -> IndicatorEstimate:
    """Indicator surrogates from a hit source ``(r, horizon) -> HittingRecord``."""
    if horizon is None:
        horizon = power_horizon(3.0)
    entries = []
    for n, r in schedule.radii():
        H = horizon(r) if callable(horizon) else int(horizon)
        rec = source(r, H)
        entries.append(RatioEntry(n, r, rec.tau, H))
    return summarize(entries, schedule.describe(), tail_window)


def circle_source(alpha, x, x0) -> HitSource:
    return lambda r, H: hit_circle(alpha, x, x0, r, H)


def torus_source(angles, x, x0, backend=None) -> HitSource:
    angles = list(angles) if not hasattr(angles, "alpha_prime") else [angles.alpha, angles.alpha_prime]
    if len(angles) == 2:
        from .orbit import hit_torus2
        return lambda r, H: hit_torus2(angles, x, x0, r, H, backend=backend)
    return lambda r, H: hit_torus(angles, x, x0, r, H)


def recurrence_source(alpha, x) -> HitSource:
    return lambda r, H: recurrence_time(alpha, x, r, H)


def recurrence_indicators(alpha, x, schedule: Schedule, tail_window: int = 8,
                          horizon=None) -> IndicatorEstimate:
    """Indicators of the return time ``tau_r(x, x)``."""
    return estimate_indicators(recurrence_source(alpha, x), schedule, tail_window, horizon)


# ---------------------------------------------------------------------------
# log-law cross-check

@dataclass
class LoglawReport:
    n_max: int
    radius_range: tuple[float, float]
    tau_low: float     # min log tau_r / -log r over the radius range
    tau_up: float      # max of the same
    dn_low: float      # 1 / max(-log d_n / log n) over the matching n range
    dn_up: float       # 1 / min(-log d_n / log n)
    exact_finite: bool = False

    @property
    def gap_low(self) -> float:
        return abs(self.tau_low - self.dn_low)

    @property
    def gap_up(self) -> float:
        return abs(self.tau_up - self.dn_up)

    @property
    def gap(self) -> float:
        return max(self.gap_low, self.gap_up)

    def to_json(self) -> dict:
        return {
            "n_max": self.n_max, "radius_range": list(self.radius_range),
            "tau_low": self.tau_low, "tau_up": self.tau_up,
            "dn_low": self.dn_low, "dn_up": self.dn_up,
            "gap_low": self.gap_low, "gap_up": self.gap_up, "gap": self.gap,
        }


def loglaw_crosscheck(angles, x, x0, n_max: int, per_unit: int = 16,
                      top_exponent: float = 0.5) -> LoglawReport:
    """Indicators from hitting times against the reciprocal log-law exponent of ``d_n``.

    Both pipelines use the same orbit prefix of length ``n_max``. Radii run
    from ``d_{n_max}`` (below which hits are not resolved) up to
    ``d_{n_max} ** top_exponent``; the ``n`` range is the set of times up to
    the last record of ``d_n`` whose ``d_n`` falls in that radius range.
    ``tau_r <= n`` iff ``d_n < r``.
    """
    single = not isinstance(angles, (list, tuple))
    ang = [angles] if single else list(angles)
    dn = d_n_sequence(angles, x, x0, n_max)
    r_min = dn[-1]
    if r_min == 0:
        # the orbit hits x0 exactly: every small radius is reached, finite orbit
        return LoglawReport(n_max, (0.0, 0.0), 0.0, 0.0, 0.0, 0.0, exact_finite=True)
    lo_log = neg_log(r_min)
    hi_log = lo_log * top_exponent
    # tau pipeline on a fine geometric grid strictly above r_min
    k_lo = math.ceil(hi_log * per_unit)
    k_hi = math.floor(lo_log * per_unit) - 1
    xs = tuple(x) if not single else x
    x0s = tuple(x0) if not single else x0
    ratios = []
    for k in range(k_lo, k_hi + 1):
        r = certified.rational_exp_neg(Fraction(k, per_unit))
        if not r_min < r < Fraction(1, 2):
            continue
        if single:
            rec = hit_circle(angles, xs, x0s, r, n_max)
        else:
            rec = hit_torus(ang, xs, x0s, r, n_max)
        if rec.tau is None:
            continue
        ratios.append(math.log(rec.tau) / neg_log(r))
    if not ratios:
        raise EstimationError("radius range too narrow for the tau pipeline")
    # d_n pipeline over times whose d_n lies in the same range
    r_top = math.exp(-hi_log)
    # after the last record time d_n is stale: those n belong to radii below
    # d_{n_max}, which the tau pipeline cannot resolve either
    last = dn.index(r_min) + 1
    vals = []
    for n in range(2, last + 1):
        d = dn[n - 1]
        if float(d) < r_top:
            vals.append(neg_log(d) / math.log(n))
    if not vals:
        raise EstimationError("no d_n inside the radius range")
    return LoglawReport(n_max, (float(r_min), r_top), min(ratios), max(ratios),
                        1 / max(vals), 1 / min(vals))


# ---------------------------------------------------------------------------
# exponent identities

@dataclass
class ExponentReport:
    limsup_log: float         # max over tail of -log f / log n
    liminf_log: float         # min over tail
    beta_liminf_zero: float   # sup{b : liminf n^b f -> 0}
    beta_limsup_zero: float   # sup{b : limsup n^b f -> 0}

    @property
    def gap_first(self) -> float:
        return abs(self.limsup_log - self.beta_liminf_zero)

    @property
    def gap_second(self) -> float:
        return abs(self.liminf_log - self.beta_limsup_zero)

    def to_json(self) -> dict:
        return {**self.__dict__, "gap_first": self.gap_first, "gap_second": self.gap_second}


def _blocks(n: np.ndarray, tail_from: int):
    """Dyadic blocks ``[2^j, 2^{j+1})`` of the tail."""
    j = np.floor(np.log2(n)).astype(int)
    keep = n >= tail_from
    return j[keep], keep


def _trend_beta(logn, logf, block, reducer, lo=-20.0, hi=20.0, tol=1e-4) -> float:
    """Bisection for the ``beta`` at which the blockwise trend of ``n^b f`` turns up."""
    ids = np.unique(block)

    def slope(b):
        g = b * logn + logf
        stats = np.array([reducer(g[block == i]) for i in ids])
        return np.polyfit(ids.astype(float), stats, 1)[0]

    if slope(lo) >= 0:
        return lo
    if slope(hi) <= 0:
        return hi
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if slope(mid) < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def exponent_identities(f: Sequence[float], n0: int = 1, tail_fraction: float = 0.01) -> ExponentReport:
    """Both sides of the two exponent identities on a finite sample.

    ``f[i]`` is ``f(n0 + i)``. The log-ratio sides are the max/min of
    ``-log f(n) / log n`` over the tail ``n >= tail_fraction * n_max``. The
    ``beta`` sides find where the dyadic-block minima (maxima) of
    ``n^beta f(n)`` switch from decreasing to increasing.
    """
    vals = np.asarray(f, dtype=float)
    if np.any(vals <= 0):
        raise ValueError("f must be positive")
    n = np.arange(n0, n0 + len(vals), dtype=float)
    ok = n >= 2
    n, vals = n[ok], vals[ok]
    tail_from = max(2, int(tail_fraction * n[-1]))
    block, keep = _blocks(n, tail_from)
    logn, logf = np.log(n[keep]), np.log(vals[keep])
    if len(np.unique(block)) < 3:
        raise EstimationError("need at least three dyadic blocks in the tail")
    ratio = -logf / logn
    return ExponentReport(
        float(ratio.max()), float(ratio.min()),
        _trend_beta(logn, logf, block, np.min),
        _trend_beta(logn, logf, block, np.max),
    )


@dataclass
class OrbitExponentReport:
    from_dn: float
    from_dist: float

    @property
    def gap(self) -> float:
        return abs(self.from_dn - self.from_dist)


def orbit_exponents(angles, x, x0, n_max: int, tail_fraction: float = 0.1) -> OrbitExponentReport:
    """Tail max of ``-log d_n / log n`` against that of ``-log dist(T^n x, x0) / log n``."""
    dn = d_n_sequence(angles, x, x0, n_max)
    single = not isinstance(angles, (list, tuple))
    from .orbit import angle_value, _coords, _coord
    vals = [angle_value(a) for a in ([angles] if single else angles)]
    xs = (_coord(x),) if single else _coords(x)
    ys = (_coord(x0),) if single else _coords(x0)
    L = math.lcm(*[v.denominator for v in vals], *[Fraction(c).denominator for c in xs + ys])
    A = [int(v * L) for v in vals]
    P = [int((a - b) * L) % L for a, b in zip(xs, ys)]
    n_lo = max(2, int(tail_fraction * n_max))
    best_dn = best_dist = -math.inf
    for n in range(1, n_max + 1):
        worst = 0
        for i in range(len(A)):
            P[i] = (P[i] + A[i]) % L
            worst = max(worst, min(P[i], L - P[i]))
        if n < n_lo:
            continue
        ln = math.log(n)
        if worst > 0:
            best_dist = max(best_dist, (math.log(L) - math.log(worst)) / ln)
        d = dn[n - 1]
        if d > 0:
            best_dn = max(best_dn, neg_log(d) / ln)
    return OrbitExponentReport(best_dn, best_dist)


@dataclass
class ScheduleComparison:
    estimates: dict = field(default_factory=dict)

    @property
    def max_difference(self) -> float:
        lows = [e.R_low for e in self.estimates.values()]
        return max(lows) - min(lows)
