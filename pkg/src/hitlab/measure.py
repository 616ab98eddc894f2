"""Exact Lebesgue measures of hitting-time level sets for rotations.

The set ``{x : tau_r(x) < K}`` is the union of the balls ``T^{-j} B_r(x0)``,
``1 <= j < K``, whose centres are ``K-1`` consecutive orbit points. The
three-distance theorem gives the gaps between those centres and their
multiplicities in closed form from the convergents, so the union measure is
``sum(count * min(gap, 2r))`` exactly, at any ``K``. Small cases are also
computed by explicit arc unions; the two paths must agree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import certified
from .arcs import ArcUnion
from .cf import ContinuedFraction, check_horizon, norm_q_alpha, theta
from .errors import DepthError
from .orbit import Angle, angle_value, check_ball

ARC_LIMIT = 4000


def _as_cf(alpha: Angle) -> ContinuedFraction:
    if isinstance(alpha, ContinuedFraction):
        return alpha
    return ContinuedFraction.from_fraction(Fraction(alpha) - math.floor(Fraction(alpha)))


def gap_structure(alpha: Angle, points: int) -> list[tuple[Fraction, int]]:
    """Circular gaps ``(length, multiplicity)`` between ``{j*alpha : 1 <= j <= points}``.

    Exact for the rational value of ``alpha``; once ``points`` reaches the
    period the orbit is the full set of multiples of ``1/q_N``.
    """
    if points < 1:
        raise ValueError("need at least one point")
    cf = _as_cf(alpha)
    qs = cf.pq[1]
    if cf.N == 0:
        return [(Fraction(1), 1)]
    P = min(points, qs[-1])

    def q(k):
        return 0 if k == -1 else qs[k]

    # largest k with q_k + q_{k-1} <= P
    k = 0
    while k + 1 <= cf.N and q(k + 1) + q(k) <= P:
        k += 1
    m, s = divmod(P - q(k - 1), q(k))
    th_k, th_km1 = theta(cf, k), theta(cf, k - 1)
    gaps = [(th_k, P - q(k)), (th_km1 - m * th_k, s), (th_km1 - (m - 1) * th_k, q(k) - s)]
    return [(g, c) for g, c in gaps if c > 0]


def union_measure(alpha: Angle, points: int, length) -> Fraction:
    """Measure of the union of arcs of ``length`` centred at ``j*alpha``, ``1 <= j <= points``."""
    length = Fraction(length)
    if points <= 0:
        return Fraction(0)
    if length >= 1:
        return Fraction(1)
    return sum((c * min(g, length) for g, c in gap_structure(alpha, points)), Fraction(0))


def preimage_ball(alpha: Angle, x0, r, j: int) -> ArcUnion:
    """``T^{-j} B_r(x0)``, the ball centred at ``x0 - j*alpha``."""
    return ArcUnion.ball(Fraction(x0) - j * angle_value(alpha), r)


def _horizon(alpha: Angle, steps: int, r) -> None:
    if isinstance(alpha, ContinuedFraction):
        check_horizon(alpha, steps, Fraction(r))


def locate_window(alpha: ContinuedFraction, r) -> int:
    """The ``n`` with ``||q_n a|| < 2r <= ||q_{n-1} a||`` (``n <= N-2``)."""
    two_r = 2 * Fraction(r)
    for n in range(1, alpha.N - 1):
        if norm_q_alpha(alpha, n) < two_r <= theta(alpha, n - 1):
            return n
    raise DepthError(f"2r = {two_r} lies in no convergent window at depth {alpha.N}")


def level_sets(alpha: Angle, x0, r, K: int) -> list[ArcUnion]:
    """``[{tau_r = k} for k = 1..K]`` as exact arc unions."""
    r = check_ball(r)
    _horizon(alpha, K, r)
    out, seen = [], ArcUnion()
    for k in range(1, K + 1):
        ball = preimage_ball(alpha, x0, r, k)
        out.append(ball - seen)
        seen = seen | ball
    return out


def level_set(alpha: Angle, x0, r, k: int) -> ArcUnion:
    """``{x : tau_r(x) = k}`` as an exact arc union."""
    if k < 1:
        raise ValueError("k >= 1")
    if isinstance(alpha, ContinuedFraction):
        locate_window(alpha, r)
    return level_sets(alpha, x0, r, k)[-1]


def tail_measure(alpha: Angle, x0, r, K: int, method: str = "auto") -> Fraction:
    """``mu{x : tau_r(x) < K}``, the measure of ``T^{-1}B u ... u T^{-(K-1)}B``.

    ``method`` is ``"gaps"`` (closed form), ``"arcs"`` (explicit union) or
    ``"auto"`` (arcs for small ``K``).
    """
    r = check_ball(r)
    if K < 1:
        raise ValueError("K >= 1")
    _horizon(alpha, K, r)
    if method == "auto":
        method = "arcs" if K <= 64 else "gaps"
    if method == "gaps":
        return union_measure(alpha, K - 1, 2 * r)
    seen = ArcUnion()
    for j in range(1, K):
        seen = seen | preimage_ball(alpha, x0, r, j)
    return seen.total_measure


def level_measure(alpha: Angle, r, k: int) -> Fraction:
    """``mu{tau_r = k}`` from two tail measures (any ``k``)."""
    r = check_ball(r)
    return union_measure(alpha, k, 2 * r) - union_measure(alpha, k - 1, 2 * r)


# ---------------------------------------------------------------------------
# key lemma

@dataclass(frozen=True)
class KeyLemmaQuery:
    """Radius ``r`` inside the window ``M ||q_n a||^(1/beta) <= 2r <= ||q_{n-1} a|| / N``."""

    beta: Fraction
    M: Fraction
    N: Fraction
    n: int
    r: Fraction

    @classmethod
    def make(cls, alpha: ContinuedFraction, beta, M, N, n: int, r) -> "KeyLemmaQuery":
        q = cls(certified.param_fraction(beta), certified.param_fraction(M),
                certified.param_fraction(N), int(n), Fraction(r))
        ok, why = q.window_ok(alpha)
        if not ok:
            raise ValueError(f"window condition fails: {why}")
        return q

    def window_ok(self, alpha: ContinuedFraction) -> tuple[bool, str]:
        """Certified check of the full chain of window inequalities."""
        if not (self.beta >= 1 and self.M >= 1 and self.N >= 1):
            return False, "beta, M, N must be >= 1"
        if not 1 <= self.n <= alpha.N - 2:
            return False, f"n={self.n} outside 1..{alpha.N - 2}"
        th, th_prev = norm_q_alpha(alpha, self.n), theta(alpha, self.n - 1)
        lo, hi = scaled_root(th, self.beta, self.M)
        two_r = 2 * self.r
        if not th < lo:
            return False, "||q_n a|| < M ||q_n a||^(1/beta) not certified"
        if not hi <= two_r:
            return False, "lower window edge not certified below 2r"
        if not two_r <= th_prev / self.N:
            return False, "2r exceeds ||q_{n-1} a|| / N"
        if not th_prev / self.N < th_prev:
            return False, "N must exceed 1"
        return True, "ok"

    def to_json(self) -> dict:
        f = certified.fraction_to_str
        return {"beta": f(self.beta), "M": f(self.M), "N": f(self.N), "n": self.n, "r": f(self.r)}


def scaled_root(theta_n: Fraction, beta, M=1, prec: int = 160) -> tuple[Fraction, Fraction]:
    """Certified enclosure of ``M * theta_n ** (1/beta)``."""
    b = certified.param_fraction(beta)
    lo, hi = certified.power_bounds(theta_n, 1 / b, prec)
    M = Fraction(M)
    return M * lo, M * hi


def lemma_K(r, beta) -> int:
    """``ceil((2r)^(-beta))``: ``tau < (2r)^(-beta)`` iff ``tau < K``."""
    return certified.ceil_power(1 / (2 * Fraction(r)), beta)


@dataclass(frozen=True)
class KeyLemmaResult:
    query: KeyLemmaQuery
    K: int
    measure: Fraction
    bound_lo: Fraction
    bound_hi: Fraction

    @property
    def holds(self) -> bool:
        return self.measure <= self.bound_lo

    def to_json(self) -> dict:
        f = certified.fraction_to_str
        return {**self.query.to_json(), "K": str(self.K), "measure": f(self.measure),
                "bound_lo": f(self.bound_lo), "bound_hi": f(self.bound_hi), "holds": self.holds}


def key_lemma_check(alpha: ContinuedFraction, query: KeyLemmaQuery) -> KeyLemmaResult:
    """Exact ``mu{tau_r < (2r)^-beta}`` against the certified bound ``1/N + 1/M^beta``."""
    K = lemma_K(query.r, query.beta)
    meas = tail_measure(alpha, 0, query.r, K, method="gaps")
    lo, hi = certified.power_bounds(query.M, -query.beta)
    return KeyLemmaResult(query, K, meas, 1 / query.N + lo, 1 / query.N + hi)


def geometric_radius(lo: Fraction, hi: Fraction, digits: int = 40) -> Fraction:
    """A rational ``r`` with ``2r`` near the geometric mean of ``[lo, hi]``."""
    mid = math.exp((math.log(lo) + math.log(hi)) / 2) if lo > 0 else float(hi) / 2
    return Fraction(mid / 2).limit_denominator(10 ** digits)


def key_lemma_queries(alpha: ContinuedFraction, betas: Sequence, Ms: Sequence, Ns: Sequence,
                      levels: Sequence[int] | None = None) -> list[KeyLemmaQuery]:
    """Every valid query on the ``(beta, M, N, n)`` grid, one radius per window."""
    out = []
    ns = levels if levels is not None else range(1, alpha.N - 1)
    for n in ns:
        th, th_prev = norm_q_alpha(alpha, n), theta(alpha, n - 1)
        for b in betas:
            for M in Ms:
                for N in Ns:
                    lo = scaled_root(th, b, M)[1]
                    hi = th_prev / Fraction(certified.param_fraction(N))
                    if not lo < hi:
                        continue
                    r = _inner_radius(lo, hi)
                    q = KeyLemmaQuery(certified.param_fraction(b), certified.param_fraction(M),
                                      certified.param_fraction(N), n, r)
                    if q.window_ok(alpha)[0]:
                        out.append(q)
    return out


def _inner_radius(lo: Fraction, hi: Fraction) -> Fraction:
    """Rational ``r`` with ``lo <= 2r <= hi``, near the geometric mean."""
    log_r = (_log(lo) + _log(hi)) / 2 - math.log(2)
    e = math.ceil(-log_r / math.log(2)) + 60
    r = Fraction(round(math.exp(log_r + e * math.log(2))), 1 << e)
    if lo <= 2 * r <= hi:
        return r
    return (lo + hi) / 4


def _log(x: Fraction) -> float:
    return math.log(x.numerator) - math.log(x.denominator)


# ---------------------------------------------------------------------------
# window schedule and summability

@dataclass
class Window:
    """One interval of radii ``2r in [lo, hi]`` attached to a circle factor."""

    factor: str        # "alpha" or "alpha_prime"
    n: int
    M: Fraction
    N_lo: Fraction     # certified enclosure of the real N_n
    N_hi: Fraction
    lo: tuple[Fraction, Fraction]   # enclosure of the lower edge
    hi: tuple[Fraction, Fraction]   # enclosure of the upper edge

    @property
    def nonempty(self) -> bool:
        return self.lo[1] <= self.hi[0]

    @property
    def ratio(self) -> float:
        """``hi / lo``, the coverage ratio driven to infinity by the class condition."""
        return math.exp(_log(self.hi[0]) - _log(self.lo[1])) if self.lo[1] > 0 else math.inf

    @property
    def log_ratio(self) -> float:
        return _log(self.hi[0]) - _log(self.lo[1])

    @property
    def degenerate(self) -> bool:
        """N below 1 makes the summability bound vacuous."""
        return self.N_hi < 1

    def to_json(self) -> dict:
        return {
            "factor": self.factor, "n": self.n, "M": str(self.M),
            "N": float(self.N_lo), "lo": float(self.lo[1]), "hi": float(self.hi[0]),
            "nonempty": self.nonempty, "log_ratio": self.log_ratio, "degenerate": self.degenerate,
        }


def window_schedule(pair, beta, levels: int | None = None) -> list[Window]:
    """Interleaved windows ``I_n, I'_n`` with ``M_n = M'_n = n``.

    ``N_n = ||q_{n-1} a|| / (M'_{n-1} ||q'_{n-1} a'||^(1/b))`` and
    ``N'_n = ||q'_{n-1} a'|| / (M_n ||q_n a||^(1/b))`` make the upper edge of
    each window equal to the lower edge of the previous one, so nonempty
    windows tile a right-neighbourhood of zero. Windows are ordered from
    large to small radii.
    """
    b = certified.param_fraction(beta)
    g = certified.param_fraction(pair.gamma)
    if not b < g:
        raise ValueError(f"beta={beta} must be < gamma={pair.gamma}")
    if b < 1:
        raise ValueError("beta must be >= 1")
    a, ap = pair.alpha, pair.alpha_prime
    n_max = min(a.N - 2, ap.N - 2)
    if levels is not None:
        n_max = min(n_max, levels + 1)

    def edge(cf, n, M):
        return scaled_root(norm_q_alpha(cf, n), b, M)

    out = []
    for n in range(2, n_max + 1):
        # I_n: [n ||q_n a||^(1/b), (n-1) ||q'_{n-1} a'||^(1/b)]
        lo = edge(a, n, n)
        hi = edge(ap, n - 1, n - 1)
        th_prev = theta(a, n - 1)
        out.append(Window("alpha", n, Fraction(n), th_prev / hi[1], th_prev / hi[0], lo, hi))
        # I'_n: [n ||q'_n a'||^(1/b), n ||q_n a||^(1/b)]
        lo_p = edge(ap, n, n)
        th_prev_p = theta(ap, n - 1)
        out.append(Window("alpha_prime", n, Fraction(n), th_prev_p / lo[1], th_prev_p / lo[0], lo_p, lo))
    return out


def chained(windows: Sequence[Window]) -> bool:
    """Consecutive windows share an edge exactly (upper of one = lower of the previous)."""
    return all(w2.hi == w1.lo for w1, w2 in zip(windows, windows[1:]))


@dataclass
class WindowSum:
    window: Window
    indices: list[int]
    measures: list[Fraction]
    other_measures: list[Fraction]
    total: Fraction
    bound_beta: float
    bound_gamma: float
    ambiguous: list[int] = field(default_factory=list)

    @property
    def within_beta(self) -> bool:
        return float(self.total) <= self.bound_beta

    @property
    def within_gamma(self) -> bool:
        return float(self.total) <= self.bound_gamma

    def to_json(self) -> dict:
        return {
            **self.window.to_json(),
            "indices": self.indices,
            "sum": certified.fraction_to_str(self.total),
            "sum_float": float(self.total),
            "bound_beta": self.bound_beta,
            "bound_gamma": self.bound_gamma,
            "within_beta": self.within_beta,
            "within_gamma": self.within_gamma,
            "ambiguous_indices": self.ambiguous,
        }


@dataclass
class BorelCantelliReport:
    beta: Fraction
    gamma: Fraction
    windows: list[WindowSum]

    def _live(self):
        return [w for w in self.windows if not w.window.degenerate and w.window.nonempty]

    @property
    def partial_sums(self) -> list[float]:
        out, s = [], Fraction(0)
        for w in self._live():
            s += w.total
            out.append(float(s))
        return out

    @property
    def partial_bounds(self) -> list[tuple[float, float]]:
        out, sb, sg = [], 0.0, 0.0
        for w in self._live():
            sb += w.bound_beta
            sg += w.bound_gamma
            out.append((sb, sg))
        return out

    @property
    def all_within_beta(self) -> bool:
        return all(w.within_beta for w in self._live())

    @property
    def all_within_gamma(self) -> bool:
        return all(w.within_gamma for w in self._live())

    def to_json(self) -> dict:
        return {
            "beta": certified.fraction_to_str(self.beta),
            "gamma": certified.fraction_to_str(self.gamma),
            "windows": [w.to_json() for w in self.windows],
            "partial_sums": self.partial_sums,
            "partial_bounds_beta": [b for b, _ in self.partial_bounds],
            "partial_bounds_gamma": [g for _, g in self.partial_bounds],
            "all_within_beta": self.all_within_beta,
            "all_within_gamma": self.all_within_gamma,
        }


def radius(i: int) -> Fraction:
    """``e^{-i}`` rationalized by certified dyadic rounding."""
    return certified.rational_exp_neg(i)


def _series_bound(N: Fraction, M: Fraction, expo: Fraction) -> float:
    e = float(expo)
    return (1 / float(N)) / (1 - math.exp(-1)) + (float(M) ** -e) / (1 - math.exp(-e))


def borel_cantelli_report(pair, beta, levels: int | None = None, max_index: int = 20000) -> BorelCantelliReport:
    """Exact ``mu(A_i)`` summed over each window against the geometric-series bound.

    ``A_i = {tau_{r_i} < (2 r_i)^{-beta}}`` on the factor the window belongs to,
    with ``r_i = e^{-i}`` rationalized. ``mu^2(A-bar_i)`` is bounded by the
    minimum of the two factors, reported alongside.
    """
    b = certified.param_fraction(beta)
    g = certified.param_fraction(pair.gamma)
    wins = window_schedule(pair, b, levels)
    out = []
    for w in wins:
        own = pair.alpha if w.factor == "alpha" else pair.alpha_prime
        other = pair.alpha_prime if w.factor == "alpha" else pair.alpha
        idx, meas, other_meas, amb = [], [], [], []
        if w.nonempty and not w.degenerate:
            # 2 e^{-i} in [lo, hi]  <=>  i in [log(2/hi), log(2/lo)]
            i_min = max(1, math.floor(math.log(2) - _log(w.hi[0])) - 1)
            i_max = math.ceil(math.log(2) - _log(w.lo[1])) + 1
            if i_max > max_index:
                raise ValueError(f"window {w.factor} n={w.n} needs radius index {i_max} > {max_index}")
            for i in range(i_min, i_max + 1):
                r = radius(i)
                two_r = 2 * r
                if w.lo[1] <= two_r <= w.hi[0]:
                    K = lemma_K(r, b)
                    idx.append(i)
                    meas.append(tail_measure(own, 0, r, K, method="gaps"))
                    other_meas.append(tail_measure(other, 0, r, K, method="gaps"))
                elif w.lo[0] <= two_r <= w.hi[1]:
                    amb.append(i)
        total = sum(meas, Fraction(0))
        out.append(WindowSum(w, idx, meas, other_meas, total,
                             _series_bound(w.N_lo, w.M, b), _series_bound(w.N_lo, w.M, g), amb))
    return BorelCantelliReport(b, g, out)


# ---------------------------------------------------------------------------
# Lebesgue balls on the torus

def ball_measure(r, d: int) -> Fraction:
    """Lebesgue measure ``(2r)^d`` of a sup-metric ball (``r < 1/2``)."""
    r = check_ball(r)
    return (2 * r) ** d


def local_dimension_probe(x0, radii: Sequence, d: int | None = None) -> list[float]:
    """``log mu(B_r(x0)) / log r`` along the schedule (Lebesgue, sup metric)."""
    if d is None:
        d = len(x0) if hasattr(x0, "__len__") else getattr(x0, "d", 1)
    if d not in (1, 2, 3):
        raise ValueError("d must be 1, 2 or 3")
    out = []
    for r in radii:
        m = ball_measure(r, d)
        out.append(_log(m) / _log(Fraction(r)))
    return out


def doubling_ratio(r, lam, d: int) -> Fraction:
    """Exact ``mu(B_{(1+lam) r}) / mu(B_r)``, equal to ``(1+lam)^d``."""
    r, lam = Fraction(r), Fraction(lam)
    return ball_measure((1 + lam) * r, d) / ball_measure(r, d)


def doubling_holds(r, lam, d: int) -> bool:
    """``mu(B_{(1+lam) r}) <= mu(B_r) (1 + C lam)`` with ``C = d 2^{d-1}``, ``lam <= 1``."""
    lam = Fraction(lam)
    return doubling_ratio(r, lam, d) <= 1 + d * 2 ** (d - 1) * lam
