"""Translation flows on T^2 and T^3, positive reparametrizations, time-1 maps
and Poincare sections, with continuous hitting times in the sup metric."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy import integrate

from . import kernels
from .certified import fraction_from_str, fraction_to_str
from .errors import NeverHitsError, ResourceError
from .orbit import TorusPoint, angle_value, hit_torus

BISECT_TOL = 1e-10
DEFAULT_STEP_BUDGET = 10**8


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class TranslationFlow:
    """The flow of the constant vector field ``direction`` on T^d."""

    direction: tuple[Fraction, ...]
    provenance: str = "explicit"

    def __post_init__(self):
        dirn = tuple(Fraction(a) for a in self.direction)
        if len(dirn) not in (2, 3):
            raise ValueError("flows are supported on T^2 and T^3 only")
        if not any(dirn):
            raise ValueError("direction must be nonzero")
        object.__setattr__(self, "direction", dirn)

    @property
    def d(self) -> int:
        return len(self.direction)

    @classmethod
    def from_angles(cls, *angles) -> "TranslationFlow":
        """Direction ``(1, a_1, ..., a_k)`` from exact angles or continued fractions."""
        tags = []
        for a in angles:
            depth = getattr(a, "N", None)
            tags.append(f"cf depth {depth}" if depth is not None else "rational")
        return cls((Fraction(1),) + tuple(angle_value(a) for a in angles),
                   "(1, " + ", ".join(tags) + ")")

    @property
    def floats(self) -> tuple[float, ...]:
        return tuple(float(a) for a in self.direction)

    @property
    def sup_speed(self) -> float:
        return max(abs(a) for a in self.floats)

    def to_json(self) -> dict:
        return {"direction": [fraction_to_str(a) for a in self.direction],
                "provenance": self.provenance}

    @classmethod
    def from_json(cls, obj: dict) -> "TranslationFlow":
        return cls(tuple(fraction_from_str(str(a)) for a in obj["direction"]),
                   obj.get("provenance", "explicit"))


def _up(x: float) -> float:
    return math.nextafter(x, math.inf)


def _down(x: float) -> float:
    return math.nextafter(x, -math.inf)


@dataclass(frozen=True)
class Reparametrization:
    """Speed ``phi(x) = sum a cos(2 pi k.x) + b sin(2 pi k.x)`` over ``terms``.

    Each term is ``(k, a, b)`` with an integer frequency vector ``k``; the
    constant is the term with ``k = 0``. ``C`` satisfies ``1/C < phi < C``.
    """

    terms: tuple[tuple[tuple[int, ...], float, float], ...]
    C: float | None = None
    lo: float = field(init=False)
    hi: float = field(init=False)

    def __post_init__(self):
        terms = tuple((tuple(int(k) for k in kv), float(a), float(b)) for kv, a, b in self.terms)
        dims = {len(kv) for kv, _, _ in terms}
        if len(dims) != 1:
            raise ValueError("all frequency vectors must share one dimension")
        object.__setattr__(self, "terms", terms)
        lo, hi = self._bounds()
        if not lo > 0:
            raise ValueError(f"speed is not certified positive (lower bound {lo})")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if self.C is None:
            object.__setattr__(self, "C", _up(max(1.0 / _down(lo), hi)) * (1 + 1e-12))
        elif not (1.0 / self.C < lo and hi < self.C):
            raise ValueError(f"C={self.C} does not certify 1/C < phi < C (bounds [{lo}, {hi}])")

    def _bounds(self) -> tuple[float, float]:
        const = sum(a for kv, a, _ in self.terms if not any(kv))
        spread = 0.0
        for kv, a, b in self.terms:
            if any(kv):
                spread = _up(spread + _up(math.hypot(a, b)))
        return _down(const - spread), _up(const + spread)

    @property
    def d(self) -> int:
        return len(self.terms[0][0])

    @classmethod
    def constant(cls, value: float, d: int) -> "Reparametrization":
        return cls((((0,) * d, value, 0.0),))

    @classmethod
    def cosine(cls, d: int, amplitude: float = 0.5, axis: int = 0, C: float | None = None) -> "Reparametrization":
        """``1 + amplitude * cos(2 pi x_axis)``."""
        k = tuple(1 if i == axis else 0 for i in range(d))
        return cls((((0,) * d, 1.0, 0.0), (k, amplitude, 0.0)), C)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        coef = np.array([[a, b] for _, a, b in self.terms], dtype=float)
        freqs = np.array([kv for kv, _, _ in self.terms], dtype=float)
        return coef, freqs

    def __call__(self, x) -> np.ndarray:
        coef, freqs = self.arrays()
        ph = 2 * np.pi * (np.asarray(x, dtype=float) @ freqs.T)
        return np.cos(ph) @ coef[:, 0] + np.sin(ph) @ coef[:, 1]

    def gradient(self, x) -> np.ndarray:
        coef, freqs = self.arrays()
        ph = 2 * np.pi * (np.asarray(x, dtype=float) @ freqs.T)
        w = -np.sin(ph) * coef[:, 0] + np.cos(ph) * coef[:, 1]
        return 2 * np.pi * (w @ freqs)

    def scaled(self, factor: float) -> "Reparametrization":
        return Reparametrization(tuple((kv, a * factor, b * factor) for kv, a, b in self.terms))

    def to_json(self) -> dict:
        return {"terms": [[list(kv), a, b] for kv, a, b in self.terms], "C": self.C}

    @classmethod
    def from_json(cls, obj: dict) -> "Reparametrization":
        return cls(tuple((tuple(t[0]), t[1], t[2]) for t in obj["terms"]), obj.get("C"))


@dataclass(frozen=True)
class FlowState:
    position: tuple[float, ...]
    time: float

    def __post_init__(self):
        object.__setattr__(self, "position", tuple(float(p) % 1.0 for p in self.position))


@dataclass(frozen=True)
class FlowHit:
    """First entry time (None when not found by ``t_max``)."""

    radius: Fraction
    time: Fraction | float | None
    t_max: float
    step: float | None = None
    tolerance: float = 0.0

    @property
    def censored(self) -> bool:
        return self.time is None


# ---------------------------------------------------------------------------
# exact sweep for straight-line motion

def _coord_window(delta, v, r, t):
    """Current or next admissible interval ``[l, u)`` of ``||delta + s v|| < r`` at ``s >= t``.

    ``v`` must be nonzero. Works for Fractions and floats alike.
    """
    if v < 0:
        delta, v = -delta, -v
    k = math.floor(delta + t * v - r) + 1
    return (k - r - delta) / v, (k + r - delta) / v


def first_common_time(deltas: Sequence, velocities: Sequence, r, t_max):
    """Least ``t >= 0`` in the closure of ``{t : ||delta_i + t v_i|| < r for all i}``.

    Returns None when it exceeds ``t_max``. Coordinates with zero velocity
    must already satisfy the strict inequality or NeverHitsError is raised.
    """
    moving = []
    for dl, v in zip(deltas, velocities):
        if v == 0:
            off = dl - math.floor(dl)
            if min(off, 1 - off) >= r:
                raise NeverHitsError(f"frozen coordinate at distance {min(off, 1 - off)} >= r")
        else:
            moving.append((dl, v))
    t = 0 * r
    while True:
        moved = False
        for dl, v in moving:
            lo, _ = _coord_window(dl, v, r, t)
            if lo > t:
                t, moved = lo, True
                if t > t_max:
                    return None
        if not moved:
            return t


def _check_dims(flow, *pts):
    for p in pts:
        if len(p) != flow.d:
            raise ValueError(f"point of dimension {len(p)} for a flow on T^{flow.d}")


def flow_hit(flow: TranslationFlow, x, x0, r, t_max) -> FlowHit:
    """Exact first entry time of the unreparametrized flow into the open sup-ball."""
    x, x0 = tuple(Fraction(a) for a in x), tuple(Fraction(a) for a in x0)
    _check_dims(flow, x, x0)
    r = Fraction(r)
    if not 0 < r < Fraction(1, 2):
        raise ValueError("radius must lie in (0, 1/2)")
    t = first_common_time([a - b for a, b in zip(x, x0)], flow.direction, r, Fraction(t_max))
    return FlowHit(r, t, float(t_max))


# ---------------------------------------------------------------------------
# reparametrized flows

def step_size(flow: TranslationFlow, reparam: Reparametrization, r) -> float:
    """Step moving the point by at most ``r/100`` in the sup metric."""
    return float(r) / (100.0 * reparam.C * flow.sup_speed)


def _sup_dist(x, x0) -> float:
    best = 0.0
    for a, b in zip(x, x0):
        f = (a - b) % 1.0
        best = max(best, min(f, 1.0 - f))
    return best


class _Integrator:
    def __init__(self, flow, reparam, backend=None):
        if reparam.d != flow.d:
            raise ValueError("speed and flow dimensions differ")
        self.K = kernels.get(backend)
        self.coef, self.freqs = reparam.arrays()
        self.dirn = list(flow.floats)
        self.norm2 = sum(a * a for a in self.dirn)

    def step(self, x, h):
        return list(self.K.rk4_step(self.coef, self.freqs, self.dirn, list(x), h))

    def advance(self, x, h, n):
        """State after ``n`` fixed steps."""
        if n <= 0:
            return list(x)
        # a negative radius never triggers, so this returns the final state
        _, cur = self.K.rk4_first_entry(self.coef, self.freqs, self.dirn, list(x), list(x), -1.0, h, n)
        return list(cur)

    def arc(self, x, y) -> float:
        """Arc parameter of ``y`` along the line through ``x`` (both unwrapped)."""
        return sum((b - a) * v for a, b, v in zip(x, y, self.dirn)) / self.norm2

    def bisect(self, cur, h, g) -> float:
        """Least ``s`` in ``[0, h]`` with ``g(step(cur, s)) >= 0`` to BISECT_TOL."""
        lo, hi = 0.0, h
        while hi - lo > BISECT_TOL:
            mid = 0.5 * (lo + hi)
            if g(self.step(cur, mid)) >= 0:
                hi = mid
            else:
                lo = mid
        return hi


def _steps_for(t_max, h, budget):
    n = math.ceil(float(t_max) / h)
    if n > budget:
        raise ResourceError(f"{n} integration steps exceed the budget {budget}")
    return n


def reparam_flow_hit(flow: TranslationFlow, reparam: Reparametrization, x, x0, r, t_max, *,
                     step_budget: int = DEFAULT_STEP_BUDGET, backend=None) -> FlowHit:
    """First entry time of ``x' = phi(x) * direction`` into the open sup-ball.

    Fixed-step RK4 flags any step ending within ``r`` plus one step's travel
    of the target; since orbits are straight lines, the segment of such a
    step is intersected with the ball exactly and the crossing time is then
    refined by bisection.
    """
    r = float(r)
    x, x0 = [float(a) for a in x], [float(a) for a in x0]
    _check_dims(flow, x, x0)
    if not 0 < r < 0.5:
        raise ValueError("radius must lie in (0, 1/2)")
    h = step_size(flow, reparam, r)
    n_left = _steps_for(t_max, h, step_budget)
    tol = BISECT_TOL + 1e-9 * float(t_max)
    if _sup_dist(x, x0) < r:
        return FlowHit(Fraction(r), 0.0, float(t_max), h, tol)
    vel = [v for v in flow.floats]
    for v, a, b in zip(vel, x, x0):
        if v == 0:
            f = (a - b) % 1.0
            if min(f, 1.0 - f) >= r:
                raise NeverHitsError("frozen coordinate outside the ball")
    integ = _Integrator(flow, reparam, backend)
    r_detect = r * 1.0101
    state, t_base = x, 0.0
    while n_left > 0:
        idx, cur = integ.K.rk4_first_entry(integ.coef, integ.freqs, integ.dirn, state, x0,
                                           r_detect, h, n_left)
        if idx < 0:
            break
        cur = list(cur)
        t_cur = t_base + idx * h
        nxt = integ.step(cur, h)
        span = integ.arc(cur, nxt)
        lam = first_common_time([a - b for a, b in zip(cur, x0)], vel, r, span)
        if lam is not None:
            s = integ.bisect(cur, h, lambda y: integ.arc(cur, y) - lam)
            t = t_cur + s
            if t <= t_max:
                return FlowHit(Fraction(r), t, float(t_max), h, tol)
            break
        state, t_base = nxt, t_cur + h
        n_left -= idx + 1
    return FlowHit(Fraction(r), None, float(t_max), h, tol)


def quadrature_hit(flow: TranslationFlow, reparam: Reparametrization, x, x0, r, t_max_flow) -> float | None:
    """Independent oracle: time to travel the exact entry arc, ``int ds / phi``."""
    hit = flow_hit(flow, x, x0, r, t_max_flow)
    if hit.time is None:
        return None
    lam = float(hit.time)
    xs, dirn = np.array([float(a) for a in x]), np.array(flow.floats)
    val, _ = integrate.quad(lambda s: 1.0 / float(reparam(xs + s * dirn)), 0.0, lam,
                            limit=max(200, int(20 * lam * flow.sup_speed) + 50),
                            epsabs=1e-12, epsrel=1e-12)
    return val


def time1_map(flow: TranslationFlow, reparam: Reparametrization | None, x, *, steps: int | None = None,
              backend=None):
    """Time-1 map. Exact translation when ``reparam`` is None."""
    if reparam is None:
        return TorusPoint(tuple(Fraction(a) + v for a, v in zip(x, flow.direction)))
    integ = _Integrator(flow, reparam, backend)
    n = steps or max(100, math.ceil(100 * reparam.C * flow.sup_speed))
    return FlowState(tuple(integ.advance([float(a) for a in x], 1.0 / n, n)), 1.0)


def discrete_hit(flow: TranslationFlow, reparam: Reparametrization | None, x, x0, r, horizon: int, *,
                 steps: int | None = None, backend=None) -> FlowHit:
    """Hitting time of the time-1 map: first ``n >= 1`` with ``Phi_n(x)`` in the ball."""
    if reparam is None:
        r = Fraction(r)
        xs, ys = [Fraction(a) for a in x], [Fraction(a) for a in x0]
        live = []
        for v, a, b in zip(flow.direction, xs, ys):
            if v.denominator == 1:
                off = (a - b) % 1
                if min(off, 1 - off) >= r:
                    return FlowHit(r, None, float(horizon))
            else:
                live.append((v, a, b))
        if not live:
            return FlowHit(r, 1, float(horizon))
        rec = hit_torus([v for v, _, _ in live], [a for _, a, _ in live], [b for _, _, b in live], r, horizon)
        return FlowHit(r, rec.tau, float(horizon))
    integ = _Integrator(flow, reparam, backend)
    n = steps or max(100, math.ceil(100 * reparam.C * flow.sup_speed))
    cur = [float(a) for a in x]
    for t in range(1, horizon + 1):
        cur = integ.advance(cur, 1.0 / n, n)
        if _sup_dist(cur, x0) < float(r):
            return FlowHit(Fraction(r), t, float(horizon))
    return FlowHit(Fraction(r), None, float(horizon))


@dataclass(frozen=True)
class Map1Check:
    discrete: int | None
    continuous: float | None
    holds: bool


def map1_check(flow, reparam, x, x0, r, horizon: int, *, backend=None) -> Map1Check:
    """Compare hitting times of the time-1 map and of the flow itself."""
    disc = discrete_hit(flow, reparam, x, x0, r, horizon, backend=backend).time
    if reparam is None:
        cont = flow_hit(flow, x, x0, r, horizon).time
    else:
        cont = reparam_flow_hit(flow, reparam, x, x0, r, horizon, backend=backend).time
    if disc is None:
        holds = True
    else:
        holds = cont is not None and float(cont) <= disc + BISECT_TOL
    return Map1Check(disc, None if cont is None else float(cont), holds)


# ---------------------------------------------------------------------------
# sections

@dataclass(frozen=True)
class SectionPoint:
    """First return to ``{x_1 = c}``: the remaining coordinates and the time taken."""

    point: TorusPoint | tuple[float, ...]
    time: Fraction | float


def section_angles(flow: TranslationFlow) -> tuple[Fraction, ...]:
    """Translation vector of the section map of the unreparametrized flow."""
    a1 = flow.direction[0]
    if a1 == 0:
        raise ValueError("the flow is parallel to the section")
    return tuple(v / a1 for v in flow.direction[1:])


def poincare_section(flow: TranslationFlow, reparam: Reparametrization | None, c, x, *,
                     step_budget: int = DEFAULT_STEP_BUDGET, backend=None) -> SectionPoint:
    """First ``t > 0`` with ``x_1(t) = c`` and the point reached there."""
    a1 = flow.direction[0]
    if a1 == 0:
        raise ValueError("the flow is parallel to the section")
    if reparam is None:
        xs, c = [Fraction(v) for v in x], Fraction(c)
        gap = (c - xs[0]) % 1 if a1 > 0 else (xs[0] - c) % 1
        if gap == 0:
            gap = Fraction(1)
        t0 = gap / abs(a1)
        return SectionPoint(TorusPoint(tuple(a + t0 * v for a, v in zip(xs[1:], flow.direction[1:]))), t0)
    if a1 < 0:
        raise ValueError("reparametrized sections need a positive first direction component")
    integ = _Integrator(flow, reparam, backend)
    xs = [float(v) for v in x]
    gap = (float(c) - xs[0]) % 1.0 or 1.0
    target = xs[0] + gap
    h = 1.0 / max(100, math.ceil(100 * reparam.C * flow.sup_speed))
    n = _steps_for(reparam.C * gap / float(a1) + 1.0, h, step_budget)
    idx, cur = integ.K.rk4_section(integ.coef, integ.freqs, integ.dirn, xs, target, h, n)
    if idx < 0:
        raise ResourceError("no section crossing within the step budget")
    cur = list(cur)
    s = integ.bisect(cur, h, lambda y: y[0] - target)
    end = integ.step(cur, s)
    return SectionPoint(tuple(v % 1.0 for v in end[1:]), idx * h + s)


@dataclass(frozen=True)
class SectionComparison:
    radius: Fraction
    K: Fraction
    tau_flow: Fraction | None
    tau_section: int | None

    @property
    def ratio(self) -> float | None:
        if self.tau_flow is None or not self.tau_section:
            return None
        return float(self.tau_flow) / self.tau_section


def section_comparison(flow: TranslationFlow, x, y, r, K, horizon: int) -> SectionComparison:
    """Flow hitting time of ``B_r(y)`` against the section map's time for ``B_{Kr}``.

    ``y`` lies on the section ``{x_1 = y_1}``; exact for the unreparametrized flow.
    """
    r, K = Fraction(r), Fraction(K)
    tf = flow_hit(flow, x, y, r, horizon).time
    sp = poincare_section(flow, None, Fraction(y[0]), x)
    ts = hit_torus(list(section_angles(flow)), sp.point, [Fraction(v) for v in y[1:]], K * r, horizon).tau
    return SectionComparison(r, K, tf, ts)


def measured_constant(comparisons: Sequence[SectionComparison]) -> float | None:
    """Largest ``C`` with ``tau_flow >= C * tau_section`` on every usable comparison."""
    ratios = [c.ratio for c in comparisons if c.ratio is not None]
    return min(ratios) if ratios else None


# ---------------------------------------------------------------------------
# invariant density check

@dataclass(frozen=True)
class DensityCheck:
    mass_before: float
    mass_after: float
    relative_error: float
    max_pointwise: float
    samples: int


def density_check(flow: TranslationFlow, reparam: Reparametrization, *, n_samples: int = 10**5,
                  corner=None, side: float = 0.25, steps: int = 100, seed: int = 0) -> DensityCheck:
    """Mass of a cube under the density ``1/phi`` before and after the time-1 map.

    The image mass is computed by change of variables with the Jacobian from
    the variational equation, so both sides are Monte Carlo means over the
    same samples.
    """
    d = flow.d
    rng = np.random.default_rng(seed)
    corner = np.zeros(d) if corner is None else np.asarray(corner, dtype=float)
    x = corner + side * rng.random((n_samples, d))
    a = np.array(flow.floats)
    J = np.broadcast_to(np.eye(d), (n_samples, d, d)).copy()
    h = 1.0 / steps

    coef, freqs = reparam.arrays()
    kf = 2 * np.pi * freqs

    def rhs(x, J):
        ph = x @ kf.T
        c, s = np.cos(ph), np.sin(ph)
        phi = c @ coef[:, 0] + s @ coef[:, 1]
        g = (c * coef[:, 1] - s * coef[:, 0]) @ kf
        gJ = (g[:, :, None] * J).sum(axis=1)
        return phi[:, None] * a, a[None, :, None] * gJ[:, None, :]

    x0 = x.copy()
    for _ in range(steps):
        k1x, k1J = rhs(x, J)
        k2x, k2J = rhs(x + 0.5 * h * k1x, J + 0.5 * h * k1J)
        k3x, k3J = rhs(x + 0.5 * h * k2x, J + 0.5 * h * k2J)
        k4x, k4J = rhs(x + h * k3x, J + h * k3J)
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        J = J + h / 6 * (k1J + 2 * k2J + 2 * k3J + k4J)
    before = 1.0 / reparam(x0)
    after = np.linalg.det(J) / reparam(x)
    mb, ma = float(before.mean()) * side**d, float(after.mean()) * side**d
    return DensityCheck(mb, ma, abs(ma - mb) / mb, float(np.max(np.abs(after / before - 1))), n_samples)


def trajectory(flow: TranslationFlow, reparam: Reparametrization | None, x, t_max: float, dt: float, *,
               backend=None) -> list[tuple[float, ...]]:
    """Rows ``(t, x_1, ..., x_d)`` sampled every ``dt`` up to ``t_max``."""
    n_out = int(math.floor(t_max / dt + 1e-9))
    rows = []
    if reparam is None:
        xs = [float(a) for a in x]
        for i in range(n_out + 1):
            t = i * dt
            rows.append((t,) + tuple((a + t * v) % 1.0 for a, v in zip(xs, flow.floats)))
        return rows
    integ = _Integrator(flow, reparam, backend)
    sub = max(1, math.ceil(dt / step_size(flow, reparam, 0.01)))
    cur = [float(a) for a in x]
    rows.append((0.0,) + tuple(v % 1.0 for v in cur))
    for i in range(1, n_out + 1):
        cur = integ.advance(cur, dt / sub, sub)
        rows.append((i * dt,) + tuple(v % 1.0 for v in cur))
    return rows
