"""Correlation sequences for Lipschitz observables, decay-exponent fits, and
evaluators for the bounds linking decay exponent, dimension and hitting."""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .cf import ContinuedFraction, theta
from .errors import EstimationError, InconsistentInputsError, UnsupportedSystemError
from .indicators import IndicatorEstimate, RatioEntry, Schedule, power_horizon, summarize
from .orbit import HittingRecord, angle_value

QUAD_POINTS = 2**16


# ---------------------------------------------------------------------------
# maps

@dataclass(frozen=True)
class MapSpec:
    """``kind`` is ``"rotation"`` (translation by ``angles``) or ``"doubling"``."""

    kind: str
    angles: tuple = ()

    def __post_init__(self):
        if self.kind not in ("rotation", "doubling"):
            raise UnsupportedSystemError(f"unsupported map {self.kind!r}")
        if self.kind == "rotation":
            if not self.angles:
                raise UnsupportedSystemError("a rotation needs at least one angle")
            object.__setattr__(self, "angles", tuple(angle_value(a) for a in self.angles))

    @property
    def d(self) -> int:
        return len(self.angles) if self.kind == "rotation" else 1

    @classmethod
    def rotation(cls, *angles) -> "MapSpec":
        return cls("rotation", tuple(angles))

    @classmethod
    def doubling(cls) -> "MapSpec":
        return cls("doubling")

    def iterate(self, x: np.ndarray, n: int) -> np.ndarray:
        """``T^n`` on an array of points of shape ``(m, d)``."""
        if self.kind == "rotation":
            shift = np.array([float((n * a) % 1) for a in self.angles])
            return (x + shift) % 1.0
        out = x.copy()
        for _ in range(n):
            out = (2.0 * out) % 1.0
        return out

    def lipschitz_factor(self, n: int) -> float:
        return 1.0 if self.kind == "rotation" else 2.0**n


# ---------------------------------------------------------------------------
# observables

@dataclass(frozen=True)
class TrigObservable:
    """``sum a cos(2 pi k.x) + b sin(2 pi k.x)`` over ``terms = ((k, a, b), ...)``."""

    terms: tuple[tuple[tuple[int, ...], float, float], ...]

    def __post_init__(self):
        terms = tuple((tuple(int(k) for k in kv), float(a), float(b)) for kv, a, b in self.terms)
        if len({len(kv) for kv, _, _ in terms}) != 1:
            raise ValueError("all frequency vectors must share one dimension")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def cos(cls, d: int = 1, k: Sequence[int] | None = None, amplitude: float = 1.0) -> "TrigObservable":
        k = tuple(k) if k is not None else (1,) + (0,) * (d - 1)
        return cls(((k, amplitude, 0.0),))

    @classmethod
    def constant(cls, value: float, d: int = 1) -> "TrigObservable":
        return cls((((0,) * d, value, 0.0),))

    @property
    def d(self) -> int:
        return len(self.terms[0][0])

    def fourier(self) -> dict[tuple[int, ...], complex]:
        """Complex coefficients ``c_k`` with ``f = sum c_k e^{2 pi i k.x}``."""
        c: dict[tuple[int, ...], complex] = {}
        for kv, a, b in self.terms:
            if not any(kv):
                c[kv] = c.get(kv, 0) + a
                continue
            neg = tuple(-k for k in kv)
            c[kv] = c.get(kv, 0) + complex(a, -b) / 2
            c[neg] = c.get(neg, 0) + complex(a, b) / 2
        return c

    @property
    def mean(self) -> float:
        return sum(a for kv, a, _ in self.terms if not any(kv))

    @property
    def sup_bound(self) -> float:
        return sum(math.hypot(a, b) for _, a, b in self.terms)

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant in the sup metric: ``sum |coef| 2 pi |k|_1``."""
        return sum(math.hypot(a, b) * 2 * math.pi * sum(abs(k) for k in kv) for kv, a, b in self.terms)

    @property
    def norm(self) -> float:
        return self.sup_bound + self.lipschitz

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        out = np.zeros(len(x))
        for kv, a, b in self.terms:
            ph = 2 * np.pi * (x @ np.array(kv, dtype=float))
            out += a * np.cos(ph) + b * np.sin(ph)
        return out


@dataclass(frozen=True)
class HatObservable:
    """``height * max(0, 1 - dist(x, center) / radius)`` in the sup metric."""

    center: tuple[float, ...]
    radius: float
    height: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not 0 < self.radius <= 0.5:
            raise ValueError("hat radius must lie in (0, 1/2]")

    @property
    def d(self) -> int:
        return len(self.center)

    @property
    def sup_bound(self) -> float:
        return abs(self.height)

    @property
    def lipschitz(self) -> float:
        return abs(self.height) / self.radius

    @property
    def norm(self) -> float:
        return self.sup_bound + self.lipschitz

    @property
    def mean(self) -> float | None:
        if self.d == 1:
            return self.height * self.radius
        return None

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1, self.d)
        f = (x - np.array(self.center)) % 1.0
        dist = np.minimum(f, 1.0 - f).max(axis=1)
        return self.height * np.maximum(0.0, 1.0 - dist / self.radius)


Observable = TrigObservable | HatObservable


# ---------------------------------------------------------------------------
# correlations

@dataclass(frozen=True)
class Correlation:
    n: int
    signed: float
    error: float
    method: str

    @property
    def value(self) -> float:
        return abs(self.signed)

    @property
    def censored(self) -> bool:
        return self.value <= self.error


def _closed_form(spec: MapSpec, phi: TrigObservable, psi: TrigObservable, n: int) -> float:
    cf, cg = phi.fourier(), psi.fourier()
    total = 0j
    for k, a in cf.items():
        if spec.kind == "rotation":
            ph = sum(ki * ((n * al) % 1) for ki, al in zip(k, spec.angles)) % 1
            coef = a * cmath.exp(2j * math.pi * float(ph))
            partner = tuple(-ki for ki in k)
        else:
            coef = a
            partner = tuple(-(ki << n) for ki in k)
        total += coef * cg.get(partner, 0)
    total -= cf.get((0,) * phi.d, 0) * cg.get((0,) * psi.d, 0)
    return total.real


def _grid(d: int, points: int) -> tuple[np.ndarray, float]:
    per = max(1, round(points ** (1.0 / d)))
    axis = (np.arange(per) + 0.5) / per
    mesh = np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)
    return mesh, 1.0 / per


def _quadrature(spec: MapSpec, phi, psi, n: int, points: int) -> tuple[float, float]:
    x, h = _grid(spec.d, points)
    fx = phi(spec.iterate(x, n))
    gx = psi(x)
    # every point of a cell is within h/2 of its midpoint in the sup metric
    lip_prod = phi.lipschitz * spec.lipschitz_factor(n) * psi.sup_bound + phi.sup_bound * psi.lipschitz
    err = lip_prod * h / 2
    mf, mg = phi.mean, psi.mean
    if mf is None:
        mf, ef = float(phi(x).mean()), phi.lipschitz * h / 2
    else:
        ef = 0.0
    if mg is None:
        mg, eg = float(gx.mean()), psi.lipschitz * h / 2
    else:
        eg = 0.0
    value = float((fx * gx).mean()) - mf * mg
    err += ef * (abs(mg) + eg) + eg * abs(mf)
    return value, err


def correlation(spec: MapSpec, phi: Observable, psi: Observable, n: int, *,
                points: int = QUAD_POINTS) -> Correlation:
    """``int phi(T^n x) psi(x) dx - int phi int psi`` with a certified error bound."""
    if not isinstance(spec, MapSpec):
        raise UnsupportedSystemError(f"unsupported map {spec!r}")
    if phi.d != spec.d or psi.d != spec.d:
        raise ValueError("observable and map dimensions differ")
    if n < 0:
        raise ValueError("n must be non-negative")
    if isinstance(phi, TrigObservable) and isinstance(psi, TrigObservable):
        return Correlation(n, _closed_form(spec, phi, psi, n), 0.0, "closed-form")
    v, e = _quadrature(spec, phi, psi, n, points)
    return Correlation(n, v, e, f"midpoint grid {points}")


@dataclass
class CorrelationSeries:
    values: list[Correlation]
    quadrature: str

    def to_rows(self) -> list[dict]:
        return [{"n": c.n, "value": c.value, "error_bound": c.error, "censored": int(c.censored)}
                for c in self.values]


def correlation_series(spec: MapSpec, phi, psi, ns: Sequence[int], **kw) -> CorrelationSeries:
    vals = [correlation(spec, phi, psi, n, **kw) for n in ns]
    return CorrelationSeries(vals, ", ".join(sorted({c.method for c in vals})))


def synthetic_series(f, ns: Sequence[int], floor: float = 1e-15) -> CorrelationSeries:
    """A series ``f(n)`` with a uniform error floor, for calibrating the fit."""
    return CorrelationSeries([Correlation(n, float(f(n)), floor, "synthetic") for n in ns], "synthetic")


@dataclass(frozen=True)
class DecayFit:
    """Least-squares exponent, or a lower bound when the data are censored."""

    p: float | None
    p_lower: float | None
    used: int
    censored: int
    residual: float | None = None


def decay_exponent_fit(series: CorrelationSeries, min_points: int = 10) -> DecayFit:
    """Slope of ``-log value`` against ``log n`` over entries above their error floor.

    With fewer than ``min_points`` usable entries the exponent is indeterminate
    and the first censored entry gives ``p >= -log(error) / log n``.
    """
    live = [c for c in series.values if c.n >= 1 and not c.censored and c.value > 0]
    cens = [c for c in series.values if c.n >= 2 and (c.censored or c.value == 0)]
    lower = None
    if cens:
        first = min(cens, key=lambda c: c.n)
        floor = max(first.error, np.finfo(float).tiny)
        lower = -math.log(floor) / math.log(first.n)
    if len(live) < min_points:
        if lower is None:
            raise EstimationError(f"only {len(live)} usable entries; need {min_points}")
        return DecayFit(None, lower, len(live), len(cens))
    x = np.log([c.n for c in live])
    y = -np.log([c.value for c in live])
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icpt)) ** 2)))
    return DecayFit(float(slope), lower, len(live), len(cens), resid)


@dataclass(frozen=True)
class WitnessRow:
    k: int
    q: int
    distance: Fraction
    correlation: float


def nonmixing_witness(alpha: ContinuedFraction, k_max: int = 8, cutoff: float = 0.05) -> list[WitnessRow]:
    """Closed-form correlation of ``cos(2 pi x)`` with itself at ``n = q_k``.

    Only indices with ``||q_k alpha|| < cutoff`` are listed.
    """
    spec = MapSpec.rotation(alpha)
    obs = TrigObservable.cos()
    rows = []
    for k in range(0, min(k_max, alpha.N - 1) + 1):
        dist = theta(alpha, k)
        if dist < cutoff:
            q = alpha.q(k)
            rows.append(WitnessRow(k, q, dist, correlation(spec, obs, obs, q).value))
    return rows


# ---------------------------------------------------------------------------
# bound evaluators

def theorem1_bound(d_low: float, d_up: float, p: float) -> float:
    """``1 + (2 d_up + 2) / (d_low p)``; infinite when ``p <= 0``."""
    if not d_low > 0:
        raise InconsistentInputsError("lower local dimension must be positive")
    if not math.isfinite(d_up):
        raise InconsistentInputsError("upper local dimension must be finite")
    if d_up < d_low:
        raise InconsistentInputsError("upper local dimension below the lower one")
    if p <= 0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return 1.0 + (2 * d_up + 2) / (d_low * p)


def equal_dimension_bound(d: float, p: float) -> float:
    """``d + (2d + 2) / p``: the upper limit of the indicator against ``-log r``."""
    return d * theorem1_bound(d, d, p)


def corollary_bound(d: float, R: float) -> float:
    """Largest decay exponent compatible with an upper indicator ``R``: ``(2d+2)/(R-d)``."""
    if math.isinf(R):
        return 0.0
    if R <= d:
        raise InconsistentInputsError(f"indicator {R} must exceed the dimension {d}")
    return (2 * d + 2) / (R - d)


# ---------------------------------------------------------------------------
# doubling map hitting times from random binary expansions

class BitOrbit:
    """A point of the circle given by random binary digits; ``T^n`` shifts them.

    ``window(n)`` gives the 64 digits after position ``n`` as an integer, so
    ``T^n x`` lies in ``[w 2^-64, (w + 1) 2^-64]``.
    """

    def __init__(self, rng: np.random.Generator, length: int):
        self.rng = rng
        self.bits = rng.integers(0, 2, size=length + 256, dtype=np.uint8)
        self.length = length
        v = np.zeros(length + 1, dtype=np.uint64)
        for j in range(64):
            v = (v << np.uint64(1)) | self.bits[j:j + length + 1].astype(np.uint64)
        self.windows = v

    def digits(self, n: int, count: int) -> int:
        out = 0
        for b in self.bits[n:n + count]:
            out = (out << 1) | int(b)
        return out


def _exact_inside(orbit: BitOrbit, n: int, x0: Fraction, r: Fraction) -> bool | None:
    bits = 192
    w = Fraction(orbit.digits(n, bits), 1 << bits)
    hi = w + Fraction(1, 1 << bits)
    verdicts = set()
    for v in (w, hi):
        off = (v - x0) % 1
        verdicts.add(min(off, 1 - off) < r)
    return verdicts.pop() if len(verdicts) == 1 else None


def doubling_hit(orbit: BitOrbit, x0, r, horizon: int) -> HittingRecord:
    """First ``n >= 1`` with ``||T^n x - x0|| < r`` for the doubling map."""
    x0, r = Fraction(x0), Fraction(r)
    horizon = min(horizon, orbit.length)
    X0 = int(x0 * (1 << 64)) % (1 << 64)
    R = int(r * (1 << 64)) + 2
    v = orbit.windows[1:horizon + 1]
    diff = v - np.uint64(X0)
    dist = np.minimum(diff, np.uint64(0) - diff)
    for i in np.flatnonzero(dist < np.uint64(R)):
        n = int(i) + 1
        verdict = _exact_inside(orbit, n, x0, r)
        if verdict is None:
            raise EstimationError(f"undecidable ball membership at n={n}")
        if verdict:
            return HittingRecord(r, n, horizon)
    return HittingRecord(r, None, horizon)


def doubling_indicators(rng: np.random.Generator, x0, schedule: Schedule, tail_window: int = 8,
                        horizon_exponent: float = 2.0, cap: int = 2**20) -> IndicatorEstimate:
    """Indicator surrogates for the doubling map at a random point."""
    hz = power_horizon(horizon_exponent, cap)
    radii = schedule.radii()
    orbit = BitOrbit(rng, max(hz(r) for _, r in radii))
    entries = []
    for n, r in radii:
        H = hz(r)
        entries.append(RatioEntry(n, r, doubling_hit(orbit, x0, r, H).tau, H))
    return summarize(entries, schedule.describe(), tail_window)
