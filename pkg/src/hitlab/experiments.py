"""Experiment runners shared by the command line and the acceptance tests.

Every runner takes a parameter dict (already schema-validated and merged
with defaults) and a seed, and returns an :class:`Outcome` whose summary is
JSON-ready and whose tables become CSV files. Runners never read clocks, so
equal inputs give equal outcomes.

Randomness: ``numpy.random.SeedSequence(seed).spawn(count)`` gives one PCG64
stream per instance, in instance order; a sampled coordinate is
``integers(0, 2**53) / 2**53`` drawn from that stream.
"""
from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np

from . import builder, cf as cfm, corr, flow, indicators, measure, orbit
from .certified import fraction_from_str, fraction_to_str
from .cf import ContinuedFraction
from .errors import ConfigError

POINT_BITS = 53


@dataclass
class Table:
    name: str
    columns: list[str]
    rows: list[list[Any]]
    note: str = ""


@dataclass
class Outcome:
    kind: str
    summary: dict
    tables: list[Table] = field(default_factory=list)
    passed: bool | None = None


# ---------------------------------------------------------------------------
# seeded sampling and spec resolution

def rngs(seed: int, count: int) -> list[np.random.Generator]:
    """One independent PCG64 generator per instance."""
    return [np.random.Generator(np.random.PCG64(s)) for s in np.random.SeedSequence(seed).spawn(count)]


def sample_point(rng: np.random.Generator, d: int) -> tuple[Fraction, ...]:
    return tuple(Fraction(int(v), 1 << POINT_BITS) for v in rng.integers(0, 1 << POINT_BITS, size=d))


def _rational(v) -> Fraction:
    return fraction_from_str(v) if isinstance(v, str) else Fraction(v)


def resolve_pair(spec: dict) -> builder.IntertwinedPair:
    if spec.get("regime") == "exponential":
        return builder.build_exponential_pair(int(spec["levels"]))
    kw = {}
    if "bit_budget" in spec:
        kw["bit_budget"] = int(spec["bit_budget"])
    if "seed_alpha" in spec:
        kw["seed_alpha"] = tuple(spec["seed_alpha"])
    return builder.build_pair(float(_rational(spec.get("gamma", 2))), int(spec["levels"]), **kw)


def resolve_angle(spec: dict, path=("angle",)) -> ContinuedFraction | Fraction:
    """Angle from ``{"golden": N}``, ``{"cf": {...}}``, ``{"rational": "p/q"}``,
    ``{"squaring": {"seed": [...], "depth": N}}`` or ``{"pair": {...}, "which": ...}``."""
    if "golden" in spec:
        return cfm.golden(int(spec["golden"]))
    if "cf" in spec:
        return ContinuedFraction.from_json(spec["cf"])
    if "rational" in spec:
        return _rational(spec["rational"])
    if "squaring" in spec:
        return cfm.squaring_cf(spec["squaring"]["seed"], int(spec["squaring"]["depth"]))
    if "pair" in spec:
        pair = resolve_pair(spec["pair"])
        return pair.alpha if spec.get("which", "alpha") == "alpha" else pair.alpha_prime
    raise ConfigError("unrecognised angle specification", path)


def resolve_angles(params: dict, default_depth: int = 30) -> list:
    if "pair" in params:
        p = resolve_pair(params["pair"])
        return [p.alpha, p.alpha_prime]
    if "angles" in params:
        return [resolve_angle(a, ("params", "angles", i)) for i, a in enumerate(params["angles"])]
    return [resolve_angle(params.get("angle", {"golden": default_depth}), ("params", "angle"))]


def _point(v, d: int) -> tuple[Fraction, ...]:
    if isinstance(v, (list, tuple)):
        if len(v) != d:
            raise ConfigError(f"point has {len(v)} coordinates, expected {d}", ("params",))
        return tuple(_rational(c) for c in v)
    return (_rational(v),) * d


def _pmap(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _fmt_point(p: Sequence[Fraction]) -> str:
    return ";".join(fraction_to_str(c) for c in p)


def _median(vals):
    vals = [v for v in vals if v is not None]
    return statistics.median(vals) if vals else None


# ---------------------------------------------------------------------------
# build-pair

def run_build_pair(params: dict, seed: int, jobs: int = 1) -> Outcome:
    pair = resolve_pair(params)
    rep = builder.verify_membership(pair)
    viol = builder.minimality_violations(pair) if pair.regime is builder.Regime.POWER else []
    rows = []
    qs, qps = pair.alpha.pq[1], pair.alpha_prime.pq[1]
    for lv in rep.levels:
        n = lv.level
        rows.append([n, qs[n].bit_length(), qps[n].bit_length(), int(bool(lv.first_ok)),
                     "" if lv.second_ok is None else int(lv.second_ok),
                     lv.first_margin, "" if lv.second_margin is None else lv.second_margin])
    summary = {
        "pair": pair.to_json(),
        "membership": rep.to_json(),
        "minimality_violations": viol,
        "type_estimate_alpha": cfm.type_estimate(pair.alpha),
        "type_estimate_alpha_prime": cfm.type_estimate(pair.alpha_prime),
    }
    table = Table("levels", ["level", "q_bits", "q_prime_bits", "first_ok", "second_ok",
                             "first_margin_log", "second_margin_log"], rows,
                  "bit lengths exact; margins are float natural-log differences")
    return Outcome("build-pair", summary, [table], rep.enforced_pass and not viol)


# ---------------------------------------------------------------------------
# hit

def _hit_instance(args):
    kind, angles, x, x0, r, horizon, count = args
    if kind == "recurrence":
        rec = orbit.recurrence_time(angles[0], x[0], r, horizon)
        return [rec.tau]
    if kind == "entries":
        return orbit.next_entries(angles[0], x[0], x0[0], r, count, horizon)
    rec = orbit.hit_torus(angles, x, x0, r, horizon)
    return [rec.tau]


def run_hit(params: dict, seed: int, jobs: int = 1) -> Outcome:
    angles = resolve_angles(params)
    d = len(angles)
    r = _rational(params["r"])
    horizon = int(params["horizon"])
    x0 = _point(params.get("x0", 0), d)
    mode = params.get("mode", "first")
    count = int(params.get("count", 1))
    if "points" in params and isinstance(params["points"], list):
        pts = [_point(p, d) for p in params["points"]]
    else:
        pts = [sample_point(g, d) for g in rngs(seed, int(params.get("points", 10)))]
    res = _pmap(_hit_instance, [(mode, angles, p, x0, r, horizon, count) for p in pts], jobs)
    rows = []
    for i, (p, taus) in enumerate(zip(pts, res)):
        if not taus or taus == [None]:
            rows.append([i, _fmt_point(p), r.numerator, r.denominator, "", horizon, 1])
        for t in taus:
            if t is not None:
                rows.append([i, _fmt_point(p), r.numerator, r.denominator, t, horizon, 0])
    summary = {"dimension": d, "r": fraction_to_str(r), "horizon": horizon, "mode": mode,
               "instances": len(pts), "censored": sum(1 for t in res if t == [None] or not t)}
    return Outcome("hit", summary, [Table("hits", ["instance_id", "x", "r_num", "r_den", "tau",
                                                    "horizon", "censored_flag"], rows,
                                          "x, r, tau exact")])


# ---------------------------------------------------------------------------
# indicators

def _indicator_instance(args):
    system, angles, x, x0, sched, window, hexp, backend = args
    hz = indicators.power_horizon(hexp)
    if system == "recurrence":
        return indicators.recurrence_indicators(angles[0], x[0], sched, window, hz)
    if system == "circle":
        src = indicators.circle_source(angles[0], x[0], x0[0])
    else:
        src = indicators.torus_source(angles, x, x0, backend)
    return indicators.estimate_indicators(src, sched, window, hz)


def run_indicators(params: dict, seed: int, jobs: int = 1) -> Outcome:
    # long horizons at fine radii need a deep truncation
    angles = resolve_angles(params, default_depth=200)
    system = params.get("system", "circle" if len(angles) == 1 else "torus")
    d = len(angles)
    s = params.get("schedule", {})
    sched = indicators.Schedule(int(s.get("start", 2)), int(s.get("stop", 12)), "e", int(s.get("per_unit", 1)))
    window = int(params.get("window", 8))
    hexp = float(params.get("horizon_exponent", 3.0))
    x0 = _point(params.get("x0", 0), d)
    pts = [sample_point(g, d) for g in rngs(seed, int(params.get("points", 10)))]
    ests = _pmap(_indicator_instance,
                 [(system, angles, p, x0, sched, window, hexp, params.get("backend")) for p in pts], jobs)
    curve_rows, point_rows = [], []
    for i, (p, est) in enumerate(zip(pts, ests)):
        for e in est.entries:
            curve_rows.append([i, e.n, e.radius.numerator, e.radius.denominator,
                               "" if e.tau is None else e.tau, e.horizon, int(e.censored), e.ratio])
        point_rows.append([i, _fmt_point(p), est.R_low, "" if est.R_up is None else est.R_up,
                           est.censored_count, int(est.low_is_bound)])
    lows = [e.R_low for e in ests]
    ups = [e.R_up for e in ests]
    summary = {
        "system": system, "dimension": d, "schedule": sched.describe(), "window": window,
        "horizon_exponent": hexp, "points": len(pts),
        "R_low": lows, "R_up": ups,
        "median_R_low": _median(lows), "median_R_up": _median(ups),
        "angle_types": [cfm.type_estimate(a) if isinstance(a, ContinuedFraction) and a.N >= 3 else None
                        for a in angles],
    }
    passed = None
    thr = params.get("expect")
    if thr:
        checks = []
        if "R_low_min" in thr:
            count = sum(1 for v in lows if v >= thr["R_low_min"])
            summary["count_R_low_min"] = count
            checks.append(count >= int(thr.get("min_count", len(pts))))
        if "median_R_low_range" in thr:
            lo, hi = thr["median_R_low_range"]
            checks.append(lo <= summary["median_R_low"] <= hi)
        if "median_R_up_min" in thr:
            checks.append(summary["median_R_up"] is not None and summary["median_R_up"] >= thr["median_R_up_min"])
        if "median_R_low_max" in thr:
            checks.append(summary["median_R_low"] <= thr["median_R_low_max"])
        passed = all(checks)
    tables = [
        Table("ratios", ["instance_id", "n", "r_num", "r_den", "tau", "horizon", "censored_flag", "ratio"],
              curve_rows, "r, tau exact; ratio float log(tau)/-log(r), censored rows use the horizon"),
        Table("indicators", ["instance_id", "x", "R_low", "R_up", "censored_count", "low_is_bound"],
              point_rows, "x exact; R_low, R_up float window min/max"),
    ]
    return Outcome("indicators", summary, tables, passed)


# ---------------------------------------------------------------------------
# level-measure

def level_measure_report(alpha: ContinuedFraction, n: int, k_extra: int = 64) -> dict:
    """Exact level-set measures inside the window ``||q_n a|| < 2r <= ||q_{n-1} a||``."""
    th, th_prev = cfm.norm_q_alpha(alpha, n), cfm.theta(alpha, n - 1)
    r = (th + th_prev) / 4
    q = alpha.q(n)
    rows, eq_ok, tail_ok = [], True, True
    prev = Fraction(0)
    for k in range(1, q + k_extra + 1):
        cur = measure.union_measure(alpha, k, 2 * r)
        m = cur - prev
        prev = cur
        if k <= q:
            ok = m == 2 * r
            eq_ok &= ok
        else:
            ok = m <= th
            tail_ok &= ok
        rows.append([n, k, m.numerator, m.denominator, int(ok)])
    return {"n": n, "q_n": q, "r": fraction_to_str(r), "two_r": fraction_to_str(2 * r),
            "norm_q_n_alpha": fraction_to_str(th), "equal_up_to_q_n": eq_ok,
            "bounded_after_q_n": tail_ok, "rows": rows}


def run_level_measure(params: dict, seed: int, jobs: int = 1) -> Outcome:
    alpha = resolve_angle(params.get("angle", {"golden": 30}))
    ns = params.get("windows", [6])
    k_extra = int(params.get("k_extra", 64))
    reps = [level_measure_report(alpha, int(n), k_extra) for n in ns]
    rows = [row for rep in reps for row in rep.pop("rows")]
    passed = all(rep["equal_up_to_q_n"] and rep["bounded_after_q_n"] for rep in reps)
    summary = {"angle": alpha.to_json(), "windows": reps}
    return Outcome("level-measure", summary,
                   [Table("level_measures", ["n", "k", "mu_num", "mu_den", "ok"], rows,
                          "measures exact rationals")], passed)


# ---------------------------------------------------------------------------
# key-lemma and borel-cantelli

def run_key_lemma(params: dict, seed: int, jobs: int = 1) -> Outcome:
    pair = resolve_pair(params.get("pair", {"gamma": 2, "levels": 5}))
    which = params.get("which", "alpha")
    alpha = pair.alpha if which == "alpha" else pair.alpha_prime
    betas = [_rational(b) for b in params.get("betas", ["1", "3/2", "7/4"])]
    Ms = [_rational(m) for m in params.get("Ms", [1, 2, 4])]
    Ns = [_rational(n) for n in params.get("Ns", [2, 4, 8, 16])]
    queries = measure.key_lemma_queries(alpha, betas, Ms, Ns)
    results = [measure.key_lemma_check(alpha, q) for q in queries]
    rows = [[fraction_to_str(r.query.beta), fraction_to_str(r.query.M), fraction_to_str(r.query.N),
             r.query.n, fraction_to_str(r.query.r), str(r.K), fraction_to_str(r.measure),
             fraction_to_str(r.bound_lo), int(r.holds)] for r in results]
    min_q = int(params.get("min_queries", 20))
    passed = len(results) >= min_q and all(r.holds for r in results)
    ratios = [float(r.measure / r.bound_lo) for r in results]
    summary = {"factor": which, "queries": len(results), "all_hold": all(r.holds for r in results),
               "max_measure_to_bound": max(ratios) if ratios else None}
    return Outcome("key-lemma", summary,
                   [Table("key_lemma", ["beta", "M", "N", "n", "r", "K", "measure", "bound_lo", "holds"],
                          rows, "all columns exact rationals")], passed)


def run_borel_cantelli(params: dict, seed: int, jobs: int = 1) -> Outcome:
    pair = resolve_pair(params.get("pair", {"gamma": 2, "levels": 6}))
    beta = _rational(params.get("beta", "9/5"))
    rep = measure.borel_cantelli_report(pair, beta, params.get("levels"), int(params.get("max_index", 20000)))
    rows = []
    for w in rep.windows:
        rows.append([w.window.factor, w.window.n, int(w.window.degenerate), len(w.indices),
                     fraction_to_str(w.total), float(w.total), w.bound_beta, w.bound_gamma,
                     int(w.within_beta), int(w.within_gamma)])
    summary = rep.to_json()
    summary["chained"] = measure.chained([w.window for w in rep.windows])
    passed = rep.all_within_beta and rep.all_within_gamma
    return Outcome("borel-cantelli", summary,
                   [Table("windows", ["factor", "n", "degenerate", "radii", "sum", "sum_float",
                                      "bound_beta", "bound_gamma", "within_beta", "within_gamma"],
                          rows, "sum exact; bounds float")], passed)


# ---------------------------------------------------------------------------
# flow

def _flow_instance(args):
    fl, rp, x, y, r, t_max, horizon, backend = args
    tf = flow.flow_hit(fl, x, y, r, t_max).time
    tr = flow.reparam_flow_hit(fl, rp, x, y, r, t_max, backend=backend)
    tq = flow.quadrature_hit(fl, rp, x, y, r, t_max)
    m1 = flow.map1_check(fl, rp, x, y, r, horizon, backend=backend)
    return tf, tr, tq, m1


def run_flow(params: dict, seed: int, jobs: int = 1) -> Outcome:
    angles = resolve_angles(params)
    fl = flow.TranslationFlow.from_angles(*angles)
    sp = params.get("speed", {"cosine": 0.5, "C": 3})
    if "terms" in sp:
        rp = flow.Reparametrization.from_json(sp)
    else:
        rp = flow.Reparametrization.cosine(fl.d, float(sp.get("cosine", 0.5)), 0, sp.get("C"))
    r = _rational(params.get("r", "1/10"))
    t_max = float(params.get("t_max", 10000))
    horizon = int(params.get("horizon", 2000))
    count = int(params.get("instances", 10))
    gens = rngs(seed, count)
    inst = [(fl, rp, sample_point(g, fl.d), sample_point(g, fl.d), r, t_max, horizon, params.get("backend"))
            for g in gens]
    res = _pmap(_flow_instance, inst, jobs)
    rows, sandwich_ok, map1_ok, worst = [], True, True, 0.0
    for i, ((_, _, x, y, *_), (tf, tr, tq, m1)) in enumerate(zip(inst, res)):
        tol = tr.tolerance
        if tf is None or tr.time is None:
            ok = tf is None and tr.time is None
        else:
            ok = float(tf) / rp.C - tol <= tr.time <= rp.C * float(tf) + tol
            worst = max(worst, abs(tr.time - tq))
        sandwich_ok &= ok
        map1_ok &= m1.holds
        rows.append([i, _fmt_point(x), _fmt_point(y), "" if tf is None else fraction_to_str(tf),
                     "" if tr.time is None else tr.time, "" if tq is None else tq,
                     "" if m1.discrete is None else m1.discrete, int(ok), int(m1.holds)])
    # the unreparametrized section map against the exact translation
    sec_rows, sec_ok = [], True
    sec_angles = list(flow.section_angles(fl))
    for i, g in enumerate(rngs(seed + 1, count)):
        x = (Fraction(0),) + sample_point(g, fl.d - 1)
        got = flow.poincare_section(fl, None, 0, x)
        want = orbit.translate(sec_angles, x[1:], 1)
        same = got.point == want and got.time == 1 / fl.direction[0]
        sec_ok &= same
        sec_rows.append([i, _fmt_point(x), _fmt_point(got.point.coordinates), fraction_to_str(got.time), int(same)])
    dens = None
    if params.get("density_samples", 0):
        dc = flow.density_check(fl, rp, n_samples=int(params["density_samples"]), seed=seed)
        dens = {"mass_before": dc.mass_before, "mass_after": dc.mass_after,
                "relative_error": dc.relative_error, "ok": dc.relative_error < 1e-3}
    summary = {"flow": fl.to_json(), "speed": rp.to_json(), "r": fraction_to_str(r), "t_max": t_max,
               "instances": count, "sandwich_ok": sandwich_ok, "map1_ok": map1_ok,
               "section_exact": sec_ok, "max_rk4_vs_quadrature": worst, "density": dens}
    passed = sandwich_ok and map1_ok and sec_ok and (dens is None or dens["ok"])
    return Outcome("flow", summary, [
        Table("flow_hits", ["instance_id", "x", "y", "tau_flow", "tau_reparam", "tau_quadrature",
                            "tau_time1", "sandwich_ok", "map1_ok"], rows,
              "tau_flow exact; tau_reparam RK4 float; tau_quadrature float; tau_time1 integer"),
        Table("section", ["instance_id", "x", "section_point", "return_time", "matches_translation"],
              sec_rows, "all exact rationals"),
    ], passed)


# ---------------------------------------------------------------------------
# corr

def _observable(spec: dict, d: int):
    if "hat" in spec:
        return corr.HatObservable(tuple(spec["hat"]["center"]), float(spec["hat"]["radius"]),
                                  float(spec["hat"].get("height", 1.0)))
    if "terms" in spec:
        return corr.TrigObservable(tuple((tuple(t[0]), t[1], t[2]) for t in spec["terms"]))
    return corr.TrigObservable.cos(d)


def run_corr(params: dict, seed: int, jobs: int = 1) -> Outcome:
    kind = params.get("map", "rotation")
    if kind == "rotation":
        angles = resolve_angles(params)
        spec = corr.MapSpec.rotation(*angles)
    else:
        angles = []
        spec = corr.MapSpec(kind)
    phi = _observable(params.get("phi", {}), spec.d)
    psi = _observable(params.get("psi", {}), spec.d)
    ns = params.get("ns") or list(range(1, int(params.get("n_max", 64)) + 1))
    series = corr.correlation_series(spec, phi, psi, [int(n) for n in ns])
    try:
        fit = corr.decay_exponent_fit(series)
        fit_json = fit.__dict__
    except Exception as exc:    # report, never hide
        fit_json = {"error": str(exc)}
    summary = {"map": kind, "phi_norm": phi.norm, "psi_norm": psi.norm,
               "quadrature": series.quadrature, "fit": fit_json}
    checks = []
    if kind == "rotation" and isinstance(angles[0], ContinuedFraction) and len(angles) == 1:
        wit = corr.nonmixing_witness(angles[0], int(params.get("witness_k", 8)))
        summary["witness"] = [{"k": w.k, "q": w.q, "distance": fraction_to_str(w.distance),
                               "correlation": w.correlation} for w in wit]
        checks.append(all(w.correlation >= 0.4 for w in wit))
    if kind == "doubling":
        c = corr.TrigObservable.cos()
        zeros = [corr.correlation(spec, c, c, n).signed for n in range(1, 17)]
        summary["doubling_cos_zero"] = all(z == 0 for z in zeros)
        checks.append(summary["doubling_cos_zero"])
        if params.get("indicator_points", 0):
            sched = indicators.Schedule(2, int(params.get("indicator_stop", 12)))
            ests = [corr.doubling_indicators(g, Fraction(1, 3), sched)
                    for g in rngs(seed, int(params["indicator_points"]))]
            summary["median_R_up"] = _median([e.R_up for e in ests])
            summary["median_R_low"] = _median([e.R_low for e in ests])
            checks.append(0.8 <= summary["median_R_up"] <= 1.3)
    bounds = params.get("bounds")
    if bounds:
        out = {}
        for b in bounds:
            if b["kind"] == "equal_dimension":
                out[f"equal_dimension d={b['d']} p={b['p']}"] = corr.equal_dimension_bound(b["d"], b["p"])
            elif b["kind"] == "theorem1":
                out[f"theorem1 {b['d_low']},{b['d_up']},{b['p']}"] = corr.theorem1_bound(b["d_low"], b["d_up"], b["p"])
            else:
                R = math.inf if b["R"] in ("inf", "infinity") else b["R"]
                out[f"corollary d={b['d']} R={b['R']}"] = corr.corollary_bound(b["d"], R)
        summary["bounds"] = out
    return Outcome("corr", summary, [Table("correlations", ["n", "value", "error_bound", "censored"],
                                           [[r["n"], r["value"], r["error_bound"], r["censored"]]
                                            for r in series.to_rows()],
                                           "value and error_bound float")],
                   all(checks) if checks else None)


# ---------------------------------------------------------------------------
# verify-all

def bounds_failures(seed: int, count: int, depth: int = 20, max_quotient: int = 10) -> dict:
    """Evaluate the convergent-bound chain for ``count`` random expansions, every ``n <= depth-2``."""
    fails, first_link_n0, other = 0, 0, 0
    for g in rngs(seed, count):
        c = cfm.random_cf(g, depth, max_quotient)
        for n in range(depth - 1):
            links = cfm.bounds_chain(c, n)
            if not all(links):
                fails += 1
                if links == (False, True, True) and n == 0 and c.quotients[0] == 1:
                    first_link_n0 += 1
                else:
                    other += 1
    return {"failures": fails, "equality_at_n0_with_a1_1": first_link_n0, "other_failures": other}


def _check_bounds(seed):
    info = bounds_failures(seed, 50)
    return info["failures"] == 0, info


def _check_membership(seed):
    pair = builder.build_pair(2, 5)
    rep = builder.verify_membership(pair)
    return rep.enforced_pass and not builder.minimality_violations(pair), {"levels": len(rep.levels)}


def _check_oracle(seed):
    bad = 0
    for g in rngs(seed, 60):
        a = cfm.random_cf(g, 12, 6)
        b = cfm.random_cf(g, 12, 6)
        x = sample_point(g, 2)
        x0 = sample_point(g, 2)
        r = Fraction(int(g.integers(1, 40)), 400)
        H = 3000
        try:
            got = orbit.hit_torus2([a, b], x, x0, r, H).tau
        except Exception:
            continue
        bad += got != orbit.brute_hit([a, b], x, x0, r, H)
        bad += orbit.hit_circle(a, x[0], x0[0], r, H).tau != orbit.brute_hit([a], (x[0],), (x0[0],), r, H)
    return bad == 0, {"mismatches": bad}


def _check_level_measure(seed):
    alpha = cfm.golden(30)
    reps = [level_measure_report(alpha, n, 16) for n in (4, 5, 6)]
    return all(r["equal_up_to_q_n"] and r["bounded_after_q_n"] for r in reps), {"windows": [4, 5, 6]}


def _check_key_lemma(seed):
    out = run_key_lemma({"pair": {"gamma": 2, "levels": 4}}, seed)
    return bool(out.passed), {"queries": out.summary["queries"]}


def _check_borel_cantelli(seed):
    out = run_borel_cantelli({"pair": {"gamma": 2, "levels": 6}}, seed)
    rep = out.summary
    return bool(out.passed), {"windows": len(rep["windows"]), "within_beta": rep["all_within_beta"],
                              "within_gamma": rep["all_within_gamma"]}


def _check_loglaw(seed):
    gaps = []
    for g in rngs(seed, 3):
        x = sample_point(g, 1)[0]
        gaps.append(indicators.loglaw_crosscheck(cfm.golden(60), x, 0, 10**4).gap)
    return max(gaps) < 0.05, {"max_gap": max(gaps)}


def _check_exponents(seed):
    n = np.arange(1, 10**5 + 1, dtype=float)
    rep = indicators.exponent_identities(n ** -2.0)
    ok = abs(rep.beta_liminf_zero - 2) < 0.05 and abs(rep.beta_limsup_zero - 2) < 0.05
    return ok, {"beta_liminf_zero": rep.beta_liminf_zero, "beta_limsup_zero": rep.beta_limsup_zero}


def _check_flow(seed):
    out = run_flow({"angles": [{"golden": 40}, {"cf": {"a0": 0, "quotients": [2] * 40}}],
                    "instances": 4, "r": "1/10", "horizon": 500}, seed)
    return bool(out.passed), {k: out.summary[k] for k in ("sandwich_ok", "map1_ok", "section_exact")}


def _check_corr(seed):
    rot = run_corr({"map": "rotation", "angle": {"golden": 40}, "n_max": 32}, seed)
    dbl = run_corr({"map": "doubling", "n_max": 16}, seed)
    vals = (corr.equal_dimension_bound(1, 2), corr.corollary_bound(2, 4), corr.corollary_bound(3, math.inf))
    ok = bool(rot.passed) and bool(dbl.passed) and vals == (3.0, 3.0, 0.0)
    return ok, {"bounds": list(vals)}


CHECKS: dict[str, Callable[[int], tuple[bool, dict]]] = {
    "convergent_bounds": _check_bounds,
    "membership": _check_membership,
    "oracle_equivalence": _check_oracle,
    "level_measure": _check_level_measure,
    "key_lemma": _check_key_lemma,
    "borel_cantelli": _check_borel_cantelli,
    "loglaw": _check_loglaw,
    "exponent_identities": _check_exponents,
    "flow": _check_flow,
    "corr": _check_corr,
}


def _run_check(args):
    name, seed = args
    ok, info = CHECKS[name](seed)
    return name, ok, info


def run_verify_all(params: dict, seed: int, jobs: int = 1) -> Outcome:
    names = params.get("checks") or list(CHECKS)
    for n in names:
        if n not in CHECKS:
            raise ConfigError(f"unknown check {n!r}", ("params", "checks"))
    res = _pmap(_run_check, [(n, seed) for n in names], jobs)
    rows = [[n, int(ok)] for n, ok, _ in res]
    summary = {"checks": {n: {"passed": ok, **info} for n, ok, info in res},
               "all_passed": all(ok for _, ok, _ in res)}
    return Outcome("verify-all", summary, [Table("checks", ["check", "passed"], rows)],
                   summary["all_passed"])


RUNNERS: dict[str, Callable[[dict, int, int], Outcome]] = {
    "build-pair": run_build_pair,
    "hit": run_hit,
    "indicators": run_indicators,
    "level-measure": run_level_measure,
    "key-lemma": run_key_lemma,
    "borel-cantelli": run_borel_cantelli,
    "flow": run_flow,
    "corr": run_corr,
    "verify-all": run_verify_all,
}
