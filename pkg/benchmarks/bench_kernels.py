"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3] [--points 5]

Both backends run the same torus hitting-time walks and RK4 flow hits; the
results are checked for agreement before timings are reported.
"""
from __future__ import annotations

import argparse
import time
from fractions import Fraction

from hitlab import flow, kernels, orbit
from hitlab.builder import build_pair
from hitlab.cf import golden
from hitlab.experiments import rngs, sample_point


def _torus_case(points: int):
    pair = build_pair(2, 6)
    r = Fraction(1, 500)
    pts = [sample_point(g, 2) for g in rngs(1, points)]

    def run(backend):
        return [orbit.hit_torus2(pair, x, (0, 0), r, 10**7, backend=backend).tau for x in pts]
    return run


def _flow_case(points: int):
    fl = flow.TranslationFlow.from_angles(golden(40))
    phi = flow.Reparametrization.cosine(2, 0.5, C=3.0)
    pts = [(tuple(map(float, sample_point(g, 2))), tuple(map(float, sample_point(g, 2))))
           for g in rngs(2, points)]

    def run(backend):
        return [round(flow.reparam_flow_hit(fl, phi, x, y, 0.05, 200, backend=backend).time, 9)
                for x, y in pts]
    return run


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--points", type=int, default=5)
    args = p.parse_args(argv)
    backends = sorted(kernels.BACKENDS)
    print(f"backends available: {backends} (default {kernels.DEFAULT})")
    for name, case in (("torus hitting walk", _torus_case), ("reparametrized flow RK4", _flow_case)):
        run = case(args.points)
        results = {b: run(b) for b in backends}
        agree = len({tuple(v) for v in results.values()}) == 1
        times = {b: _time(lambda b=b: run(b), args.repeat) for b in backends}
        line = ", ".join(f"{b} {t:.3f}s" for b, t in times.items())
        speedup = ""
        if "compiled" in times:
            speedup = f", speedup x{times['python'] / times['compiled']:.1f}"
        print(f"{name}: {line}{speedup}, results agree: {agree}")
        if not agree:
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
