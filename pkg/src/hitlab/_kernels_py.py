"""Pure-Python kernels; the reference the compiled module must agree with."""
from __future__ import annotations

import math

MASK = (1 << 128) - 1
FOUND, HORIZON, AMBIGUOUS = 0, 1, 2
INSIDE, OUTSIDE, UNSURE = 0, 1, 2


def classify(v: int, err: int, w_lo: int, w_hi: int) -> int:
    """Ball membership of a fixed-point value known to within ``err`` ulp."""
    if err < v and v + err < w_lo:
        return INSIDE
    if w_hi + err <= v <= MASK - err:
        return OUTSIDE
    return UNSURE


def walk_entries(vw, vc, win_w, win_c, cands, sw, sc, t, horizon):
    """Step through entry times of the walker until the checker is inside.

    On entry ``t`` is a walker entry and the checker is known to be outside
    there. Returns ``(status, t)``; with AMBIGUOUS, ``t`` is the last walker
    entry that was settled with certainty.
    """
    wl, wh = win_w
    cl, ch = win_c
    k = len(cands)
    err = 2
    while True:
        for j in range(k):
            m = cands[j]
            if t + m > horizon:
                return HORIZON, t
            c = classify((vw + sw[j]) & MASK, err + 1, wl, wh)
            if c == INSIDE:
                break
            if c == UNSURE:
                return AMBIGUOUS, t
        else:
            return AMBIGUOUS, t
        vw = (vw + sw[j]) & MASK
        vc = (vc + sc[j]) & MASK
        t += m
        err += 1
        c = classify(vc, err, cl, ch)
        if c == INSIDE:
            return FOUND, t
        if c == UNSURE:
            return AMBIGUOUS, t


def speed(coef, freqs, x):
    s = 0.0
    for (a, b), k in zip(coef, freqs):
        ph = 2.0 * math.pi * sum(ki * xi for ki, xi in zip(k, x))
        s += a * math.cos(ph) + b * math.sin(ph)
    return s


def rk4_step(coef, freqs, direction, x, h):
    d = len(x)
    s1 = speed(coef, freqs, x)
    y = [x[i] + 0.5 * h * s1 * direction[i] for i in range(d)]
    s2 = speed(coef, freqs, y)
    y = [x[i] + 0.5 * h * s2 * direction[i] for i in range(d)]
    s3 = speed(coef, freqs, y)
    y = [x[i] + h * s3 * direction[i] for i in range(d)]
    s4 = speed(coef, freqs, y)
    g = (s1 + 2 * s2 + 2 * s3 + s4) / 6.0
    return [x[i] + h * g * direction[i] for i in range(d)]


def _sup_dist(x, x0):
    best = 0.0
    for a, b in zip(x, x0):
        f = (a - b) % 1.0
        f = min(f, 1.0 - f)
        if f > best:
            best = f
    return best


def rk4_first_entry(coef, freqs, direction, x, x0, r, h, n_steps):
    """First step index whose endpoint is inside the open sup-ball, or -1.

    Returns ``(index, state_before)`` where ``state_before`` is the state at
    the start of that step, for the caller's bisection.
    """
    cur = list(x)
    for i in range(n_steps):
        nxt = rk4_step(coef, freqs, direction, cur, h)
        if _sup_dist(nxt, x0) < r:
            return i, cur
        cur = nxt
    return -1, cur


def rk4_section(coef, freqs, direction, x, target, h, n_steps):
    """First step where the unwrapped first coordinate reaches ``target``."""
    cur = list(x)
    for i in range(n_steps):
        nxt = rk4_step(coef, freqs, direction, cur, h)
        if nxt[0] >= target:
            return i, cur
        cur = nxt
    return -1, cur
