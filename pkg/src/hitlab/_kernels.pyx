# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; same functions and results as ``_kernels_py``."""
from libc.math cimport cos, sin, fmod, M_PI

cdef extern from *:
    """
    typedef unsigned __int128 hl_u128;
    """
    # Cython only needs an integer type name; C sees the real 128-bit typedef
    ctypedef unsigned long long hl_u128

cdef enum:
    FOUND = 0
    HORIZON = 1
    AMBIGUOUS = 2
    INSIDE = 0
    OUTSIDE = 1
    UNSURE = 2

cdef object MASK64 = (1 << 64) - 1


cdef hl_u128 to_u128(object v):
    cdef unsigned long long hi = (v >> 64) & MASK64
    cdef unsigned long long lo = v & MASK64
    return ((<hl_u128>hi) << 64) | <hl_u128>lo


cdef inline int classify(hl_u128 v, hl_u128 err, hl_u128 w_lo, hl_u128 w_hi) nogil:
    cdef hl_u128 top = ~(<hl_u128>0)
    if err < v and v < w_lo and w_lo - v > err:
        return INSIDE
    if w_hi <= top - err and w_hi + err <= v and v <= top - err:
        return OUTSIDE
    return UNSURE


def walk_entries(vw, vc, win_w, win_c, cands, sw, sc, long long t, long long horizon):
    cdef hl_u128 w = to_u128(vw), c = to_u128(vc)
    cdef hl_u128 wl = to_u128(win_w[0]), wh = to_u128(win_w[1])
    cdef hl_u128 cl = to_u128(win_c[0]), ch = to_u128(win_c[1])
    cdef int k = len(cands), j, cls
    cdef long long m[3]
    cdef hl_u128 s_w[3]
    cdef hl_u128 s_c[3]
    cdef hl_u128 err = 2
    cdef int return_code = -1
    for j in range(k):
        m[j] = cands[j]
        s_w[j] = to_u128(sw[j])
        s_c[j] = to_u128(sc[j])
    with nogil:
        while True:
            j = 0
            while j < k:
                if t + m[j] > horizon:
                    return_code = HORIZON
                    break
                cls = classify(w + s_w[j], err + 1, wl, wh)
                if cls == INSIDE:
                    return_code = -1
                    break
                if cls == UNSURE:
                    return_code = AMBIGUOUS
                    break
                j += 1
            if j == k:
                return_code = AMBIGUOUS
            if return_code != -1:
                break
            w = w + s_w[j]
            c = c + s_c[j]
            t += m[j]
            err += 1
            cls = classify(c, err, cl, ch)
            if cls == INSIDE:
                return_code = FOUND
                break
            if cls == UNSURE:
                return_code = AMBIGUOUS
                break
    return return_code, t


cdef double speed(double[:, ::1] coef, double[:, ::1] freqs, double* x, int d) nogil:
    cdef double s = 0.0, ph
    cdef Py_ssize_t j, i
    for j in range(coef.shape[0]):
        ph = 0.0
        for i in range(d):
            ph += freqs[j, i] * x[i]
        ph *= 2.0 * M_PI
        s += coef[j, 0] * cos(ph) + coef[j, 1] * sin(ph)
    return s


cdef void step(double[:, ::1] coef, double[:, ::1] freqs, double* dirn, double* x,
               double h, int d, double* out) nogil:
    cdef double y[3]
    cdef double s1, s2, s3, s4, g
    cdef int i
    s1 = speed(coef, freqs, x, d)
    for i in range(d):
        y[i] = x[i] + 0.5 * h * s1 * dirn[i]
    s2 = speed(coef, freqs, y, d)
    for i in range(d):
        y[i] = x[i] + 0.5 * h * s2 * dirn[i]
    s3 = speed(coef, freqs, y, d)
    for i in range(d):
        y[i] = x[i] + h * s3 * dirn[i]
    s4 = speed(coef, freqs, y, d)
    g = (s1 + 2.0 * s2 + 2.0 * s3 + s4) / 6.0
    for i in range(d):
        out[i] = x[i] + h * g * dirn[i]


cdef double sup_dist(double* x, double* x0, int d) nogil:
    cdef double best = 0.0, f
    cdef int i
    for i in range(d):
        f = fmod(x[i] - x0[i], 1.0)
        if f < 0:
            f += 1.0
        if 1.0 - f < f:
            f = 1.0 - f
        if f > best:
            best = f
    return best


def _arrays(coef, freqs, direction, x):
    import numpy as np
    c = np.ascontiguousarray(coef, dtype=np.float64).reshape(-1, 2)
    f = np.ascontiguousarray(freqs, dtype=np.float64).reshape(c.shape[0], -1)
    return c, f


def rk4_step(coef, freqs, direction, x, double h):
    c, f = _arrays(coef, freqs, direction, x)
    cdef int d = len(x), i
    cdef double xs[3]
    cdef double ds[3]
    cdef double out[3]
    for i in range(d):
        xs[i] = x[i]
        ds[i] = direction[i]
    step(c, f, ds, xs, h, d, out)
    return [out[i] for i in range(d)]


def rk4_first_entry(coef, freqs, direction, x, x0, double r, double h, long long n_steps):
    c, f = _arrays(coef, freqs, direction, x)
    cdef double[:, ::1] cv = c
    cdef double[:, ::1] fv = f
    cdef int d = len(x), i
    cdef double cur[3]
    cdef double nxt[3]
    cdef double ds[3]
    cdef double tgt[3]
    cdef long long n, hit = -1
    for i in range(d):
        cur[i] = x[i]
        ds[i] = direction[i]
        tgt[i] = x0[i]
    with nogil:
        for n in range(n_steps):
            step(cv, fv, ds, cur, h, d, nxt)
            if sup_dist(nxt, tgt, d) < r:
                hit = n
                break
            for i in range(d):
                cur[i] = nxt[i]
    return hit, [cur[i] for i in range(d)]


def rk4_section(coef, freqs, direction, x, double target, double h, long long n_steps):
    c, f = _arrays(coef, freqs, direction, x)
    cdef double[:, ::1] cv = c
    cdef double[:, ::1] fv = f
    cdef int d = len(x), i
    cdef double cur[3]
    cdef double nxt[3]
    cdef double ds[3]
    cdef long long n, hit = -1
    for i in range(d):
        cur[i] = x[i]
        ds[i] = direction[i]
    with nogil:
        for n in range(n_steps):
            step(cv, fv, ds, cur, h, d, nxt)
            if nxt[0] >= target:
                hit = n
                break
            for i in range(d):
                cur[i] = nxt[i]
    return hit, [cur[i] for i in range(d)]
