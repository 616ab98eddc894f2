import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hitlab import cf as cfm, flow as fl, kernels, orbit
from hitlab.errors import NeverHitsError
from hitlab.flow import Reparametrization, TranslationFlow

from conftest import unit_fractions

GOLDEN = cfm.golden(40)
SILVER = cfm.ContinuedFraction(0, (2,) * 40)


def test_diagonal_entry_time():
    f = TranslationFlow((1, 1))
    hit = fl.flow_hit(f, (0, 0), (Fraction(1, 2), Fraction(1, 2)), Fraction(1, 10), 10)
    assert hit.time == Fraction(2, 5)


def test_frozen_coordinate_never_hits():
    f = TranslationFlow((1, 0))
    with pytest.raises(NeverHitsError):
        fl.flow_hit(f, (0, Fraction(3, 10)), (Fraction(1, 2), 0), Fraction(1, 10), 10)


def _dense_oracle(f, x, x0, r, t_max, dt):
    t = np.arange(0, t_max, dt)
    pos = np.array([float(a) for a in x])[None, :] + t[:, None] * np.array(f.floats)[None, :]
    off = (pos - np.array([float(a) for a in x0])[None, :]) % 1.0
    dist = np.minimum(off, 1 - off).max(axis=1)
    idx = np.flatnonzero(dist < float(r))
    return None if idx.size == 0 else t[idx[0]]


@pytest.mark.parametrize("seed", range(4))
def test_three_torus_flow_matches_dense_sampling(seed):
    rng = np.random.default_rng(seed)
    f = TranslationFlow.from_angles(GOLDEN, SILVER)
    x = tuple(Fraction(int(v), 10**6) for v in rng.integers(0, 10**6, 3))
    x0 = (0, 0, 0)
    r, dt = Fraction(1, 10), 1e-4
    hit = fl.flow_hit(f, x, x0, r, 50)
    want = _dense_oracle(f, x, x0, r, 50, dt)
    assert hit.time is not None and want is not None
    assert 0 <= want - float(hit.time) <= dt * 1.01


@given(st.tuples(unit_fractions(10**4), unit_fractions(10**4)), st.tuples(unit_fractions(10**4), unit_fractions(10**4)),
       st.integers(2, 40))
def test_flow_hit_is_boundary_of_ball(x, x0, k):
    f = TranslationFlow.from_angles(GOLDEN)
    r = Fraction(k, 100)
    hit = fl.flow_hit(f, x, x0, r, 200)
    if hit.time is None:
        return
    t = hit.time
    offs = [(a + t * v - b) % 1 for a, v, b in zip(x, f.direction, x0)]
    assert max(min(o, 1 - o) for o in offs) <= r
    if t > 0:
        # just before the entry time the point is outside the open ball
        s = t - Fraction(1, 10**9)
        offs = [(a + s * v - b) % 1 for a, v, b in zip(x, f.direction, x0)]
        assert max(min(o, 1 - o) for o in offs) >= r


def test_identity_reparametrization_matches_exact():
    f = TranslationFlow.from_angles(GOLDEN)
    one = Reparametrization.constant(1.0, 2)
    x, x0, r = (Fraction(1, 7), Fraction(2, 9)), (0, 0), Fraction(1, 20)
    exact = float(fl.flow_hit(f, x, x0, r, 100).time)
    got = fl.reparam_flow_hit(f, one, x, x0, r, 100)
    assert abs(got.time - exact) < 1e-8


def test_doubling_speed_halves_time():
    f = TranslationFlow.from_angles(GOLDEN)
    phi = Reparametrization.cosine(2)
    x, x0, r = (Fraction(1, 7), Fraction(2, 9)), (0, 0), Fraction(1, 20)
    t1 = fl.reparam_flow_hit(f, phi, x, x0, r, 100).time
    t2 = fl.reparam_flow_hit(f, phi.scaled(2.0), x, x0, r, 100).time
    assert abs(t2 - t1 / 2) < 1e-8


@pytest.mark.parametrize("backend", sorted(kernels.BACKENDS))
def test_sandwich_and_quadrature_oracle(backend):
    f = TranslationFlow.from_angles(GOLDEN)
    phi = Reparametrization.cosine(2, 0.5, C=3.0)
    rng = np.random.default_rng(5)
    for _ in range(3):
        x = tuple(float(v) for v in rng.random(2))
        x0 = tuple(float(v) for v in rng.random(2))
        r = 0.05
        tf = fl.flow_hit(f, [Fraction(v) for v in x], [Fraction(v) for v in x0], Fraction(r), 200).time
        tr = fl.reparam_flow_hit(f, phi, x, x0, r, 600, backend=backend)
        oracle = fl.quadrature_hit(f, phi, x, x0, r, 200)
        assert abs(tr.time - oracle) < 1e-8
        assert float(tf) / 3 - tr.tolerance <= tr.time <= 3 * float(tf) + tr.tolerance


def test_time1_maps():
    f = TranslationFlow.from_angles(GOLDEN, SILVER)
    x = (Fraction(1, 3), Fraction(1, 5), Fraction(1, 7))
    p = fl.time1_map(f, None, x)
    step = orbit.translate([GOLDEN, SILVER], x[1:], 1)
    assert p == orbit.TorusPoint((x[0],) + step.coordinates)
    two = Reparametrization.constant(2.0, 3)
    s = fl.time1_map(f, two, [float(v) for v in x])
    want = [(float(a) + 2 * v) % 1.0 for a, v in zip(x, f.floats)]
    assert np.allclose(s.position, want, atol=1e-12)


def test_map1_inequality():
    f = TranslationFlow.from_angles(GOLDEN)
    phi = Reparametrization.cosine(2, 0.5, C=3.0)
    rng = np.random.default_rng(1)
    for _ in range(3):
        x, x0 = tuple(rng.random(2)), tuple(rng.random(2))
        assert fl.map1_check(f, phi, x, x0, 0.05, 200).holds


def test_section_is_exact_translation():
    f = TranslationFlow.from_angles(GOLDEN, SILVER)
    x = (Fraction(0), Fraction(1, 5), Fraction(1, 7))
    sp = fl.poincare_section(f, None, 0, x)
    assert sp.time == 1
    assert sp.point == orbit.translate([GOLDEN, SILVER], x[1:], 1)
    assert fl.section_angles(f) == (GOLDEN.frac, SILVER.frac)


def test_reparametrized_section_times_bounded():
    f = TranslationFlow.from_angles(GOLDEN)
    phi = Reparametrization.cosine(2, 0.5, C=3.0)
    for x1 in (0.0, 0.3, 0.7):
        sp = fl.poincare_section(f, phi, 0.0, (x1, 0.2))
        gap = (0.0 - x1) % 1.0 or 1.0
        assert gap / 3 <= sp.time <= 3 * gap


def test_reparametrization_certification():
    with pytest.raises(ValueError):
        Reparametrization.cosine(2, 1.5)
    with pytest.raises(ValueError):
        Reparametrization.cosine(2, 0.5, C=1.9)
    phi = Reparametrization.cosine(2, 0.5, C=3.0)
    xs = np.random.default_rng(0).random((1000, 2))
    v = phi(xs)
    assert np.all(v > 1 / 3) and np.all(v < 3)
    assert Reparametrization.from_json(phi.to_json()) == phi


def test_density_check_small():
    f = TranslationFlow.from_angles(GOLDEN)
    rep = fl.density_check(f, Reparametrization.cosine(2), n_samples=2000, steps=50)
    assert rep.relative_error < 1e-3


def test_section_constant_measured():
    f = TranslationFlow.from_angles(GOLDEN, SILVER)
    y = (Fraction(0), Fraction(1, 2), Fraction(1, 3))
    comps = [fl.section_comparison(f, (Fraction(1, 5), Fraction(1, 7), Fraction(2, 9)), y, Fraction(1, 40), 1, 2000)]
    c = fl.measured_constant(comps)
    assert c is not None and c > 0
