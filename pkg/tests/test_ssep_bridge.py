import math

import numpy as np
import pytest

from ckmc.lattice_curve import (
    CornerFlip, IllegalMove, apply_move, build_rectangle, curve_from_rows, diamond,
    discretize_shape, pole_table,
)
from ckmc.observables import CurveView, local_slope
from ckmc.ssep_bridge import (
    BridgeError, ParticleConfig, assert_flip_is_exchange, config_vertices, height_profile,
    particle_density_convention, particles_to_region, region_to_particles, region_window,
)


@pytest.fixture(scope="module")
def dia():
    return discretize_shape(diamond(0.5), 16)


def _interior_flips(curve):
    """Corner flips whose two edges both lie strictly inside one region."""
    cv = CurveView(curve)
    out = []
    for k in (1, 2, 3, 4):
        a, b = cv.region_span(k)
        for i in range(a + 1, b):
            v = tuple(int(c) for c in cv.verts[i % cv.n])
            try:
                _, sign = curve.flip_block(v)
            except IllegalMove:
                continue
            m = CornerFlip(v, sign)
            try:
                apply_move(curve, m)
            except IllegalMove:
                continue
            out.append(m)
    return out


def test_staircase_reads_alternating(dia):
    cv = CurveView(dia)
    a, _ = cv.region_span(1)
    # edge a is D (a particle); start one step later to read R first
    start = tuple(cv.verts[a + 1])
    cfg = region_to_particles(dia, 1, start, 8)
    assert cfg.dump() == "01010101"
    assert particles_to_region(cfg) == "RDRDRDRD"


def test_flat_run_reads_empty():
    rows = {j: (-10, 9) for j in range(-3, 3)}
    rows[2] = (-10, -6)
    c = curve_from_rows(32, rows)
    cfg = region_to_particles(c, 1, (-4, 2), 10)
    assert cfg.eta == (0,) * 10


def test_region_three_round_trip(dia):
    w = region_window(dia, 3)
    assert w.k == 3
    cv = CurveView(dia)
    a, b = cv.region_span(3)
    seg = "".join(dia.edges[i % cv.n] for i in range(a, b))
    assert particles_to_region(w) == seg
    assert config_vertices(w)[-1] == tuple(cv.verts[b % cv.n])


def test_window_crossing_pole_raises(dia):
    cv = CurveView(dia)
    a, b = cv.region_span(1)
    with pytest.raises(BridgeError):
        region_to_particles(dia, 1, tuple(cv.verts[a]), b - a + 2)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_config_round_trips(k, rng):
    for eta in ([0] * 12, [0, 1] * 6):
        cfg = ParticleConfig(k, (0, 0), eta)
        assert ParticleConfig(k, (0, 0), _read_back(cfg)) == cfg
    for _ in range(2500):
        n = int(rng.integers(1, 40))
        cfg = ParticleConfig(k, (3, -2), rng.integers(0, 2, n))
        assert ParticleConfig(k, (3, -2), _read_back(cfg)) == cfg


def _read_back(cfg):
    from ckmc.ssep_bridge import _LETTERS
    _, part = _LETTERS[cfg.k]
    return [int(ch == part) for ch in particles_to_region(cfg)]


def test_output_is_monotone_path():
    cfg = ParticleConfig(2, (0, 0), [1, 0, 0, 1, 1])
    vs = np.array(config_vertices(cfg))
    assert np.all(np.diff(vs[:, 0]) <= 0) and np.all(np.diff(vs[:, 1]) <= 0)


def test_flip_inside_staircase_is_exchange(dia):
    cv = CurveView(dia)
    a, _ = cv.region_span(1)
    v = tuple(int(c) for c in cv.verts[a + 3])
    _, sign = dia.flip_block(v)
    i, d = assert_flip_is_exchange(dia, CornerFlip(v, sign))
    assert {i, i + d} == {2, 3}


def test_flip_without_corner_rejected():
    rows = {j: (-10, 9) for j in range(-3, 3)}
    rows[2] = (-10, -6)
    c = curve_from_rows(32, rows)
    with pytest.raises(IllegalMove):
        assert_flip_is_exchange(c, CornerFlip((-1, 2), 1))


def test_flip_at_pole_rejected():
    c = build_rectangle(16, 6, 6)
    R1 = pole_table(c)[0][0].R
    with pytest.raises(BridgeError):
        assert_flip_is_exchange(c, CornerFlip(R1, -1))


def test_flip_sequence_conserves_particles(small_curves, rng):
    for c in small_curves[::4]:
        cur = c
        for _ in range(30):
            flips = _interior_flips(cur)
            if not flips:
                break
            m = flips[int(rng.integers(len(flips)))]
            # raises unless the window count is unchanged and exactly one particle hops
            assert_flip_is_exchange(cur, m)
            nxt = apply_move(cur, m)
            assert len(nxt) == len(cur)
            assert sorted(nxt.edges) == sorted(cur.edges)
            cur = nxt


def test_height_profile_staircase(dia):
    hp = height_profile(dia, 1)
    inner = hp.f[2:-2]
    assert np.ptp(inner) <= math.sqrt(2) / 16 + 1e-12
    assert np.mean(hp.rho) == pytest.approx(0.5, abs=0.1)


def test_height_profile_flat():
    hp = height_profile(build_rectangle(16, 6, 6), 1)
    assert set(np.unique(hp.rho)) <= {0.0, 1.0}


def test_height_profile_lipschitz_and_density(small_curves):
    for c in small_curves[::5]:
        for k in (1, 2, 3, 4):
            hp = height_profile(c, k)
            if len(hp.s) < 2:
                continue
            assert np.all(np.abs(hp.slope) <= 1 + 1e-9)
            assert np.all((hp.rho >= 0) & (hp.rho <= 1))
            eta = np.array(region_window(c, k).eta)
            conv = particle_density_convention(k)
            assert np.array_equal(hp.rho, eta if conv > 0 else 1 - eta)


def test_exchange_moves_profile_at_one_point(dia):
    cv = CurveView(dia)
    a, _ = cv.region_span(1)
    v = tuple(int(c) for c in cv.verts[a + 3])
    _, sign = dia.flip_block(v)
    before = height_profile(dia, 1)
    after = height_profile(apply_move(dia, CornerFlip(v, sign)), 1)
    assert np.allclose(before.s, after.s)
    d = after.f - before.f
    hit = np.flatnonzero(np.abs(d) > 1e-12)
    assert len(hit) == 1
    assert abs(d[hit[0]]) == pytest.approx(2 / (math.sqrt(2) * 16))


def test_local_slope_is_particle_mean(small_curves):
    for c in small_curves[::7]:
        cv = CurveView(c)
        for k in (1, 2, 3, 4):
            a, b = cv.region_span(k)
            if b - a < 5:
                continue
            x = tuple(int(q) for q in cv.verts[a % cv.n])
            eta = region_to_particles(c, k, x, 5).eta
            xi_mean = local_slope(c, x, 4)
            mean = float(np.mean(eta))
            assert xi_mean == pytest.approx(mean if k % 2 else 1 - mean)
