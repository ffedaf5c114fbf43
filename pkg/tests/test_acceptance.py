"""Acceptance criteria A1-A15; each test prints one PASS/FAIL line.

The statistical criteria run at full scale and take minutes. ``CKMC_THREADS``
caps the number of worker processes.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pytest

from ckmc.continuum import (
    J_H, J_H_eps, J_H_eps_lattice, SmoothTrajectory, TestFunction, area_decay_rate,
    weak_form_residual_lattice,
)
from ckmc.harness.orchestrate import worker_count
from ckmc.kmc_engine import (
    BiasField, Engine, SimConfig, enumerate_catalog, read_events, replay, run, write_events,
)
from ckmc.lattice_curve import (
    CornerFlip, IllegalMove, PoleDelete, build_rectangle, diamond, discretize_shape, disk, from_snapshot,
    pole_table, read_snapshot, to_snapshot, validate, write_snapshot,
)
from ckmc.observables import CurveView, Observables, series
from ckmc.pole_zrp import (
    exact_height_log_pmf, exact_height_pmf, exact_p2_expectation, rate_C, rate_C_prime,
    rate_C_second, simulate_zrp, u_crit,
)
from ckmc.ssep_bridge import (
    ParticleConfig, assert_flip_is_exchange, config_vertices, particles_to_region,
    region_to_particles, region_window,
)

from helpers import reachable_curves

BUMP = BiasField.bump(0.5, (0.1, 0.15), 0.6)
WINDOW = (0.01, 0.05)
DICTIONARY = [
    BiasField.bump(1.0, (0.0, 0.0), 0.6),
    BiasField.bump(1.0, (0.2, 0.0), 0.4),
    BiasField.bump(1.0, (0.0, 0.25), 0.4),
    BiasField.bump(1.0, (-0.15, -0.15), 0.5),
    BiasField.bump(1.0, (0.25, 0.25), 0.35),
]


def report(capsys, tag: str, ok: bool, detail: str, t0: float) -> None:
    with capsys.disabled():
        print(f"\n{tag} {'PASS' if ok else 'FAIL'} {detail} [{time.perf_counter() - t0:.1f} s]")
    assert ok, f"{tag}: {detail}"


def pmap(fn, tasks):
    n = worker_count(len(tasks))
    if n == 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, tasks))


def mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


# -- workers (module level so that they pickle) ---------------------------------------

class AreaDrift:
    """Instantaneous expected dA/dt from the rate catalog (diagnostic only)."""

    names = ("area_drift",)

    def __init__(self, beta: float):
        self.beta = beta

    def __call__(self, curve, t):
        d = 0.0
        for m, r in enumerate_catalog(curve, self.beta).entries:
            d += r * (m.sign if isinstance(m, CornerFlip) else -2 if isinstance(m, PoleDelete) else 2)
        return [d]


def _disk_replica(args):
    """Area slope on the fit window and, optionally, weak-form residuals."""
    N, beta, replica, with_residuals = args
    snap = 0.001 if with_residuals else None
    cfg = SimConfig(N=N, beta=beta, horizon_T=WINDOW[1], seed=606, replica=replica,
                    observable_cadence=0.001, snapshot_cadence=snap, record_events=False)
    rec = run(cfg, discretize_shape(disk(0.4), N),
              [Observables.from_names(["area"]), AreaDrift(beta)])
    s = series(rec, "area")
    sel = (s.t >= WINDOW[0] - 1e-12) & (s.t <= WINDOW[1] + 1e-12)
    slope = float(np.polyfit(s.t[sel], s.values[sel], 1)[0])
    res = []
    if with_residuals:
        res = [weak_form_residual_lattice(rec, G, beta, 0.05) for G in DICTIONARY]
    drift = series(rec, "area_drift").time_average(*WINDOW)
    return {"slope": slope, "drift": drift, "residuals": res, "status": rec.status}


# slope windows floor(eps N) for eps = 0.025, 0.05, 0.1; the criterion uses 0.05
POLE_NAMES = ["slope+1_l6", "slope+1_l12", "slope+1_l25", "pole_indicator1", "V1_eta0.05", "g+_a0.05", "g-_a0.05"]


def _pole_replica(replica):
    cfg = SimConfig(N=256, beta=2.0, horizon_T=WINDOW[1], seed=808, replica=replica,
                    observable_cadence=0.0005, record_events=False)
    rec = run(cfg, discretize_shape(disk(0.4), 256), [Observables.from_names(POLE_NAMES)])
    return {name: series(rec, name).time_average(*WINDOW) for name in POLE_NAMES}


def _martingale_replica(args):
    replica, dual = args
    cfg = SimConfig(N=32, beta=2.0, horizon_T=0.05, seed=1010, bias=BUMP, replica=replica)
    init = discretize_shape(disk(0.4), 32)
    if dual:
        free = SimConfig(N=32, beta=2.0, horizon_T=0.05, seed=1010, replica=replica)
        rec = run(free, init)
        eng = replay(rec.initial, cfg, rec.event_t, rec.event_code, rec.event_val, rec.t_final)
        return math.exp(32 * eng.log_rnd())
    return math.exp(-32 * run(cfg, init).log_rnd)


def _rnd_replica(args):
    N, replica = args
    cfg = SimConfig(N=N, beta=2.0, horizon_T=0.02, seed=1111, bias=BUMP, replica=replica,
                    snapshot_cadence=0.0005, record_events=False)
    rec = run(cfg, discretize_shape(disk(0.4), N))
    return abs(rec.log_rnd - J_H_eps_lattice(rec, BUMP, 2.0, 0.05))


# -- shared runs ------------------------------------------------------------------------

@pytest.fixture(scope="module")
def disk_runs():
    cache = {}

    def get(N, beta, with_residuals):
        key = (N, beta, with_residuals)
        if key not in cache:
            cache[key] = pmap(_disk_replica, [(N, beta, r, with_residuals) for r in range(16)])
        return cache[key]

    return get


@pytest.fixture(scope="module")
def pole_run():
    return pmap(_pole_replica, list(range(16)))


# -- criteria ---------------------------------------------------------------------------

def test_A1_detailed_balance(capsys):
    beta = 1.5
    curves = reachable_curves(16, beta, 1000, seed=1)
    t0 = time.perf_counter()
    cfg = SimConfig(N=16, beta=beta, horizon_T=0.0, record_events=False)
    worst, n_moves = 0.0, 0
    for c in curves:
        eng = Engine(c, cfg, margin=4, rng=np.random.default_rng(0))
        for m, r in eng.catalog().entries:
            back = c.inverse(m)
            eng.apply_move(m)
            after = eng.curve()
            r_back = eng.rate_of(back)
            eng.apply_move(back)
            lhs = r * math.exp(-beta * len(c))
            rhs = r_back * math.exp(-beta * len(after))
            worst = max(worst, abs(lhs - rhs) / max(lhs, rhs))
            n_moves += 1
    elapsed = time.perf_counter() - t0
    ok = len(curves) == 1000 and worst <= 1e-12 and elapsed < 10.0
    report(capsys, "A1", ok, f"{len(curves)} curves, {n_moves} moves, worst rel {worst:.2e}", t0)


def test_A2_catalog_delta(capsys):
    t0 = time.perf_counter()
    cfg = SimConfig(N=32, beta=1.5, horizon_T=math.inf, seed=4, bias=BUMP, record_events=False)
    eng = Engine(build_rectangle(32, 64, 64), cfg)
    msgs = []
    while eng.n_events < 100_000 and not eng.terminal:
        eng.advance(math.inf, max_events=min(10_000, 100_000 - eng.n_events))
        ok, msg = eng.check_consistency()
        if not ok:
            msgs.append(msg)
    full = enumerate_catalog(eng.curve(), 1.5, BUMP, eng.t).as_dict()
    inc = eng.catalog().as_dict()
    same_keys = set(full) == set(inc)
    worst = max(abs(inc[m] - r) / r for m, r in full.items()) if same_keys else math.inf
    elapsed = time.perf_counter() - t0
    ok = eng.n_events == 100_000 and not msgs and same_keys and worst <= 1e-12 and elapsed < 30
    report(capsys, "A2", ok, f"{eng.n_events} events, {len(full)} moves, "
           f"worst rel {worst:.1e}, checkpoint failures {len(msgs)}", t0)


def test_A3_zrp_exact(capsys):
    t0 = time.perf_counter()
    target = math.exp(-1.5)
    vals = [exact_p2_expectation(ell, 1.5) for ell in (10, 20, 40, 80)]
    gaps = [abs(v - target) for v in vals]
    monotone = all(a > b for a, b in zip(gaps, gaps[1:]))
    ok = monotone and abs(vals[-1] - 0.223130) <= 0.02 and time.perf_counter() - t0 < 1
    report(capsys, "A3", ok, "E = " + ", ".join(f"{v:.6f}" for v in vals), t0)


def test_A4_zrp_sampler(capsys):
    t0 = time.perf_counter()
    st = simulate_zrp(20, 1.5, 10**6, seed=44)
    tv = st.tv_distance(exact_height_pmf(20, 1.5))
    exact = exact_p2_expectation(20, 1.5)
    z = (st.p2_mean - exact) / st.p2_stderr
    ok = tv <= 0.02 and abs(z) <= 3 and time.perf_counter() - t0 < 60
    report(capsys, "A4", ok, f"TV {tv:.4f}, p2 {st.p2_mean:.4f} vs {exact:.4f} (z {z:+.2f})", t0)


def test_A5_rate_function(capsys):
    t0 = time.perf_counter()
    beta = 1.5
    uc = u_crit(beta)
    c0 = abs(rate_C(uc, beta))
    h = 1e-5
    c1 = abs(rate_C(uc + h, beta) - rate_C(uc - h, beta)) / (2 * h)
    us = np.linspace(0.01, 5.0, 200)
    c2_fd = max(abs((rate_C_prime(u + 1e-6 * u, beta) - rate_C_prime(u - 1e-6 * u, beta))
                    / (2e-6 * u) - 2 / (u + 2 * u * u)) for u in us)
    c2_cl = max(abs(rate_C_second(u) - 2 / (u + 2 * u * u)) for u in us)
    lp = exact_height_log_pmf(400, beta)
    ldp = max(abs(-lp[int(math.floor(u * 400))] / 400 - rate_C(u, beta))
              for u in (uc / 2, uc, 2 * uc))
    ok = (c0 <= 1e-12 and c1 <= 1e-6 and c2_fd <= 1e-6 and c2_cl <= 1e-6 and ldp <= 0.02
          and time.perf_counter() - t0 < 10)
    report(capsys, "A5", ok, f"C(u_c) {c0:.1e}, C'(u_c) {c1:.1e}, C'' err {max(c2_fd, c2_cl):.1e}, "
           f"LDP err {ldp:.4f}", t0)


def test_A6_area_decay_finite_beta(capsys, disk_runs):
    t0 = time.perf_counter()
    reps = disk_runs(128, 2.0, True)
    m, se = mean_se([r["slope"] for r in reps])
    target = -area_decay_rate(2.0)
    d, d_se = mean_se([r["drift"] for r in reps])
    ok = abs(m - target) <= 0.1 * abs(target) and all(r["status"] == "horizon" for r in reps)
    report(capsys, "A6", ok, f"dA/dt {m:.4f} +- {se:.4f} vs {target:.4f} (10%); "
           f"catalog drift {d:.4f} +- {d_se:.4f}", t0)


def test_A7_area_decay_zero_temperature(capsys, disk_runs):
    t0 = time.perf_counter()
    reps = disk_runs(128, math.inf, False)
    m, se = mean_se([r["slope"] for r in reps])
    d, d_se = mean_se([r["drift"] for r in reps])
    ok = abs(m + 2.0) <= 0.2 and all(r["status"] == "horizon" for r in reps)
    report(capsys, "A7", ok, f"dA/dt {m:.4f} +- {se:.4f} vs -2 (10%); "
           f"catalog drift {d:.4f} +- {d_se:.4f}", t0)


def test_A8_pole_slope(capsys, pole_run):
    t0 = time.perf_counter()
    target = math.exp(-2.0)
    s, s_se = mean_se([r["slope+1_l12"] for r in pole_run])
    p, p_se = mean_se([r["pole_indicator1"] for r in pole_run])
    sweep = {ell: mean_se([r[f"slope+1_l{ell}"] for r in pole_run])[0] for ell in (6, 25)}
    ok = abs(s - target) <= 0.02 and abs(p - target) <= 0.03
    report(capsys, "A8", ok, f"slope {s:.4f} +- {s_se:.4f} (target {target:.4f} +- 0.02), "
           f"1(p=2) {p:.4f} +- {p_se:.4f} (+- 0.03); eps 0.025 -> {sweep[6]:.4f}, "
           f"eps 0.1 -> {sweep[25]:.4f}", t0)


def test_A9_volume_width(capsys, pole_run):
    t0 = time.perf_counter()
    target = math.exp(2.0) - 1
    V, V_se = mean_se([r["V1_eta0.05"] / 0.05**2 for r in pole_run])
    gp, gp_se = mean_se([r["g+_a0.05"] / 0.05 for r in pole_run])
    gm, gm_se = mean_se([r["g-_a0.05"] / 0.05 for r in pole_run])
    ok = all(abs(v - target) <= 0.15 * target for v in (V, gp, gm))
    report(capsys, "A9", ok, f"V/eta^2 {V:.3f} +- {V_se:.3f}, g+/alpha {gp:.3f} +- {gp_se:.3f}, "
           f"g-/alpha {gm:.3f} +- {gm_se:.3f} (target {target:.3f} +- 15%)", t0)


def test_A10_martingale(capsys):
    t0 = time.perf_counter()
    tilted = pmap(_martingale_replica, [(r, False) for r in range(400)])
    dual = pmap(_martingale_replica, [(r, True) for r in range(400)])
    mt, st = mean_se(tilted)
    md, sd = mean_se(dual)
    ok = abs(mt - 1) <= 3 * st and abs(md - 1) <= 3 * sd
    report(capsys, "A10", ok, f"tilted {mt:.4f} +- {st:.4f}, dual {md:.4f} +- {sd:.4f}", t0)


def test_A11_rnd_vs_functional(capsys):
    t0 = time.perf_counter()
    med = {}
    for N in (64, 128):
        med[N] = float(np.median(pmap(_rnd_replica, [(N, r) for r in range(32)])))
    ok = med[128] < med[64]
    report(capsys, "A11", ok, f"median gap N=64 {med[64]:.5f}, N=128 {med[128]:.5f}", t0)


def test_A12_eps_convergence(capsys):
    t0 = time.perf_counter()
    traj = SmoothTrajectory.shrinking_ellipse(0.4, 0.3, 1.0, T=0.1)
    H = TestFunction.from_bias(BUMP)
    exact = J_H(traj, H, 2.0)
    errs = [J_H_eps(traj, H, 2.0, eps) - exact for eps in (0.1, 0.05, 0.025)]
    ratios = [abs(a / b) for a, b in zip(errs, errs[1:])]
    ok = all(1.5 <= q <= 2.5 for q in ratios) and time.perf_counter() - t0 < 10
    report(capsys, "A12", ok, "errors " + ", ".join(f"{e:+.3e}" for e in errs)
           + "; ratios " + ", ".join(f"{q:.2f}" for q in ratios), t0)


def _interior_range(cv: CurveView, k: int) -> range:
    a, b = cv.region_span(k)
    # keep both flipped edges off the first and last edge of the region
    return range(a + 2, b - 1)


def test_A13_ssep_bridge(capsys):
    t0 = time.perf_counter()
    rng = np.random.default_rng(1313)
    curves = reachable_curves(32, 1.5, 200, seed=13, events_between=25, min_edges=48)
    views = [CurveView(c) for c in curves]
    letters = {1: "RD", 2: "DL", 3: "LU", 4: "UR"}
    n_round = n_exch = 0
    while n_round < 10_000:
        cv = views[int(rng.integers(len(views)))]
        k = int(rng.integers(1, 5))
        a, b = cv.region_span(k)
        if b - a < 2:
            continue
        s = int(rng.integers(a, b))
        n = int(rng.integers(1, b - s + 1))
        cfg = region_to_particles(cv, k, tuple(int(q) for q in cv.verts[s % cv.n]), n)
        seg = "".join(cv.curve.edges[i % cv.n] for i in range(s, s + n))
        assert particles_to_region(cfg) == seg
        assert config_vertices(cfg) == [tuple(int(q) for q in cv.verts[i % cv.n])
                                        for i in range(s, s + n + 1)]
        eta = rng.integers(0, 2, n)
        free = ParticleConfig(k, (0, 0), eta)
        back = [int(ch == letters[k][1]) for ch in particles_to_region(free)]
        assert ParticleConfig(k, (0, 0), back) == free
        n_round += 1
    while n_exch < 10_000:
        cv = views[int(rng.integers(len(views)))]
        c = cv.curve
        k = int(rng.integers(1, 5))
        idx = _interior_range(cv, k)
        if not len(idx):
            continue
        v = tuple(int(q) for q in cv.verts[int(rng.choice(idx)) % cv.n])
        try:
            _, sign = c.flip_block(v)
            after = c.copy().apply(CornerFlip(v, sign))
        except IllegalMove:
            continue
        i, d = assert_flip_is_exchange(c, CornerFlip(v, sign))
        e0 = np.array(region_window(cv, k).eta)
        e1 = np.array(region_window(after, k).eta)
        changed = np.flatnonzero(e0 != e1).tolist()
        assert changed == sorted([i, i + d]) and e0.sum() == e1.sum()
        n_exch += 1

    # long flip sequence inside the regions of one curve
    c = discretize_shape(diamond(0.6), 64).canonical()
    cv = CurveView(c)
    poles0 = pole_table(c)[0]
    counts0 = [region_window(c, k).n_particles for k in (1, 2, 3, 4)]
    ranges = [_interior_range(cv, k) for k in (1, 2, 3, 4)]
    n = len(c)
    flips = 0
    bad = 0
    while flips < 100_000:
        rk = ranges[int(rng.integers(4))]
        v = c.vertices[int(rk[int(rng.integers(len(rk)))]) % n]
        try:
            _, sign = c.flip_block(v)
            c.apply(CornerFlip(v, sign), check=False)
        except IllegalMove:
            continue
        flips += 1
        if flips % 1000 == 0:
            counts = [region_window(c, k).n_particles for k in (1, 2, 3, 4)]
            bad += counts != counts0 or pole_table(c)[0] != poles0 or not validate(c).ok
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and elapsed < 30
    report(capsys, "A13", ok, f"{n_round} round trips, {n_exch} exchanges, {flips} interior "
           f"flips, {bad} failed checkpoints", t0)


def test_A14_weak_form_scaling(capsys, disk_runs):
    t0 = time.perf_counter()
    lines, ok = [], True
    r64 = np.array([r["residuals"] for r in disk_runs(64, 2.0, True)])
    r128 = np.array([r["residuals"] for r in disk_runs(128, 2.0, True)])
    for g in range(len(DICTIONARY)):
        m64, s64 = mean_se(r64[:, g])
        m128, s128 = mean_se(r128[:, g])
        pooled = math.hypot(s64, s128)
        good = abs(m128) <= 0.6 * abs(m64) + 2 * pooled
        ok &= good
        lines.append(f"G{g}: {m64:+.4f} -> {m128:+.4f} (se {pooled:.4f}){'' if good else ' X'}")
    report(capsys, "A14", ok, "; ".join(lines), t0)


def test_A15_persistence(capsys, tmp_path):
    t0 = time.perf_counter()
    cfg = SimConfig(N=32, beta=2.0, horizon_T=0.02, seed=1515, bias=BUMP, snapshot_cadence=0.005)
    rec = run(cfg, discretize_shape(disk(0.4), 32))
    snap_ok = True
    for t, c in rec.snapshots:
        text = to_snapshot(c, 2.0, t)
        c2, b2, t2 = from_snapshot(text)
        snap_ok &= to_snapshot(c2, b2, t2) == text
        p = tmp_path / "s.snap"
        write_snapshot(p, c, 2.0, t)
        c3, b3, t3 = read_snapshot(p)
        write_snapshot(tmp_path / "s2.snap", c3, b3, t3)
        snap_ok &= p.read_bytes() == (tmp_path / "s2.snap").read_bytes()
    ev1, ev2 = tmp_path / "a.log", tmp_path / "b.log"
    write_events(ev1, rec.event_t, rec.event_code, rec.event_val, t_end=rec.t_final)
    t, c, v = read_events(ev1)
    write_events(ev2, t, c, v, t_end=rec.t_final)
    log_ok = ev1.read_bytes() == ev2.read_bytes() and len(t) == rec.n_events
    eng = replay(rec.initial, cfg, t, c, v, rec.t_final)
    replay_ok = (to_snapshot(eng.curve(), 2.0, rec.t_final)
                 == to_snapshot(rec.final, 2.0, rec.t_final))
    ok = snap_ok and log_ok and replay_ok and time.perf_counter() - t0 < 5
    report(capsys, "A15", ok, f"snapshots {snap_ok}, event log {log_ok} ({rec.n_events} events), "
           f"replay {replay_ok}", t0)
