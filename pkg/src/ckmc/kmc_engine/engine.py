"""Contour-dynamics simulation: catalogs, tilts, runs and Radon-Nikodym accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Protocol, Sequence

import numpy as np

from ..lattice_curve import (
    CornerFlip,
    IllegalMove,
    LatticeCurve,
    Move,
    PoleDelete,
    PoleGrow,
    POLE_DIR,
    RIGHT_TURN,
    STEP,
    validate,
)
from . import _core as C
from .bias import BiasField
from .fenwick import FenwickSampler

MASK64 = (1 << 64) - 1
SEED_MIX = 0x9E3779B97F4A7C15

STATUS_NAMES = {
    C.ST_TIME: "horizon",
    C.ST_EXTINCT: "extinct",
    C.ST_GUARD: "guard",
    C.ST_AREA: "area",
    C.ST_CAPACITY: "capacity",
}


class Extinct(RuntimeError):
    """No legal move is left."""


def replica_seed(seed: int, replica: int) -> int:
    """Per-replica key: the replica index times a fixed odd constant, XORed in."""
    return (int(seed) ^ ((int(replica) * SEED_MIX) & MASK64)) & MASK64


def make_rng(seed: int, replica: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=replica_seed(seed, replica)))


@dataclass
class SimConfig:
    N: int
    beta: float
    horizon_T: float
    seed: int = 0
    bias: BiasField | None = None
    snapshot_cadence: float | None = None
    observable_cadence: float | None = None
    r0: float | None = None
    record_events: bool = True
    stop_area_fraction: float | None = None
    dt_max: float | None = None
    replica: int = 0

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not (self.beta > 1.0):
            raise ValueError("beta must exceed 1 (or be inf)")
        if self.horizon_T < 0:
            raise ValueError("horizon_T must be nonnegative")
        for name in ("snapshot_cadence", "observable_cadence"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def e2b(self) -> float:
        return 0.0 if math.isinf(self.beta) else math.exp(-2.0 * self.beta)

    def effective_dt_max(self) -> float:
        b = self.bias
        cands = [self.observable_cadence or math.inf, self.snapshot_cadence or math.inf]
        if b is not None and b.time_dependent:
            cands.append(0.1 / (abs(b.kappa) * b.sup_norm()))
        return min(cands)


# -- engine ------------------------------------------------------------------------

class Engine:
    """Compiled simulator state for one replica."""

    UBUF = 1 << 15
    EBUF = 1 << 15

    def __init__(self, curve: LatticeCurve, config: SimConfig, *, margin: int | None = None,
                 t0: float = 0.0, rng: np.random.Generator | None = None):
        rep = validate(curve)
        if not rep.ok:
            raise IllegalMove(f"initial curve invalid: {rep}")
        if curve.N != config.N:
            raise ValueError(f"curve has N={curve.N}, config N={config.N}")
        self.config = config
        self.N = config.N
        rows = curve.rows()
        cols = curve.columns()
        extent = max(max(abs(j) for j in rows), max(abs(i) for i in cols)) + 2
        margin = self.N + 16 if margin is None else margin
        off = extent + margin
        cap = 2 * off + 1
        G = np.empty((4, cap), dtype=np.int64)
        G[0, :] = C.EMPTY_LO
        G[1, :] = C.EMPTY_HI
        G[2, :] = C.EMPTY_LO
        G[3, :] = C.EMPTY_HI
        for j, (lo, hi) in rows.items():
            G[0, j + off] = lo
            G[1, j + off] = hi
        for i, (lo, hi) in cols.items():
            G[2, i + off] = lo
            G[3, i + off] = hi
        ext = np.zeros(C.N_EXT, dtype=np.int64)
        ext[C.E_JMIN], ext[C.E_JMAX] = min(rows), max(rows)
        ext[C.E_IMIN], ext[C.E_IMAX] = min(cols), max(cols)
        ext[C.E_OFF], ext[C.E_CAP] = off, cap
        ext[C.E_AREA] = sum(hi - lo + 1 for lo, hi in rows.values())
        self.G, self.ext, self.G0 = G, ext, G.copy()
        self.area0 = int(ext[C.E_AREA])

        bias = config.bias
        par = np.zeros(C.N_PAR)
        par[C.P_N] = self.N
        par[C.P_BETA] = config.beta
        par[C.P_E2B] = config.e2b
        par[C.P_HAS_BIAS] = 0.0 if (bias is None or bias.is_zero) else 1.0
        par[C.P_TKIND] = 1.0 if (bias is not None and bias.profile == "linear") else 0.0
        par[C.P_TKAPPA] = 0.0 if bias is None else bias.kappa
        par[C.P_DTMAX] = config.effective_dt_max()
        par[C.P_R0SQ] = 0.0 if config.r0 is None else config.r0**2
        f = config.stop_area_fraction
        par[C.P_AREA_STOP] = 0.0 if f is None else (1.0 - f) * self.area0
        self.par = par
        self.bumps = (bias or BiasField()).as_array()

        M = 8 * cap + 4
        self.base = np.zeros(M)
        self.w = np.zeros(M)
        self.dsn = np.zeros(M)
        self.tree = np.zeros(M + 1)
        self.pgeo = np.zeros((4, 3), dtype=np.int64)
        self.acc = np.zeros(C.N_ACC)
        self.t = float(t0)
        ph = C.phi(par, self.t)
        C.rebuild_all(G, ext, par, self.bumps, self.tree, self.base, self.w, self.dsn,
                      self.acc, self.pgeo, ph)
        self.acc[C.A_SG] = C.gamma_S(G, ext, par, self.bumps)
        self.acc[C.A_TNEXT] = -1.0
        self.acc[C.A_TREF] = self.t + par[C.P_DTMAX]
        self.sg0 = float(self.acc[C.A_SG])
        self.phi0 = C.phi(par, self.t)
        self.t0 = self.t

        self.rng = rng if rng is not None else make_rng(config.seed, config.replica)
        self._u = self.rng.random(self.UBUF)
        self._ucur = 0
        self.n_events = 0
        self.status = C.ST_TIME
        self._ev_t: list[np.ndarray] = []
        self._ev_code: list[np.ndarray] = []
        self._ev_val: list[np.ndarray] = []

    # -- state access --------------------------------------------------------
    @property
    def area_blocks(self) -> int:
        return int(self.ext[C.E_AREA])

    @property
    def terminal(self) -> bool:
        return self.status not in (C.ST_TIME, C.ST_BUFFER)

    def curve(self) -> LatticeCurve:
        codes, ax, ay = C.export_edges(self.G, self.ext)
        return LatticeCurve(self.N, (int(ax), int(ay)), "".join("RDLU"[c] for c in codes))

    def rows(self) -> dict[int, tuple[int, int]]:
        off = self.ext[C.E_OFF]
        return {j: (int(self.G[0, j + off]), int(self.G[1, j + off]))
                for j in range(int(self.ext[C.E_JMIN]), int(self.ext[C.E_JMAX]) + 1)}

    def total_rate(self) -> float:
        return float(self.w.sum())

    def l1_to_initial(self) -> float:
        return self.ext[C.E_DL1] / self.N**2

    # -- dynamics --------------------------------------------------------------
    def advance(self, t_stop: float, max_events: int | None = None) -> int:
        """Run until ``t_stop`` (or a terminal condition); returns the status code."""
        if self.terminal:
            return self.status
        rec = self.config.record_events
        left = math.inf if max_events is None else max_events
        while True:
            if self._ucur + 2 > len(self._u):
                rest = self._u[self._ucur:]
                self._u = np.concatenate([rest, self.rng.random(self.UBUF)])
                self._ucur = 0
            cap_ev = int(min(self.EBUF, left))
            if cap_ev <= 0:
                return C.ST_BUFFER
            if rec:
                ev_t = np.empty(cap_ev)
                ev_code = np.empty(cap_ev, dtype=np.int64)
                ev_val = np.empty((cap_ev, 3), dtype=np.int64)
            else:
                ev_t = np.empty(1)
                ev_code = np.empty(1, dtype=np.int64)
                ev_val = np.empty((1, 3), dtype=np.int64)
            st, n, ucur, t = C.run_loop(self.G, self.ext, self.G0, self.par, self.bumps,
                                        self.tree, self.base, self.w, self.dsn, self.acc,
                                        self.pgeo, self._u, self._ucur, self.t, float(t_stop),
                                        cap_ev, ev_t, ev_code, ev_val, rec)
            self._ucur, self.t = int(ucur), float(t)
            self.n_events += int(n)
            left -= n
            if rec and n:
                self._ev_t.append(ev_t[:n].copy())
                self._ev_code.append(ev_code[:n].copy())
                self._ev_val.append(ev_val[:n].copy())
            if st != C.ST_BUFFER:
                self.status = int(st)
                return self.status

    def events(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self._ev_t:
            return np.empty(0), np.empty(0, dtype=np.int64), np.empty((0, 3), dtype=np.int64)
        return (np.concatenate(self._ev_t), np.concatenate(self._ev_code),
                np.concatenate(self._ev_val))

    def apply_event(self, t: float, code: int, a: int, b: int, c: int) -> None:
        """Apply a logged event at time ``t`` (replay); rates integrate up to ``t``."""
        s = C.slot_of_event(self.G, self.ext, code, a, b, c)
        if s < 0:
            raise IllegalMove(f"logged event not legal: {format_event(t, code, a, b, c)}")
        self._integrate_to(t)
        ph = C.phi(self.par, t)
        self.acc[C.A_LOGTILT] += ph * self.dsn[s]
        out = np.zeros(4, dtype=np.int64)
        if not C.apply_slot(self.G, self.ext, self.G0, self.par, self.bumps, self.tree,
                            self.base, self.w, self.dsn, self.acc, self.pgeo, s, ph, out):
            raise RuntimeError("geometry capacity exceeded")
        self.acc[C.A_TNEXT] = -1.0
        self.n_events += 1

    def _integrate_to(self, t: float) -> None:
        timedep = self.par[C.P_TKIND] != 0.0 and self.par[C.P_HAS_BIAS] != 0.0
        while timedep and self.acc[C.A_TREF] < t:
            tr = float(self.acc[C.A_TREF])
            C._integrate(self.par, self.acc, self.t, tr)
            self.t = tr
            C.refresh_tilts(self.tree, self.base, self.w, self.dsn, self.acc, C.phi(self.par, tr))
            self.acc[C.A_TREF] = tr + self.par[C.P_DTMAX]
        C._integrate(self.par, self.acc, self.t, t)
        self.t = t

    # -- Radon-Nikodym -----------------------------------------------------------
    def log_rnd(self) -> float:
        """``(1/N) log D`` accumulated up to the current time."""
        if self.par[C.P_HAS_BIAS] == 0.0:
            return 0.0
        ph = C.phi(self.par, self.t)
        return (ph * self.acc[C.A_SG] - self.phi0 * self.sg0 - self.acc[C.A_INTDT]
                - self.acc[C.A_INTG] / self.N)

    def log_tilt_sum(self) -> float:
        return float(self.acc[C.A_LOGTILT])

    def generator_action(self) -> float:
        """Current ``N^2 sum rate (tilt - 1)`` from the maintained catalog."""
        return self.N**2 * float(self.acc[C.A_GSUM])

    # -- catalog ------------------------------------------------------------------
    def live_slots(self) -> np.ndarray:
        return np.flatnonzero(self.base > 0.0)

    def decode_slot(self, s: int) -> Move:
        code, a, b, c = C.describe_slot(self.G, self.ext, int(s))
        return decode_event(int(code), int(a), int(b), int(c))

    def rate_of(self, move: Move) -> float:
        """Current tilted rate of ``move``; 0 when it is not legal."""
        s = C.slot_of_event(self.G, self.ext, *encode_move(move))
        return 0.0 if s < 0 else float(self.w[s])

    def apply_move(self, move: Move) -> None:
        """Apply ``move`` at the current time."""
        self.apply_event(self.t, *encode_move(move))

    def catalog(self) -> "RateCatalog":
        entries = [(self.decode_slot(s), float(self.w[s])) for s in self.live_slots()]
        base = [float(self.base[s]) for s in self.live_slots()]
        return RateCatalog(entries, base, self.N)

    def check_consistency(self) -> tuple[bool, str]:
        """Compare the incremental catalog with a full re-enumeration."""
        base, w, dsn = self.base.copy(), self.w.copy(), self.dsn.copy()
        tree = np.zeros_like(self.tree)
        acc = self.acc.copy()
        pgeo = self.pgeo.copy()
        ph = C.phi(self.par, self.t)
        C.rebuild_all(self.G, self.ext, self.par, self.bumps, tree, base, w, dsn, acc, pgeo, ph)
        if not np.array_equal(base, self.base):
            bad = np.flatnonzero(base != self.base)
            return False, f"base rates differ at slots {bad[:8].tolist()}"
        if self.par[C.P_TKIND] == 0.0 and not np.array_equal(w, self.w):
            bad = np.flatnonzero(w != self.w)
            return False, f"tilted rates differ at slots {bad[:8].tolist()}"
        tot = self.tree_total()
        if not math.isclose(tot, float(w.sum()), rel_tol=1e-9, abs_tol=1e-12):
            return False, f"tree total {tot} != {w.sum()}"
        return True, "ok"

    def tree_total(self) -> float:
        return float(C.fw_prefix(self.tree, len(self.base)))


# -- catalog objects ---------------------------------------------------------------

@dataclass
class RateCatalog:
    entries: list[tuple[Move, float]]
    base_rates: list[float]
    N: int
    _sampler: FenwickSampler | None = field(default=None, repr=False)

    @property
    def total_rate(self) -> float:
        return float(sum(r for _, r in self.entries))

    def rate_of(self, move: Move) -> float:
        for m, r in self.entries:
            if m == move:
                return r
        return 0.0

    def as_dict(self) -> dict[Move, float]:
        return dict(self.entries)

    @property
    def sampler(self) -> FenwickSampler:
        if self._sampler is None:
            s: FenwickSampler = FenwickSampler(max(16, len(self.entries)))
            for m, r in self.entries:
                s.set(m, r)
            self._sampler = s
        return self._sampler

    def __len__(self) -> int:
        return len(self.entries)


def decode_event(code: int, a: int, b: int, c: int) -> Move:
    if code == C.EV_FLIP:
        return CornerFlip((a, b), c)
    if code == C.EV_PDEL:
        return PoleDelete(a)
    return PoleGrow(a, (b, c))


def encode_move(move: Move) -> tuple[int, int, int, int]:
    if isinstance(move, CornerFlip):
        return C.EV_FLIP, move.vertex[0], move.vertex[1], move.sign
    if isinstance(move, PoleDelete):
        return C.EV_PDEL, move.k, 0, 0
    return C.EV_PGROW, move.k, move.vertex[0], move.vertex[1]


def _catalog_engine(curve: LatticeCurve, beta: float, bias: BiasField | None, t: float) -> Engine:
    cfg = SimConfig(N=curve.N, beta=beta, horizon_T=0.0, bias=bias, record_events=False)
    return Engine(curve, cfg, margin=4, t0=t, rng=np.random.Generator(np.random.Philox(0)))


def enumerate_catalog(curve: LatticeCurve, beta: float, bias: BiasField | None = None,
                      t: float = 0.0) -> RateCatalog:
    """Every legal move with its (tilted) rate."""
    return _catalog_engine(curve, beta, bias, t).catalog()


def move_blocks(curve: LatticeCurve, move: Move) -> tuple[list[tuple[int, int]], int]:
    """Blocks toggled by ``move`` and +1 (added) or -1 (removed)."""
    if isinstance(move, CornerFlip):
        b, sign = curve.flip_block(move.vertex)
        if sign != move.sign:
            raise IllegalMove("flip sign does not match corner type")
        return [b], sign
    c = curve.canonical()
    first, p = c.pole_positions()[move.k]
    d = STEP[POLE_DIR[move.k]]
    inward = STEP[RIGHT_TURN[POLE_DIR[move.k]]]
    v = c.vertices
    if isinstance(move, PoleDelete):
        if p != 2:
            raise IllegalMove("pole deletion needs p = 2")
        pts = [v[first], v[(first + 1) % len(c)], v[(first + 2) % len(c)]]
        sign = -1
    else:
        x = move.vertex
        pts = [(x[0] - d[0], x[1] - d[1]), x, (x[0] + d[0], x[1] + d[1])]
        sign = +1
    # block between consecutive pole points on the inward (delete) or outward (grow) side
    side = inward if sign < 0 else (-inward[0], -inward[1])
    blocks = []
    for a, b in zip(pts[:-1], pts[1:]):
        cx2 = a[0] + b[0] + side[0]
        cy2 = a[1] + b[1] + side[1]
        blocks.append(((cx2 - 1) // 2, (cy2 - 1) // 2))
    return blocks, sign


def tilt_factor(curve: LatticeCurve, move: Move, bias: BiasField | None, t: float = 0.0,
                quadrature: str = "midpoint") -> float:
    """``exp(N * (<Gamma', H_t> - <Gamma, H_t>))`` for the move."""
    if bias is None or bias.is_zero:
        return 1.0
    blocks, sign = move_blocks(curve, move)
    dv = sign * sum(bias.block_integral(t, i, j, curve.N, quadrature) for i, j in blocks)
    return math.exp(curve.N * dv)


def generator_action(curve: LatticeCurve, bias: BiasField | None, beta: float,
                     t: float = 0.0) -> float:
    """``sum_moves N^2 rate (tilt - 1)`` by enumeration."""
    if bias is None or bias.is_zero:
        return 0.0
    cat = enumerate_catalog(curve, beta, bias, t)
    N2 = curve.N**2
    return float(sum(N2 * (w - b) for (_, w), b in zip(cat.entries, cat.base_rates)))


def step(curve: LatticeCurve, catalog: RateCatalog, rng: np.random.Generator) -> tuple[Move, float]:
    """Draw the next move and its diffusive waiting time."""
    total = catalog.total_rate
    if not total > 0.0:
        raise Extinct("no legal move")
    u1, u2 = rng.random(2)
    dt = -math.log1p(-u1) / (total * curve.N**2)
    return catalog.sampler.sample(u2), dt


# -- runs ---------------------------------------------------------------------------

class Observer(Protocol):
    names: tuple[str, ...]

    def __call__(self, curve: LatticeCurve, t: float) -> Sequence[float]: ...


@dataclass
class TrajectoryRecord:
    config: SimConfig
    initial: LatticeCurve
    t_initial: float
    event_t: np.ndarray
    event_code: np.ndarray
    event_val: np.ndarray
    snapshots: list[tuple[float, LatticeCurve]]
    samples: dict[str, tuple[np.ndarray, np.ndarray]]
    status: str
    t_final: float
    n_events: int
    log_rnd: float
    log_tilt_sum: float
    final_area_blocks: int

    @property
    def final(self) -> LatticeCurve:
        return self.snapshots[-1][1]

    def events(self) -> list[tuple[float, Move]]:
        return [(float(t), decode_event(int(c), *map(int, v)))
                for t, c, v in zip(self.event_t, self.event_code, self.event_val)]


def _grid(cadence: float | None, T: float) -> list[float]:
    if cadence is None or T <= 0:
        return []
    n = int(math.floor(T / cadence + 1e-9))
    return [k * cadence for k in range(1, n + 1)]


def run(config: SimConfig, initial: LatticeCurve,
        observers: Iterable[Observer] = (), *, engine: Engine | None = None) -> TrajectoryRecord:
    """Simulate up to the horizon, extinction, or the optional guards."""
    observers = list(observers)
    eng = engine if engine is not None else Engine(initial, config)
    T = config.horizon_T
    snap_times = set(_grid(config.snapshot_cadence, T))
    obs_times = set(_grid(config.observable_cadence, T))
    stops = sorted(snap_times | obs_times | {T})
    names = [n for ob in observers for n in ob.names]
    ts: list[float] = []
    vals: list[list[float]] = []

    def observe(t: float, cur: LatticeCurve) -> None:
        ts.append(t)
        row: list[float] = []
        for ob in observers:
            row.extend(float(v) for v in ob(cur, t))
        vals.append(row)

    cur0 = eng.curve()
    snaps = [(eng.t, cur0)]
    if observers:
        observe(eng.t, cur0)
    if T > 0:
        for ts_stop in stops:
            st = eng.advance(ts_stop)
            need_snap = ts_stop in snap_times or ts_stop == T or eng.terminal
            need_obs = (ts_stop in obs_times or ts_stop == T or eng.terminal) and observers
            if need_snap or need_obs:
                cur = eng.curve()
                if need_snap:
                    snaps.append((eng.t, cur))
                if need_obs:
                    observe(eng.t, cur)
            if eng.terminal:
                break
    ev_t, ev_c, ev_v = eng.events()
    arr = np.array(vals) if vals else np.zeros((0, len(names)))
    tarr = np.array(ts)
    samples = {n: (tarr, arr[:, q]) for q, n in enumerate(names)}
    return TrajectoryRecord(
        config=config, initial=initial.canonical(), t_initial=snaps[0][0], event_t=ev_t,
        event_code=ev_c, event_val=ev_v, snapshots=snaps, samples=samples,
        status=STATUS_NAMES.get(eng.status, "horizon"), t_final=eng.t,
        n_events=eng.n_events, log_rnd=eng.log_rnd(), log_tilt_sum=eng.log_tilt_sum(),
        final_area_blocks=eng.area_blocks)


def replay(initial: LatticeCurve, config: SimConfig, event_t: np.ndarray, event_code: np.ndarray,
           event_val: np.ndarray, t_end: float | None = None) -> Engine:
    """Re-apply logged events from ``initial``; the RND integrals are re-accumulated."""
    eng = Engine(initial, replace(config, record_events=False))
    for t, c, v in zip(event_t, event_code, event_val):
        eng.apply_event(float(t), int(c), int(v[0]), int(v[1]), int(v[2]))
    if t_end is not None and t_end > eng.t:
        eng._integrate_to(float(t_end))
    return eng


def log_rnd(record: TrajectoryRecord) -> float:
    """``(1/N) log D`` recomputed from the event log of ``record``."""
    if record.config.record_events is False:
        raise ValueError("record has no event log")
    eng = replay(record.initial, record.config, record.event_t, record.event_code,
                 record.event_val, record.t_final)
    return eng.log_rnd()


# -- event log text -----------------------------------------------------------------

def fmt_t(t: float) -> str:
    return format(float(t), ".17g")


def format_event(t: float, code: int, a: int, b: int, c: int) -> str:
    if code == C.EV_FLIP:
        return f"t={fmt_t(t)} FLIP {a} {b} {'+' if c > 0 else '-'}"
    if code == C.EV_PDEL:
        return f"t={fmt_t(t)} PDEL {a}"
    return f"t={fmt_t(t)} PGROW {a} {b} {c}"


def parse_event(line: str) -> tuple[float, int, int, int, int]:
    parts = line.split()
    if not parts or not parts[0].startswith("t="):
        raise ValueError(f"bad event line {line!r}")
    t = float(parts[0][2:])
    kind = parts[1] if len(parts) > 1 else ""
    if kind == "FLIP" and len(parts) == 5 and parts[4] in "+-":
        return t, C.EV_FLIP, int(parts[2]), int(parts[3]), 1 if parts[4] == "+" else -1
    if kind == "PDEL" and len(parts) == 3:
        return t, C.EV_PDEL, int(parts[2]), 0, 0
    if kind == "PGROW" and len(parts) == 5:
        return t, C.EV_PGROW, int(parts[2]), int(parts[3]), int(parts[4])
    raise ValueError(f"bad event line {line!r}")


def write_events(path, event_t, event_code, event_val, t_end: float | None = None) -> None:
    """One event per line; an optional ``t=<t> END`` line records the horizon reached."""
    with open(path, "w", newline="\n") as fh:
        for t, c, v in zip(event_t, event_code, event_val):
            fh.write(format_event(t, int(c), int(v[0]), int(v[1]), int(v[2])) + "\n")
        if t_end is not None:
            fh.write(f"t={fmt_t(t_end)} END\n")


def _is_end(line: str) -> bool:
    parts = line.split()
    return len(parts) == 2 and parts[1] == "END" and parts[0].startswith("t=")


def event_log_end(path) -> float | None:
    """Horizon recorded by :func:`write_events`, if any."""
    end = None
    with open(path) as fh:
        for line in fh:
            if _is_end(line):
                end = float(line.split()[0][2:])
    return end


def read_events(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    ts, cs, vs = [], [], []
    with open(path) as fh:
        for line in fh:
            if line.strip() and not _is_end(line):
                t, c, a, b, d = parse_event(line)
                ts.append(t)
                cs.append(c)
                vs.append((a, b, d))
    return (np.array(ts, dtype=float), np.array(cs, dtype=np.int64),
            np.array(vs, dtype=np.int64).reshape(-1, 3))
