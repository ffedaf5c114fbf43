"""Pole slopes, pole sizes, volumes and widths beneath poles, and time series."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .lattice_curve import LatticeCurve, STEP, pole_table

_CODE = {"R": 0, "D": 1, "L": 2, "U": 3}
_VEC = np.array([(1, 0), (0, -1), (-1, 0), (0, 1)], dtype=np.int64)
# sign vectors m of the four regions
REGION_M = {1: (-1.0, -1.0), 2: (-1.0, 1.0), 3: (1.0, 1.0), 4: (1.0, -1.0)}


class WindowError(ValueError):
    pass


class CurveView:
    """Array view of a curve anchored at ``L_1``: index 0 is ``L_1``."""

    def __init__(self, curve: LatticeCurve):
        c = curve.canonical()
        self.curve = c
        self.N = c.N
        self.codes = np.fromiter((_CODE[ch] for ch in c.edges), dtype=np.int8, count=len(c))
        steps = _VEC[self.codes]
        self.n = len(self.codes)
        v = np.empty((self.n + 1, 2), dtype=np.int64)
        v[0] = c.anchor
        np.cumsum(steps, axis=0, out=v[1:])
        v[1:] += v[0]
        self.verts_closed = v  # verts_closed[n] == verts_closed[0]
        self.xi = (self.codes % 2).astype(np.int8)  # 1 for vertical edges
        pos = c.pole_positions()
        poles, ext = pole_table(c, pos)
        self.poles = poles
        self.z = ext["z"]
        self.w = ext["w"]
        self.L_idx = [pos[k][0] for k in (1, 2, 3, 4)]
        self.R_idx = [(pos[k][0] + pos[k][1]) % self.n for k in (1, 2, 3, 4)]

    @property
    def verts(self) -> np.ndarray:
        return self.verts_closed[:-1]

    def index(self, x) -> int:
        m = np.flatnonzero((self.verts[:, 0] == x[0]) & (self.verts[:, 1] == x[1]))
        if not len(m):
            raise ValueError(f"{x} is not a vertex of the curve")
        return int(m[0])

    def region_span(self, k: int) -> tuple[int, int]:
        """Vertex indices (R_k, L_{k+1}) bounding region k, unwrapped so start <= end."""
        a = self.R_idx[k - 1]
        b = self.L_idx[k % 4]
        if b < a:
            b += self.n
        return a, b

    @cached_property
    def rows(self) -> dict[int, tuple[int, int]]:
        return self.curve.rows()


def _view(curve) -> CurveView:
    return curve if isinstance(curve, CurveView) else CurveView(curve)


# -- slopes --------------------------------------------------------------------

def local_slope(curve, x, ell: int, side: int = +1) -> float:
    """Mean of the vertical-edge indicator over ``x`` and the next (or previous) ``ell`` vertices."""
    cv = _view(curve)
    if ell < 0 or ell + 1 > cv.n:
        raise WindowError("window exceeds curve length")
    i = cv.index(x)
    if side > 0:
        ids = (i + np.arange(ell + 1)) % cv.n
    else:
        ids = (i - np.arange(ell + 1)) % cv.n
    return float(cv.xi[ids].mean())


def pole_slope(curve, k: int, ell: int, side: int = +1) -> float:
    cv = _view(curve)
    return local_slope(cv, cv.poles[k - 1].L, ell, side)


def averaged_tangent(curve, x, epsilon: float) -> tuple[np.ndarray, float, np.ndarray]:
    """Tangent averaged over the 1-ball of radius ``epsilon`` around ``x``.

    Returns ``(t, v, T)`` with ``|t|_1 = 1``, ``v = |t|_2`` and ``T = t / v``.
    """
    cv = _view(curve)
    n = int(math.floor(epsilon * cv.N))
    if n < 1:
        raise WindowError("epsilon below lattice resolution")
    i = cv.index(x)
    ok, _ = _in_v_eps(cv, i, n)
    if not ok:
        raise WindowError("vertex within epsilon of a pole")
    vc = cv.verts_closed
    d = vc[(i + n + 1) % cv.n] - vc[(i - n) % cv.n]
    t = d.astype(float) / (2 * n + 1)
    v = float(np.hypot(*t))
    return t, v, t / v


def _in_v_eps(cv: CurveView, i: int, n: int) -> tuple[bool, int]:
    for k in (1, 2, 3, 4):
        a, b = cv.region_span(k)
        ii = i if i >= a else i + cv.n
        if a < ii < b:
            return (ii - a >= n and b - ii >= n + 1), k
    return False, 0


def v_eps_tangents(curve, epsilon: float) -> dict[str, np.ndarray]:
    """Averaged tangents on every vertex at 1-distance >= epsilon from the poles.

    Keys: ``idx`` (vertex indices), ``pos`` (lattice coordinates), ``t`` (n x 2),
    ``region`` (1..4) and ``m`` (the region's sign vector).
    """
    cv = _view(curve)
    n = int(math.floor(epsilon * cv.N))
    if n < 1:
        raise WindowError("epsilon below lattice resolution")
    vc = cv.verts_closed
    idx, reg = [], []
    for k in (1, 2, 3, 4):
        a, b = cv.region_span(k)
        lo, hi = a + n, b - n - 1
        if hi >= lo:
            r = np.arange(lo, hi + 1)
            idx.append(r)
            reg.append(np.full(len(r), k))
    if not idx:
        empty = np.zeros((0, 2))
        return {"idx": np.zeros(0, dtype=int), "pos": empty, "t": empty,
                "region": np.zeros(0, dtype=int), "m": empty}
    ii = np.concatenate(idx)
    rr = np.concatenate(reg)
    d = vc[(ii + n + 1) % cv.n] - vc[(ii - n) % cv.n]
    t = d.astype(float) / (2 * n + 1)
    m = np.array([REGION_M[k] for k in rr], dtype=float)
    return {"idx": ii % cv.n, "pos": vc[ii % cv.n].astype(float), "t": t, "region": rr, "m": m}


# -- poles -----------------------------------------------------------------------

def pole_size(curve, k: int) -> int:
    return _view(curve).poles[k - 1].p


def pole_indicator(curve, k: int) -> int:
    return int(pole_size(curve, k) == 2)


def xi_after_pole_start(curve, k: int = 1, steps: int = 2) -> int:
    """Vertical-edge indicator of the edge leaving ``L_k + steps`` along the pole."""
    cv = _view(curve)
    return int(cv.xi[(cv.L_idx[k - 1] + steps) % cv.n])


def _rotate_ccw(curve: LatticeCurve, times: int) -> LatticeCurve:
    rot = {"R": "U", "U": "L", "L": "D", "D": "R"}
    ax, ay = curve.anchor
    e = curve.edges
    for _ in range(times % 4):
        ax, ay = -ay, ax
        e = "".join(rot[c] for c in e)
    return LatticeCurve(curve.N, (ax, ay), e)


def rotate_to_north(curve: LatticeCurve, k: int) -> LatticeCurve:
    """Rotate so that pole ``k`` becomes the north pole."""
    return _rotate_ccw(curve.canonical() if isinstance(curve, LatticeCurve) else curve.curve,
                       k - 1)


def volume_under_pole(curve, k: int, eta: float) -> float:
    """Droplet area within distance ``eta`` of the extremal coordinate of pole ``k``."""
    c = curve.curve if isinstance(curve, CurveView) else curve
    if eta * c.N <= 1:
        raise ValueError("eta must exceed 1/N")
    rows = (c if k == 1 else rotate_to_north(c, k)).rows()
    N = c.N
    top = max(rows) + 1
    level = top - eta * N
    tot = 0.0
    for j, (lo, hi) in rows.items():
        h = min(j + 1, top) - max(j, level)
        if h > 0:
            tot += (hi - lo + 1) * h
    return tot / N**2


def volume_under_pole_walk(curve, k: int, eta: float) -> float:
    """Same quantity as :func:`volume_under_pole`, summing row widths along the boundary."""
    c = curve.curve if isinstance(curve, CurveView) else curve
    c = c if k == 1 else rotate_to_north(c, k)
    N = c.N
    cv = CurveView(c)
    top = cv.verts[:, 1].max()
    level = top - eta * N
    # right boundary: D edges of the clockwise walk, left boundary: U edges
    tot = 0.0
    for (x, y), code in zip(cv.verts, cv.codes):
        if code == 1:  # D edge from (x, y) to (x, y - 1): row y - 1 ends at x
            h = min(y, top) - max(y - 1, level)
            if h > 0:
                tot += x * h
        elif code == 3:  # U edge from (x, y) to (x, y + 1): row y starts at x
            h = min(y + 1, top) - max(y, level)
            if h > 0:
                tot -= x * h
    return tot / N**2


def width_below_pole(curve, alpha: float, side: int = +1, k: int = 1) -> float:
    """Horizontal extent of the droplet at depth ``alpha`` below pole ``k``, measured from ``L_k``."""
    c = curve.curve if isinstance(curve, CurveView) else curve
    c = c if k == 1 else rotate_to_north(c, k)
    N = c.N
    rows = c.rows()
    top = max(rows) + 1
    a = alpha * N
    if abs(a - round(a)) > 1e-9:
        raise ValueError("alpha must be a multiple of 1/N")
    Y = top - int(round(a))
    if Y < min(rows) or a < 0:
        raise ValueError("level below droplet")
    lx = rows[top - 1][0]
    spans = [rows[j] for j in (Y - 1, Y) if j in rows]
    if side > 0:
        return (max(s[1] for s in spans) + 1 - lx) / N
    return (lx - min(s[0] for s in spans)) / N


def width_below_pole_walk(curve, alpha: float, side: int = +1, k: int = 1) -> float:
    """Width by walking the boundary from ``L_k`` until the level is passed."""
    c = curve.curve if isinstance(curve, CurveView) else curve
    c = c if k == 1 else rotate_to_north(c, k)
    cv = CurveView(c)
    N = c.N
    Y = cv.verts[0, 1] - int(round(alpha * N))
    lx = cv.verts[0, 0]
    n = cv.n
    if side > 0:
        # walk clockwise through region 1; the farthest x reached on line Y
        best = None
        i = 0
        while i <= n:
            x, y = cv.verts_closed[i % n]
            if y == Y:
                best = x if best is None else max(best, x)
            if y < Y:
                break
            i += 1
        return (best - lx) / N
    best = None
    i = 0
    while i <= n:
        x, y = cv.verts_closed[(-i) % n]
        if y == Y:
            best = x if best is None else min(best, x)
        if y < Y:
            break
        i += 1
    return (lx - best) / N


# -- time series -------------------------------------------------------------------

@dataclass
class ObservableSeries:
    name: str
    t: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if len(self.t) != len(self.values):
            raise ValueError("times and values differ in length")
        if len(self.t) > 1 and np.any(np.diff(self.t) < 0):
            raise ValueError("sample times must be nondecreasing")

    def __len__(self) -> int:
        return len(self.t)

    def time_average(self, t0: float, t1: float) -> float:
        """Average of the step function holding each sample until the next one."""
        if not len(self.t):
            raise WindowError("empty series")
        if t0 < self.t[0] - 1e-12 or t1 > self.t[-1] + 1e-12 or t1 <= t0:
            raise WindowError(f"window [{t0}, {t1}] outside recorded [{self.t[0]}, {self.t[-1]}]")
        edges = np.append(self.t, np.inf)
        lo = np.clip(edges[:-1], t0, t1)
        hi = np.clip(edges[1:], t0, t1)
        return float(np.sum(self.values * (hi - lo)) / (t1 - t0))

    def window(self, t0: float, t1: float) -> "ObservableSeries":
        m = (self.t >= t0) & (self.t <= t1)
        return ObservableSeries(self.name, self.t[m], self.values[m])


def series(record, name: str) -> ObservableSeries:
    """Series ``name`` from a trajectory record."""
    if name not in record.samples:
        raise KeyError(f"unknown observable {name!r}; recorded: {sorted(record.samples)}")
    t, v = record.samples[name]
    return ObservableSeries(name, t, v)


def analysis_window(record, t0: float = 0.01, t1: float | None = None,
                    max_area_loss: float = 0.3) -> tuple[float, float]:
    """Averaging window: after burn-in, before ``max_area_loss`` of the area is gone."""
    t_end = record.t_final if t1 is None else min(t1, record.t_final)
    if "area" in record.samples:
        ts, a = record.samples["area"]
        lost = np.flatnonzero(a < (1.0 - max_area_loss) * a[0])
        if len(lost):
            t_end = min(t_end, float(ts[lost[0]]))
    if t_end <= t0:
        raise WindowError("no usable window")
    return t0, t_end


# -- observers ----------------------------------------------------------------------

def _fmt(x: float) -> str:
    return f"{x:g}"


class Observables:
    """Observer evaluating a list of named observables on each sample.

    Each spec is a tuple; supported kinds:
    ``("area",)``, ``("length",)``, ``("z", k)``, ``("w", k)``,
    ``("slope", k, side, ell)``, ``("pole_indicator", k)``, ``("pole_size", k)``,
    ``("V", k, eta)``, ``("g", side, alpha)``.
    """

    def __init__(self, specs: Sequence[tuple]):
        self.specs = [tuple(s) for s in specs]
        self.names = tuple(self.name_of(s) for s in self.specs)

    @staticmethod
    def name_of(spec: tuple) -> str:
        kind = spec[0]
        if kind in ("area", "length"):
            return kind
        if kind in ("z", "w", "pole_indicator", "pole_size"):
            return f"{kind}{spec[1]}"
        if kind == "slope":
            return f"slope{'+' if spec[2] > 0 else '-'}{spec[1]}_l{spec[3]}"
        if kind == "V":
            return f"V{spec[1]}_eta{_fmt(spec[2])}"
        if kind == "g":
            return f"g{'+' if spec[1] > 0 else '-'}_a{_fmt(spec[2])}"
        raise ValueError(f"unknown observable {spec!r}")

    @staticmethod
    def parse_name(name: str) -> tuple:
        """Inverse of :meth:`name_of`."""
        name = name.strip()
        if name in ("area", "length"):
            return (name,)
        m = re.fullmatch(r"(z|w|pole_indicator|pole_size)([1-4])", name)
        if m:
            return (m.group(1), int(m.group(2)))
        m = re.fullmatch(r"slope([+-])([1-4])_l(\d+)", name)
        if m:
            return ("slope", int(m.group(2)), 1 if m.group(1) == "+" else -1, int(m.group(3)))
        m = re.fullmatch(r"V([1-4])_eta([0-9.eE+-]+)", name)
        if m:
            return ("V", int(m.group(1)), float(m.group(2)))
        m = re.fullmatch(r"g([+-])_a([0-9.eE+-]+)", name)
        if m:
            return ("g", 1 if m.group(1) == "+" else -1, float(m.group(2)))
        raise ValueError(f"unknown observable {name!r}")

    @classmethod
    def from_names(cls, names: Sequence[str]) -> "Observables":
        return cls([cls.parse_name(n) for n in names])

    def __call__(self, curve: LatticeCurve, t: float) -> list[float]:
        cv = CurveView(curve)
        out = []
        for s in self.specs:
            kind = s[0]
            if kind == "area":
                out.append(cv.curve.area)
            elif kind == "length":
                out.append(cv.curve.length)
            elif kind == "z":
                out.append(cv.z[s[1] - 1])
            elif kind == "w":
                out.append(cv.w[s[1] - 1])
            elif kind == "slope":
                out.append(pole_slope(cv, s[1], int(s[3]), s[2]))
            elif kind == "pole_indicator":
                out.append(pole_indicator(cv, s[1]))
            elif kind == "pole_size":
                out.append(pole_size(cv, s[1]))
            elif kind == "V":
                try:
                    out.append(volume_under_pole(cv, s[1], s[2]))
                except ValueError:
                    out.append(math.nan)
            elif kind == "g":
                try:
                    # depth snapped to the lattice: floor(alpha N) rows
                    depth = math.floor(s[2] * cv.curve.N + 1e-9) / cv.curve.N
                    out.append(width_below_pole(cv, depth, s[1]))
                except ValueError:
                    out.append(math.nan)
        return out
