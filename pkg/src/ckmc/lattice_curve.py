"""Lattice Jordan curves on the rescaled square lattice.

A curve is stored as an anchor vertex plus a clockwise string over ``RDLU``.
Coordinates are integers in units of ``1/N``.  Block ``(i, j)`` is the unit
square ``[i, i+1] x [j, j+1]`` (in lattice units); the droplet is the union of
the blocks enclosed by the curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

STEP = {"R": (1, 0), "D": (0, -1), "L": (-1, 0), "U": (0, 1)}
# clockwise successor of each direction (a right turn)
RIGHT_TURN = {"R": "D", "D": "L", "L": "U", "U": "R"}
REGION_ALPHABET = {1: "RD", 2: "DL", 3: "LU", 4: "UR"}
# direction travelled along pole k
POLE_DIR = {1: "R", 2: "D", 3: "L", 4: "U"}

Vertex = tuple[int, int]


class CurveError(ValueError):
    """Raised for malformed input or a construction that cannot be made valid."""


class IllegalMove(ValueError):
    """Raised when a move is not legal on the given curve."""


@dataclass(frozen=True)
class CornerFlip:
    vertex: Vertex
    sign: int  # +1 adds a block, -1 removes one


@dataclass(frozen=True)
class PoleDelete:
    k: int


@dataclass(frozen=True)
class PoleGrow:
    k: int
    vertex: Vertex


Move = CornerFlip | PoleDelete | PoleGrow


@dataclass(frozen=True)
class PoleDescriptor:
    k: int
    L: Vertex
    R: Vertex
    p: int


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else "; ".join(self.violations)


def _walk(anchor: Vertex, edges: str) -> list[Vertex]:
    x, y = anchor
    out = [(x, y)]
    for c in edges[:-1]:
        dx, dy = STEP[c]
        x += dx
        y += dy
        out.append((x, y))
    return out


class LatticeCurve:
    """A closed lattice path with an occupancy index ``vertex -> position``.

    The vertex at position ``i`` is the start of edge ``i``.  Moves are applied
    in place with :meth:`apply`; :func:`apply_move` returns a new curve.
    """

    def __init__(self, N: int, anchor: Vertex, edges: str | Sequence[str]):
        if N < 1:
            raise CurveError("N must be positive")
        edges = "".join(edges)
        bad = set(edges) - set(STEP)
        if bad:
            raise CurveError(f"unknown direction symbols {sorted(bad)}")
        if not edges:
            raise CurveError("empty edge sequence")
        self.N = int(N)
        self._edges = list(edges)
        self._verts = _walk((int(anchor[0]), int(anchor[1])), edges)
        self._occ: dict[Vertex, int] = {}
        self._simple = True
        for i, v in enumerate(self._verts):
            if v in self._occ:
                self._simple = False
            self._occ.setdefault(v, i)

    # -- basic accessors -------------------------------------------------
    @property
    def anchor(self) -> Vertex:
        return self._verts[0]

    @property
    def edges(self) -> str:
        return "".join(self._edges)

    @property
    def vertices(self) -> list[Vertex]:
        return list(self._verts)

    @property
    def occupancy(self) -> dict[Vertex, int]:
        return self._occ

    def __len__(self) -> int:
        return len(self._edges)

    def copy(self) -> "LatticeCurve":
        return LatticeCurve(self.N, self.anchor, self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticeCurve):
            return NotImplemented
        if self.N != other.N or len(self) != len(other):
            return False
        a, b = self.canonical(), other.canonical()
        return a.anchor == b.anchor and a.edges == b.edges

    def __hash__(self) -> int:
        c = self.canonical()
        return hash((c.N, c.anchor, c.edges))

    def __repr__(self) -> str:
        return f"LatticeCurve(N={self.N}, anchor={self.anchor}, n_edges={len(self)})"

    @property
    def length(self) -> float:
        """1-norm length, in macroscopic units."""
        return len(self._edges) / self.N

    def signed_area2(self) -> int:
        """Twice the signed lattice area (negative for clockwise curves)."""
        s = 0
        vs = self._verts
        n = len(vs)
        for i in range(n):
            x0, y0 = vs[i]
            x1, y1 = vs[(i + 1) % n]
            s += x0 * y1 - x1 * y0
        return s

    @property
    def area_blocks(self) -> int:
        return abs(self.signed_area2()) // 2

    @property
    def area(self) -> float:
        return self.area_blocks / self.N**2

    # -- structure -------------------------------------------------------
    def rows(self) -> dict[int, tuple[int, int]]:
        """Row intervals ``j -> (lo, hi)`` of the droplet's blocks.

        Valid only for curves satisfying the monotone-region property.
        """
        lo: dict[int, int] = {}
        hi: dict[int, int] = {}
        for (x, y), c in zip(self._verts, self._edges):
            if c == "U":
                lo[y] = x
            elif c == "D":
                hi[y - 1] = x - 1
        return {j: (lo[j], hi[j]) for j in sorted(lo)}

    def columns(self) -> dict[int, tuple[int, int]]:
        lo: dict[int, int] = {}
        hi: dict[int, int] = {}
        for (x, y), c in zip(self._verts, self._edges):
            if c == "R":
                hi[x] = y - 1
            elif c == "L":
                lo[x - 1] = y
        return {i: (lo[i], hi[i]) for i in sorted(lo)}

    def blocks(self) -> set[tuple[int, int]]:
        return {(i, j) for j, (a, b) in self.rows().items() for i in range(a, b + 1)}

    def contains_block(self, i: int, j: int) -> bool:
        r = self.rows().get(j)
        return r is not None and r[0] <= i <= r[1]

    def pole_positions(self) -> dict[int, tuple[int, int]]:
        """Edge-index ranges ``k -> (first, count)`` of the four poles."""
        xs = [v[0] for v in self._verts]
        ys = [v[1] for v in self._verts]
        ext = {1: (ys, max(ys)), 2: (xs, max(xs)), 3: (ys, min(ys)), 4: (xs, min(xs))}
        n = len(self._edges)
        out = {}
        for k, (coord, z) in ext.items():
            d = POLE_DIR[k]
            # pole edges run parallel to the extremal line, so both ends sit on it
            idx = [i for i, (e, c) in enumerate(zip(self._edges, coord)) if c == z and e == d]
            if not idx:
                out[k] = (0, 0)
                continue
            # first pole edge is the one whose predecessor is not a pole edge
            s = set(idx)
            first = next(i for i in idx if (i - 1) % n not in s)
            out[k] = (first, len(idx))
        return out

    def canonical(self) -> "LatticeCurve":
        """Same curve re-anchored at the left end of the north pole."""
        ys = [v[1] for v in self._verts]
        top = max(ys)
        n = len(self._edges)
        best = None
        for i, (x, y) in enumerate(self._verts):
            if y == top and self._edges[i] == "R" and self._edges[i - 1] != "R":
                if best is None or x < self._verts[best][0]:
                    best = i
        if best is None or best == 0:
            return self if best == 0 else self.copy()
        e = self.edges
        return LatticeCurve(self.N, self._verts[best], e[best:] + e[:best])

    # -- moves -----------------------------------------------------------
    def flip_block(self, vertex: Vertex) -> tuple[tuple[int, int], int]:
        """Block toggled by a corner flip at ``vertex`` and the flip sign."""
        i = self._occ.get(tuple(vertex))
        if i is None:
            raise IllegalMove(f"vertex {vertex} not on curve")
        e_in, e_out = self._edges[i - 1], self._edges[i]
        if e_in == e_out or STEP[e_in] == tuple(-c for c in STEP[e_out]):
            raise IllegalMove("incident edges are not perpendicular")
        x, y = vertex
        di, do = STEP[e_in], STEP[e_out]
        # block center = x + (e_out - e_in)/2, lower-left corner in integer units
        cx2 = 2 * x + do[0] - di[0]
        cy2 = 2 * y + do[1] - di[1]
        block = ((cx2 - 1) // 2, (cy2 - 1) // 2)
        sign = -1 if RIGHT_TURN[e_in] == e_out else +1
        return block, sign

    def apply(self, move: Move, *, check: bool = True) -> "LatticeCurve":
        """Apply ``move`` in place; raises :class:`IllegalMove` on failure."""
        if isinstance(move, CornerFlip):
            self._apply_flip(move, check)
        elif isinstance(move, PoleDelete):
            self._apply_pole_delete(move, check)
        elif isinstance(move, PoleGrow):
            self._apply_pole_grow(move, check)
        else:
            raise TypeError(f"not a move: {move!r}")
        return self

    def _apply_flip(self, move: CornerFlip, check: bool) -> None:
        _, sign = self.flip_block(move.vertex)
        if sign != move.sign:
            raise IllegalMove(f"flip sign {move.sign} does not match corner type")
        i = self._occ[tuple(move.vertex)]
        e_in, e_out = self._edges[i - 1], self._edges[i]
        x, y = move.vertex
        dx_in, dy_in = STEP[e_in]
        dx_out, dy_out = STEP[e_out]
        new_v = (x - dx_in + dx_out, y - dy_in + dy_out)
        if new_v in self._occ:
            raise IllegalMove("flip would make the curve non simple")
        old = (self._edges[:], self._verts[i])
        self._edges[i - 1], self._edges[i] = e_out, e_in
        del self._occ[self._verts[i]]
        self._verts[i] = new_v
        self._occ[new_v] = i
        if check:
            rep = validate(self)
            if not rep.ok:
                self._edges = old[0]
                del self._occ[new_v]
                self._verts[i] = old[1]
                self._occ[old[1]] = i
                raise IllegalMove(str(rep))

    def _rotated_at_pole(self, k: int) -> tuple[Vertex, list[str], int]:
        first, p = self.pole_positions()[k]
        e = self.edges
        return self._verts[first], list(e[first:] + e[:first]), p

    def _replace(self, anchor: Vertex, seq: list[str], check: bool) -> None:
        backup = (self.anchor, self.edges)
        self.__init__(self.N, anchor, "".join(seq))
        if check:
            rep = validate(self)
            if not rep.ok:
                self.__init__(self.N, *backup)
                raise IllegalMove(str(rep))
        can = self.canonical()
        if can is not self:
            self.__init__(self.N, can.anchor, can.edges)

    def _apply_pole_delete(self, move: PoleDelete, check: bool) -> None:
        v0, seq, p = self._rotated_at_pole(move.k)
        if p != 2:
            raise IllegalMove(f"pole {move.k} has {p} edges, deletion needs 2")
        d_in = STEP[seq[-1]]
        anchor = (v0[0] - d_in[0], v0[1] - d_in[1])
        self._replace(anchor, seq[0:2] + seq[3:-1], check)

    def _apply_pole_grow(self, move: PoleGrow, check: bool) -> None:
        v0, seq, p = self._rotated_at_pole(move.k)
        x = tuple(move.vertex)
        d = STEP[POLE_DIR[move.k]]
        m = next((m for m in range(1, p) if (v0[0] + m * d[0], v0[1] + m * d[1]) == x), None)
        if m is None:
            raise IllegalMove(f"{x} is not an interior point of pole {move.k}")
        out = RIGHT_TURN[RIGHT_TURN[RIGHT_TURN[POLE_DIR[move.k]]]]
        back = RIGHT_TURN[POLE_DIR[move.k]]
        self._replace(v0, seq[:m - 1] + [out] + seq[m - 1:m + 1] + [back] + seq[m + 1:], check)

    def inverse(self, move: Move) -> Move:
        """The move undoing ``move`` on the curve obtained after applying it.

        Must be called on the curve *before* applying ``move``.
        """
        if isinstance(move, CornerFlip):
            i = self._occ[tuple(move.vertex)]
            e_in, e_out = self._edges[i - 1], self._edges[i]
            x, y = move.vertex
            d_in, d_out = STEP[e_in], STEP[e_out]
            return CornerFlip((x - d_in[0] + d_out[0], y - d_in[1] + d_out[1]), -move.sign)
        if isinstance(move, PoleGrow):
            return PoleDelete(move.k)
        if isinstance(move, PoleDelete):
            c = self.canonical()
            first, p = c.pole_positions()[move.k]
            x = c._verts[(first + 1) % len(c)]
            d = POLE_DIR[move.k]
            inward = RIGHT_TURN[d]
            s = STEP[inward]
            return PoleGrow(move.k, (x[0] + s[0], x[1] + s[1]))
        raise TypeError(move)


def apply_move(curve: LatticeCurve, move: Move) -> LatticeCurve:
    """Return a new curve with ``move`` applied."""
    return curve.copy().apply(move)


# -- validation --------------------------------------------------------------

def _monotone_split(edges: str, start: int) -> bool:
    n = len(edges)
    i = 0
    for k in (1, 2, 3, 4):
        alpha = REGION_ALPHABET[k]
        while i < n and edges[(start + i) % n] in alpha:
            i += 1
    return i == n


def validate(curve: LatticeCurve) -> ValidationReport:
    rep = ValidationReport()
    e = curve.edges
    dx = sum(STEP[c][0] for c in e)
    dy = sum(STEP[c][1] for c in e)
    if dx or dy:
        rep.violations.append("not closed")
        return rep
    if not curve._simple:
        rep.violations.append("not simple")
        return rep
    if curve.signed_area2() >= 0:
        rep.violations.append("not clockwise")
        return rep
    ys = [v[1] for v in curve._verts]
    top = max(ys)
    starts = [i for i, (x, y) in enumerate(curve._verts)
              if y == top and e[i] == "R" and e[i - 1] != "R"]
    if len(starts) != 1 or not _monotone_split(e, starts[0]):
        rep.violations.append("monotone regions (property 1) fail")
        return rep
    for k, (_, p) in curve.pole_positions().items():
        if p < 2:
            rep.violations.append(f"pole {k} < 2 edges (p={p})")
    rows = curve.rows()
    inside = any(r is not None and r[0] <= i <= r[1]
                 for i, j in ((-1, -1), (0, -1), (-1, 0), (0, 0))
                 for r in (rows.get(j),))
    if not inside:
        rep.violations.append("droplet does not contain the origin")
    return rep


# -- poles -------------------------------------------------------------------

def pole_table(curve: LatticeCurve, pos: dict[int, tuple[int, int]] | None = None
               ) -> tuple[list[PoleDescriptor], dict[str, tuple[float, ...]]]:
    """Poles in order k=1..4 and extremal coordinates ``z`` and ``w``.

    ``z_k`` is the extremal ordinate (k odd) or abscissa (k even) and ``w_k``
    the transverse coordinate of ``L_k``, both in macroscopic units.
    """
    pos = curve.pole_positions() if pos is None else pos
    n = len(curve)
    vs = curve._verts
    poles = []
    for k in (1, 2, 3, 4):
        first, p = pos[k]
        poles.append(PoleDescriptor(k, vs[first], vs[(first + p) % n], p))
    N = curve.N
    z = (poles[0].L[1] / N, poles[1].L[0] / N, poles[2].L[1] / N, poles[3].L[0] / N)
    w = (poles[0].L[0] / N, poles[1].L[1] / N, poles[2].L[0] / N, poles[3].L[1] / N)
    return poles, {"z": z, "w": w}


def stationary_log_weight(curve: LatticeCurve, beta: float) -> float:
    return -beta * len(curve)


# -- constructors ------------------------------------------------------------

def curve_from_rows(N: int, rows: dict[int, tuple[int, int]]) -> LatticeCurve:
    """Boundary of an HV-convex polyomino given by its row intervals."""
    js = sorted(rows)
    if not js or js != list(range(js[0], js[-1] + 1)):
        raise CurveError("rows must be a nonempty contiguous range")
    top, bot = js[-1], js[0]
    out: list[str] = []
    lo, hi = rows[top]
    out.append("R" * (hi - lo + 1))
    for j in range(top, bot - 1, -1):
        out.append("D")
        if j > bot:
            h2 = rows[j - 1][1]
            out.append("R" * (h2 - rows[j][1]) if h2 > rows[j][1] else "L" * (rows[j][1] - h2))
    out.append("L" * (rows[bot][1] - rows[bot][0] + 1))
    for j in range(bot, top + 1):
        out.append("U")
        if j < top:
            l2 = rows[j + 1][0]
            out.append("L" * (rows[j][0] - l2) if l2 < rows[j][0] else "R" * (l2 - rows[j][0]))
    return LatticeCurve(N, (lo, top + 1), "".join(out))


def build_rectangle(N: int, width_blocks: int, height_blocks: int,
                    center: Vertex = (0, 0)) -> LatticeCurve:
    """Rectangle of ``width_blocks x height_blocks`` blocks around a lattice point.

    The lower-left corner is ``center - (width // 2, height // 2)``, so even
    sizes are centred exactly.
    """
    if width_blocks < 2 or height_blocks < 2:
        raise CurveError("rectangle needs at least 2 blocks per side")
    x0 = int(center[0]) - width_blocks // 2
    y0 = int(center[1]) - height_blocks // 2
    if not (x0 < 0 < x0 + width_blocks and y0 < 0 < y0 + height_blocks):
        raise CurveError("rectangle does not strictly contain the origin")
    rows = {j: (x0, x0 + width_blocks - 1) for j in range(y0, y0 + height_blocks)}
    return curve_from_rows(N, rows)


@dataclass(frozen=True)
class Shape:
    """Closed convex region given by a vectorised membership test."""
    contains: Callable[[np.ndarray, np.ndarray], np.ndarray]
    bbox: tuple[float, float, float, float]
    name: str = "shape"


def disk(radius: float, center: tuple[float, float] = (0.0, 0.0)) -> Shape:
    cx, cy = center
    r2 = radius * radius * (1 + 1e-12)
    return Shape(lambda x, y: (x - cx) ** 2 + (y - cy) ** 2 <= r2,
                 (cx - radius, cx + radius, cy - radius, cy + radius), f"disk({radius})")


def square(side: float, center: tuple[float, float] = (0.0, 0.0)) -> Shape:
    cx, cy = center
    h = side / 2 * (1 + 1e-12)
    return Shape(lambda x, y: (np.abs(x - cx) <= h) & (np.abs(y - cy) <= h),
                 (cx - h, cx + h, cy - h, cy + h), f"square({side})")


def diamond(radius: float, center: tuple[float, float] = (0.0, 0.0)) -> Shape:
    """1-norm ball."""
    cx, cy = center
    r = radius * (1 + 1e-12)
    return Shape(lambda x, y: np.abs(x - cx) + np.abs(y - cy) <= r,
                 (cx - r, cx + r, cy - r, cy + r), f"diamond({radius})")


def ellipse(a: float, b: float, center: tuple[float, float] = (0.0, 0.0)) -> Shape:
    cx, cy = center
    return Shape(lambda x, y: ((x - cx) / a) ** 2 + ((y - cy) / b) ** 2 <= 1 + 1e-12,
                 (cx - a, cx + a, cy - b, cy + b), f"ellipse({a},{b})")


def _hv_closure(blocks: set[tuple[int, int]]) -> set[tuple[int, int]]:
    """Smallest superset whose rows and columns are intervals."""
    blocks = set(blocks)
    changed = True
    while changed:
        changed = False
        for axis in (0, 1):
            lines: dict[int, list[int]] = {}
            for b in blocks:
                lines.setdefault(b[1 - axis], []).append(b[axis])
            for c, vals in lines.items():
                for v in range(min(vals), max(vals) + 1):
                    b = (v, c) if axis == 0 else (c, v)
                    if b not in blocks:
                        blocks.add(b)
                        changed = True
    return blocks


def _rows_of(blocks: set[tuple[int, int]]) -> dict[int, tuple[int, int]]:
    rows: dict[int, list[int]] = {}
    for i, j in blocks:
        rows.setdefault(j, []).append(i)
    return {j: (min(v), max(v)) for j, v in rows.items()}


def discretize_shape(shape: Shape, N: int) -> LatticeCurve:
    """Inner block discretization of a convex shape, poles padded to two blocks.

    A block is kept when its closed square lies in the shape.  A pole with a
    single block gets the neighbouring block beyond ``L_k`` along the pole
    line, followed by the row/column interval closure.
    """
    x0, x1, y0, y1 = shape.bbox
    i0, i1 = math.floor(x0 * N) - 1, math.ceil(x1 * N) + 1
    j0, j1 = math.floor(y0 * N) - 1, math.ceil(y1 * N) + 1
    ii, jj = np.meshgrid(np.arange(i0, i1), np.arange(j0, j1), indexing="ij")
    ok = np.ones(ii.shape, dtype=bool)
    for di in (0, 1):
        for dj in (0, 1):
            ok &= shape.contains((ii + di) / N, (jj + dj) / N)
    blocks = {(int(a), int(b)) for a, b in zip(ii[ok], jj[ok])}
    if not blocks:
        raise CurveError(f"shape holds no block at N={N}")
    # keep the connected component of rows through the origin row band
    blocks = _hv_closure(blocks)
    for _ in range(16):
        rows = _rows_of(blocks)
        jmax, jmin = max(rows), min(rows)
        cols: dict[int, list[int]] = {}
        for i, j in blocks:
            cols.setdefault(i, []).append(j)
        imax, imin = max(cols), min(cols)
        added = False
        if rows[jmax][1] == rows[jmax][0]:
            blocks.add((rows[jmax][0] - 1, jmax)); added = True
        if max(cols[imax]) == min(cols[imax]):
            blocks.add((imax, max(cols[imax]) + 1)); added = True
        if rows[jmin][1] == rows[jmin][0]:
            blocks.add((rows[jmin][1] + 1, jmin)); added = True
        if max(cols[imin]) == min(cols[imin]):
            blocks.add((imin, min(cols[imin]) - 1)); added = True
        if not added:
            break
        blocks = _hv_closure(blocks)
    curve = curve_from_rows(N, _rows_of(blocks))
    rep = validate(curve)
    if not rep.ok:
        raise CurveError(f"discretization invalid at N={N}: {rep}")
    return curve


# -- distances ---------------------------------------------------------------

def _as_blocks(c: LatticeCurve, scale: int) -> set[tuple[int, int]]:
    if scale == 1:
        return c.blocks()
    out = set()
    for i, j in c.blocks():
        for a in range(scale):
            for b in range(scale):
                out.add((i * scale + a, j * scale + b))
    return out


def _common(a: LatticeCurve, b: LatticeCurve) -> tuple[int, int, int]:
    M = math.lcm(a.N, b.N)
    return M, M // a.N, M // b.N


def l1_distance(a: LatticeCurve, b: LatticeCurve) -> float:
    """Area of the symmetric difference of the two droplets."""
    M, sa, sb = _common(a, b)
    if sa == 1 and sb == 1:
        ra, rb = a.rows(), b.rows()
        tot = 0
        for j in set(ra) | set(rb):
            ia = ra.get(j, (0, -1))
            ib = rb.get(j, (0, -1))
            la = ia[1] - ia[0] + 1
            lb = ib[1] - ib[0] + 1
            ov = max(0, min(ia[1], ib[1]) - max(ia[0], ib[0]) + 1)
            tot += la + lb - 2 * ov
        return tot / M**2
    return len(_as_blocks(a, sa) ^ _as_blocks(b, sb)) / M**2


def _directed_hausdorff(A: set[tuple[int, int]], B: set[tuple[int, int]]) -> int:
    """Sup-norm directed distance in half-lattice units between block unions."""
    from scipy.ndimage import distance_transform_cdt

    pts = A | B
    imin = min(p[0] for p in pts) - 1
    jmin = min(p[1] for p in pts) - 1
    imax = max(p[0] for p in pts) + 2
    jmax = max(p[1] for p in pts) + 2
    shape = (2 * (imax - imin) + 1, 2 * (jmax - jmin) + 1)

    def raster(S):
        g = np.zeros(shape, dtype=bool)
        for i, j in S:
            x, y = 2 * (i - imin), 2 * (j - jmin)
            g[x:x + 3, y:y + 3] = True
        return g

    gA, gB = raster(A), raster(B)
    if not gB.any():
        return 0
    d = distance_transform_cdt(~gB, metric="chessboard")
    return int(d[gA].max()) if gA.any() else 0


def hausdorff_distance(a: LatticeCurve, b: LatticeCurve) -> float:
    """Hausdorff distance between the droplets for the sup norm."""
    M, sa, sb = _common(a, b)
    A, B = _as_blocks(a, sa), _as_blocks(b, sb)
    h = max(_directed_hausdorff(A, B), _directed_hausdorff(B, A))
    return h / (2 * M)


# -- persistence -------------------------------------------------------------

MAGIC = "CKMC1"


def fmt_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def to_snapshot(curve: LatticeCurve, beta: float, t: float) -> str:
    c = curve.canonical()
    return (f"{MAGIC} N={c.N} beta={fmt_float(beta)} t={fmt_float(t)}\n"
            f"anchor {c.anchor[0]} {c.anchor[1]}\n{c.edges}\n")


def from_snapshot(text: str) -> tuple[LatticeCurve, float, float]:
    lines = text.strip("\n").split("\n")
    if len(lines) != 3:
        raise CurveError("snapshot must have exactly three lines")
    head = lines[0].split()
    if not head or head[0] != MAGIC:
        raise CurveError("bad snapshot magic")
    kv = dict(tok.split("=", 1) for tok in head[1:])
    try:
        N, beta, t = int(kv["N"]), float(kv["beta"]), float(kv["t"])
    except (KeyError, ValueError) as exc:
        raise CurveError(f"bad snapshot header: {lines[0]!r}") from exc
    a = lines[1].split()
    if len(a) != 3 or a[0] != "anchor":
        raise CurveError("bad anchor line")
    return LatticeCurve(N, (int(a[1]), int(a[2])), lines[2].strip()), beta, t


def write_snapshot(path, curve: LatticeCurve, beta: float, t: float) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(to_snapshot(curve, beta, t))


def read_snapshot(path) -> tuple[LatticeCurve, float, float]:
    with open(path) as fh:
        return from_snapshot(fh.read())


__all__ = [
    "LatticeCurve", "CornerFlip", "PoleDelete", "PoleGrow", "Move", "PoleDescriptor",
    "ValidationReport", "CurveError", "IllegalMove", "apply_move", "validate",
    "pole_table", "build_rectangle", "discretize_shape", "curve_from_rows",
    "disk", "square", "diamond", "ellipse", "Shape", "l1_distance",
    "hausdorff_distance", "stationary_log_weight", "to_snapshot", "from_snapshot",
    "write_snapshot", "read_snapshot", "fmt_float",
]
