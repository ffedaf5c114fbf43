"""Exclusion-process reading of a curve region.

Inside region ``k`` the boundary is a monotone lattice path over the two letters of its
alphabet. One letter is read as a particle and the other as a hole. The particle is
always the step descending along the region's height profile: vertical edges in
regions 1 and 3, horizontal edges in regions 2 and 4. With this choice the particle
density next to the pole at the start of each region reads the same in all four
regions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice_curve import (
    REGION_ALPHABET, STEP, CornerFlip, IllegalMove, LatticeCurve, apply_move,
)
from .observables import CurveView

# (hole letter, particle letter) per region
_LETTERS = {1: ("R", "D"), 2: ("D", "L"), 3: ("L", "U"), 4: ("U", "R")}


class BridgeError(ValueError):
    pass


@dataclass(frozen=True)
class ParticleConfig:
    k: int
    anchor: tuple[int, int]
    eta: tuple[int, ...]

    def __post_init__(self):
        if self.k not in (1, 2, 3, 4):
            raise ValueError("region index must be 1..4")
        object.__setattr__(self, "eta", tuple(int(e) for e in self.eta))
        if any(e not in (0, 1) for e in self.eta):
            raise ValueError("occupations must be 0 or 1")

    def __len__(self) -> int:
        return len(self.eta)

    @property
    def n_particles(self) -> int:
        return sum(self.eta)

    def dump(self) -> str:
        return "".join(map(str, self.eta))


def _region_of(cv: CurveView, i: int) -> tuple[int, int, int]:
    """Region holding edge ``i`` and the (start, stop) edge span, unwrapped."""
    for k in (1, 2, 3, 4):
        a, b = cv.region_span(k)
        ii = i if i >= a else i + cv.n
        if a <= ii < b:
            return k, a, b
    raise BridgeError(f"edge {i} belongs to a pole")


def region_to_particles(curve, k: int, from_vertex, n_edges: int) -> ParticleConfig:
    cv = curve if isinstance(curve, CurveView) else CurveView(curve)
    i0 = cv.index(from_vertex)
    a, b = cv.region_span(k)
    ii = i0 if i0 >= a else i0 + cv.n
    if not (a <= ii and ii + n_edges <= b):
        raise BridgeError("window crosses a pole")
    hole, part = _LETTERS[k]
    edges = cv.curve.edges
    eta = []
    for s in range(n_edges):
        ch = edges[(ii + s) % cv.n]
        if ch not in (hole, part):
            raise BridgeError("window leaves the region")
        eta.append(int(ch == part))
    return ParticleConfig(k, tuple(map(int, from_vertex)), tuple(eta))


def region_window(curve, k: int) -> ParticleConfig:
    """The whole non-pole part of region ``k``."""
    cv = curve if isinstance(curve, CurveView) else CurveView(curve)
    a, b = cv.region_span(k)
    return region_to_particles(cv, k, tuple(cv.verts[a % cv.n]), b - a)


def particles_to_region(config: ParticleConfig) -> str:
    hole, part = _LETTERS[config.k]
    return "".join(part if e else hole for e in config.eta)


def config_vertices(config: ParticleConfig) -> list[tuple[int, int]]:
    x, y = config.anchor
    out = [(x, y)]
    for ch in particles_to_region(config):
        dx, dy = STEP[ch]
        x, y = x + dx, y + dy
        out.append((x, y))
    return out


def assert_flip_is_exchange(curve: LatticeCurve, flip: CornerFlip) -> tuple[int, int]:
    """Check a corner flip acts on its region as one nearest-neighbour exchange.

    Returns ``(i, direction)``: the particle moves from site ``i`` to ``i + direction``.
    """
    cv = CurveView(curve)
    x = cv.index(flip.vertex)
    e_in, e_out = (x - 1) % cv.n, x
    try:
        k, a, b = _region_of(cv, e_in)
        k2, _, _ = _region_of(cv, e_out)
    except BridgeError:
        raise BridgeError("flip touches a pole") from None
    if k2 != k:
        raise BridgeError("flip touches a pole")
    edges = cv.curve.edges
    if edges[e_in] == edges[e_out]:
        raise IllegalMove("no corner at this vertex: exchange rate is zero")
    new = apply_move(cv.curve, flip)
    # align the new edge string on the old anchor
    start = new.vertices.index(cv.curve.anchor)
    new_edges = new.edges[start:] + new.edges[:start]
    anchor = tuple(cv.verts[a % cv.n])
    before = region_to_particles(cv, k, anchor, b - a)
    hole, part = _LETTERS[k]
    after_seq = [new_edges[(a + s) % cv.n] for s in range(b - a)]
    if any(ch not in (hole, part) for ch in after_seq):
        raise BridgeError("flip changes the pole")
    after = tuple(int(ch == part) for ch in after_seq)
    diff = [s for s in range(b - a) if before.eta[s] != after[s]]
    if len(diff) != 2 or diff[1] != diff[0] + 1:
        raise AssertionError(f"flip is not a nearest-neighbour exchange: {diff}")
    if sum(after) != before.n_particles:
        raise AssertionError("particle number changed")
    i = diff[0]
    if before.eta[i] == 1:
        return i, +1
    return i + 1, -1


@dataclass(frozen=True)
class HeightProfile:
    """Region ``k`` as a graph: abscissa ``s`` and height ``f`` of each vertex (1/N units).

    ``rho`` holds, per edge, ``(1 + (-1)^k df/ds) / 2``.
    """

    k: int
    s: np.ndarray
    f: np.ndarray
    rho: np.ndarray

    @property
    def slope(self) -> np.ndarray:
        return np.diff(self.f) / np.diff(self.s)


def _axes(k: int) -> tuple[np.ndarray, np.ndarray]:
    th = math.pi / 4 - k * math.pi / 2
    b = np.array([math.cos(th), math.sin(th)])
    return b, np.array([-b[1], b[0]])


def height_profile(curve, k: int) -> HeightProfile:
    cv = curve if isinstance(curve, CurveView) else CurveView(curve)
    a, b = cv.region_span(k)
    ids = np.arange(a, b + 1) % cv.n
    pts = cv.verts[ids].astype(float) / cv.N
    e, eperp = _axes(k)
    s = pts @ e
    f = pts @ eperp
    # each step moves f by exactly +-1 per unit of s
    df = np.rint(np.diff(f) / np.diff(s)) if len(s) > 1 else np.zeros(0)
    rho = (1.0 + (-1) ** k * df) / 2.0
    return HeightProfile(k, s, f, rho)


def particle_density_convention(k: int) -> int:
    """+1 if the profile density equals the particle density of region ``k``, -1 if it is the hole density."""
    return 1 if k % 2 == 1 else -1


__all__ = [
    "BridgeError", "ParticleConfig", "region_to_particles", "region_window",
    "particles_to_region", "config_vertices", "assert_flip_is_exchange",
    "HeightProfile", "height_profile", "particle_density_convention", "REGION_ALPHABET",
]
