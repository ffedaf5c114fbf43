"""Smooth compactly supported bias fields."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Bump:
    """``amplitude * psi(|x - center| / width)`` with ``psi(r) = exp(1 - 1/(1 - r^2))``."""

    amplitude: float
    center: tuple[float, float]
    width: float

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("bump width must be positive")


def _psi_and_dpsi(q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Profile and its derivative in ``q = r^2``; zero outside the unit disk."""
    q = np.asarray(q, dtype=float)
    inside = q < 1.0
    qi = np.where(inside, q, 0.0)
    d = 1.0 - qi
    val = np.where(inside, np.exp(1.0 - 1.0 / d), 0.0)
    dval = np.where(inside, -val / (d * d), 0.0)
    return val, dval


@dataclass(frozen=True)
class BiasField:
    """Space-time field ``phi(t) * S(x)`` with ``S`` a sum of bumps.

    Time profiles: ``const`` (``phi = 1``) and ``linear`` (``phi = 1 + kappa t``).
    """

    bumps: tuple[Bump, ...] = field(default_factory=tuple)
    profile: str = "const"
    kappa: float = 0.0

    def __post_init__(self):
        if self.profile not in ("const", "linear"):
            raise ValueError(f"unknown time profile {self.profile!r}")
        object.__setattr__(self, "bumps", tuple(self.bumps))

    @classmethod
    def bump(cls, amplitude: float, center: Sequence[float], width: float,
             profile: str = "const", kappa: float = 0.0) -> "BiasField":
        return cls((Bump(float(amplitude), (float(center[0]), float(center[1])), float(width)),),
                   profile, kappa)

    @property
    def is_zero(self) -> bool:
        return all(b.amplitude == 0.0 for b in self.bumps)

    @property
    def time_dependent(self) -> bool:
        return self.profile != "const" and self.kappa != 0.0 and not self.is_zero

    def phi(self, t: float) -> float:
        return 1.0 + self.kappa * t if self.profile == "linear" else 1.0

    def dphi(self, t: float) -> float:
        return self.kappa if self.profile == "linear" else 0.0

    def spatial(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast(x, y).shape)
        for b in self.bumps:
            q = ((x - b.center[0]) ** 2 + (y - b.center[1]) ** 2) / b.width**2
            out = out + b.amplitude * _psi_and_dpsi(q)[0]
        return out

    def spatial_grad(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        gx = np.zeros(np.broadcast(x, y).shape)
        gy = np.zeros_like(gx)
        for b in self.bumps:
            dx = x - b.center[0]
            dy = y - b.center[1]
            q = (dx * dx + dy * dy) / b.width**2
            _, dv = _psi_and_dpsi(q)
            gx = gx + b.amplitude * dv * 2.0 * dx / b.width**2
            gy = gy + b.amplitude * dv * 2.0 * dy / b.width**2
        return gx, gy

    def __call__(self, t: float, x, y) -> np.ndarray:
        return self.phi(t) * self.spatial(x, y)

    def grad(self, t: float, x, y) -> tuple[np.ndarray, np.ndarray]:
        gx, gy = self.spatial_grad(x, y)
        p = self.phi(t)
        return p * gx, p * gy

    def dt(self, t: float, x, y) -> np.ndarray:
        return self.dphi(t) * self.spatial(x, y)

    def support_box(self) -> tuple[float, float, float, float]:
        if not self.bumps:
            return (0.0, 0.0, 0.0, 0.0)
        return (min(b.center[0] - b.width for b in self.bumps),
                max(b.center[0] + b.width for b in self.bumps),
                min(b.center[1] - b.width for b in self.bumps),
                max(b.center[1] + b.width for b in self.bumps))

    def sup_norm(self) -> float:
        return sum(abs(b.amplitude) for b in self.bumps)

    def as_array(self) -> np.ndarray:
        arr = np.zeros((max(len(self.bumps), 1), 4))
        for n, b in enumerate(self.bumps):
            arr[n] = (b.amplitude, b.center[0], b.center[1], b.width)
        if not self.bumps:
            arr[0, 3] = 1.0
        return arr

    def block_integral(self, t: float, i: int, j: int, N: int, mode: str = "midpoint") -> float:
        """Integral of the field over block (i, j) of the 1/N lattice."""
        if mode == "midpoint":
            return float(self(t, (i + 0.5) / N, (j + 0.5) / N)) / N**2
        if mode == "gauss3":
            nodes = np.array([-math.sqrt(3 / 5), 0.0, math.sqrt(3 / 5)])
            wts = np.array([5 / 9, 8 / 9, 5 / 9])
            xs = (i + 0.5 + 0.5 * nodes) / N
            ys = (j + 0.5 + 0.5 * nodes) / N
            X, Y = np.meshgrid(xs, ys, indexing="ij")
            W = np.outer(wts, wts) / 4.0
            return float((W * self(t, X, Y)).sum()) / N**2
        raise ValueError(f"unknown quadrature {mode!r}")

    # config text form: bump(amplitude, cx, cy, width[, profile[, kappa]]) joined by '+'
    def to_spec(self) -> str:
        if not self.bumps:
            return "none"
        parts = []
        for b in self.bumps:
            s = f"bump({b.amplitude!r}, {b.center[0]!r}, {b.center[1]!r}, {b.width!r}"
            parts.append(s)
        tail = "" if self.profile == "const" else f", {self.profile}, {self.kappa!r}"
        return " + ".join(p + tail + ")" for p in parts)

    @classmethod
    def from_spec(cls, text: str) -> "BiasField | None":
        text = text.strip()
        if text in ("", "none"):
            return None
        bumps = []
        profile, kappa = "const", 0.0
        for part in re.split(r"(?<=\))\s*\+\s*(?=bump\()", text):
            part = part.strip()
            if not (part.startswith("bump(") and part.endswith(")")):
                raise ValueError(f"bad bias term {part!r}")
            args = [a.strip() for a in part[5:-1].split(",")]
            if len(args) not in (4, 6):
                raise ValueError(f"bump needs 4 or 6 arguments, got {len(args)}")
            a, cx, cy, w = map(float, args[:4])
            bumps.append(Bump(a, (cx, cy), w))
            if len(args) == 6:
                profile, kappa = args[4], float(args[5])
        return cls(tuple(bumps), profile, kappa)
