"""Macroscopic coefficients, weak-form residuals and rate functionals.

Line integrals are taken in the 1-norm arclength ``sigma``. With ``t`` the tangent
normalised in the 1-norm, the two curve integrands used below read

    alpha(theta) dG/ds ds = (1/4) (t . m) (t . grad G) dsigma
    mu(theta) H^2 ds      = |t_x t_y| H^2 dsigma

where ``m`` is the sign vector of the region (see ``observables.REGION_M``).
On lattice curves ``t`` is replaced by the averaged tangent and the sum over
vertices ``(1/N) sum_x`` plays the role of ``dsigma``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate

from .kmc_engine.bias import BiasField
from .lattice_curve import LatticeCurve
from .observables import REGION_M, CurveView, v_eps_tangents

# region sign vectors, indexed by region - 1
_M = np.array([REGION_M[k] for k in (1, 2, 3, 4)])


class DomainError(ValueError):
    pass


# -- coefficients ------------------------------------------------------------------

def anisotropy_a(theta):
    th = np.asarray(theta, dtype=float)
    return 1.0 / (2.0 * (np.abs(np.sin(th)) + np.abs(np.cos(th))) ** 2)


def mobility_mu(theta):
    th = np.asarray(theta, dtype=float)
    return np.abs(np.sin(2 * th)) / (2.0 * (np.abs(np.sin(th)) + np.abs(np.cos(th))))


def alpha(theta):
    th = np.asarray(theta, dtype=float)
    s2 = np.sin(2 * th)
    if np.any(np.abs(s2) < 1e-15):
        raise DomainError("alpha is undefined on multiples of pi/2")
    return anisotropy_a(th) / 2.0 * s2 * np.cos(2 * th) / np.abs(s2)


def pole_slope_tan(beta: float) -> float:
    if beta == math.inf:
        return 0.0
    rho = math.exp(-beta)
    return rho / (1.0 - rho)


def pole_angles(beta: float, k: int) -> tuple[float, float]:
    """Tangent angles just before and just after pole ``k``."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    th = math.atan(pole_slope_tan(beta))
    shift = (k - 1) * math.pi / 2
    return th - shift, -th - shift


def area_decay_rate(beta: float) -> float:
    if beta == math.inf:
        return 2.0
    if not beta > 0:
        raise ValueError("beta must be positive")
    return 2.0 - 4.0 * math.exp(-beta)


def anisotropy_loop_integral() -> float:
    val, _ = integrate.quad(lambda th: float(anisotropy_a(th)), 0.0, 2 * math.pi,
                            points=[math.pi / 2, math.pi, 3 * math.pi / 2],
                            epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


# -- test functions ------------------------------------------------------------------

@dataclass(frozen=True)
class TestFunction:
    """Space-time test function with value, gradient and time derivative."""

    __test__ = False  # keep pytest from collecting this class

    value: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    grad: Callable[[float, np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
    dt: Callable[[float, np.ndarray, np.ndarray], np.ndarray]
    name: str = "G"

    def __call__(self, t, x, y):
        return self.value(t, x, y)

    @classmethod
    def from_bias(cls, field: BiasField | None, name: str = "G") -> "TestFunction":
        if field is None:
            return cls.zero()
        return cls(field.__call__, field.grad, field.dt, name)

    @classmethod
    def zero(cls) -> "TestFunction":
        z = lambda t, x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        return cls(z, lambda t, x, y: (z(t, x, y), z(t, x, y)), z, "0")

    @classmethod
    def plateau(cls, inner: float, outer: float, name: str = "one") -> "TestFunction":
        """Radial function equal to 1 on ``|x| <= inner`` and 0 beyond ``outer``."""
        if not 0 < inner < outer:
            raise ValueError("need 0 < inner < outer")

        def f(r):
            r = np.asarray(r, dtype=float)
            out = np.zeros_like(r)
            out = np.where(r <= inner, 1.0, out)
            mid = (r > inner) & (r < outer)
            u = np.where(mid, (r - inner) / (outer - inner), 0.5)
            a = np.exp(-1.0 / np.where(mid, 1 - u, 1.0))
            b = np.exp(-1.0 / np.where(mid, u, 1.0))
            return np.where(mid, a / (a + b), out)

        def df(r):
            h = 1e-7
            return (f(r + h) - f(r - h)) / (2 * h)

        def value(t, x, y):
            return f(np.hypot(x, y))

        def grad(t, x, y):
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            r = np.hypot(x, y)
            d = df(r) / np.where(r > 0, r, 1.0)
            return d * x, d * y

        zero = lambda t, x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
        return cls(value, grad, zero, name)

    @classmethod
    def linear_combination(cls, funcs: Sequence["TestFunction"], coef: Sequence[float],
                           name: str = "H") -> "TestFunction":
        funcs = list(funcs)
        coef = [float(c) for c in coef]

        def value(t, x, y):
            return sum(c * f(t, x, y) for c, f in zip(coef, funcs))

        def grad(t, x, y):
            gx, gy = 0.0, 0.0
            for c, f in zip(coef, funcs):
                a, b = f.grad(t, x, y)
                gx = gx + c * a
                gy = gy + c * b
            return gx, gy

        def dt(t, x, y):
            return sum(c * f.dt(t, x, y) for c, f in zip(coef, funcs))

        return cls(value, grad, dt, name)


def _as_test(G) -> TestFunction:
    if G is None:
        return TestFunction.zero()
    if isinstance(G, TestFunction):
        return G
    if isinstance(G, BiasField):
        return TestFunction.from_bias(G)
    raise TypeError(f"not a test function: {G!r}")


def radial_dictionary(inner: float, outer: float, powers: Iterable[int] = (1,),
                      harmonics: int = 4) -> list[TestFunction]:
    """Functions ``chi(r) r^{-j} cos(4 m phi)``; ``chi`` vanishes for ``r < inner/2`` and ``r > outer``."""
    lo, hi = inner, outer

    def chi(r):
        r = np.asarray(r, dtype=float)

        def step(u):
            u = np.clip(u, 0.0, 1.0)
            a = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
            b = np.where(u < 1, np.exp(-1.0 / np.where(u < 1, 1 - u, 1.0)), 0.0)
            return a / (a + b)

        return step((r - lo / 2) / (lo / 2)) * (1.0 - step((r - hi) / (0.5 * hi)))

    out = []
    for j in powers:
        for m in range(harmonics + 1):
            def value(t, x, y, j=j, m=m):
                x = np.asarray(x, dtype=float)
                y = np.asarray(y, dtype=float)
                r = np.hypot(x, y)
                rs = np.where(r > 0, r, 1.0)
                return chi(r) * rs ** (-j) * np.cos(4 * m * np.arctan2(y, x))

            def grad(t, x, y, value=value):
                h = 1e-6
                return ((value(t, x + h, y) - value(t, x - h, y)) / (2 * h),
                        (value(t, x, y + h) - value(t, x, y - h)) / (2 * h))

            zero = lambda t, x, y: np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)
            out.append(TestFunction(value, grad, zero, f"r^-{j} cos{4 * m}"))
    return out


# -- smooth trajectories ---------------------------------------------------------------

def _gl(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


@dataclass(frozen=True)
class SmoothTrajectory:
    """Ellipses ``x = A(t) cos phi``, ``y = -B(t) sin phi`` traversed clockwise.

    ``A``, ``B`` and their time derivatives are callables. Quarter ``q`` of the
    parameter circle, ``phi in [q pi/2, (q+1) pi/2]``, is region ``q + 2`` (mod 4).
    """

    A: Callable[[float], float]
    B: Callable[[float], float]
    dA: Callable[[float], float]
    dB: Callable[[float], float]
    T: float
    center: tuple[float, float] = (0.0, 0.0)

    @classmethod
    def shrinking_circle(cls, r0: float, rate: float = 1.0, T: float | None = None) -> "SmoothTrajectory":
        """Circle with ``r(t)^2 = r0^2 - rate t``."""
        T = 0.5 * r0**2 / rate if T is None else T
        r = lambda t: math.sqrt(r0**2 - rate * t)
        dr = lambda t: -0.5 * rate / r(t)
        return cls(r, r, dr, dr, T)

    @classmethod
    def shrinking_ellipse(cls, a0: float, b0: float, rate: float = 1.0,
                          T: float | None = None) -> "SmoothTrajectory":
        """Self-similar ellipse with both semi-axes scaled by ``sqrt(1 - rate t)``."""
        T = 0.5 / rate if T is None else T
        s = lambda t: math.sqrt(1.0 - rate * t)
        ds = lambda t: -0.5 * rate / s(t)
        return cls(lambda t: a0 * s(t), lambda t: b0 * s(t),
                   lambda t: a0 * ds(t), lambda t: b0 * ds(t), T)

    # geometry at fixed time
    def point(self, t, phi):
        phi = np.asarray(phi, dtype=float)
        return (self.center[0] + self.A(t) * np.cos(phi), self.center[1] - self.B(t) * np.sin(phi))

    def velocity_phi(self, t, phi):
        return -self.A(t) * np.sin(phi), -self.B(t) * np.cos(phi)

    def tangent_angle(self, t, phi):
        dx, dy = self.velocity_phi(t, phi)
        return np.arctan2(dy, dx)

    def curvature(self, t, phi):
        A, B = self.A(t), self.B(t)
        phi = np.asarray(phi, dtype=float)
        return A * B / (A**2 * np.sin(phi) ** 2 + B**2 * np.cos(phi) ** 2) ** 1.5

    def normal_speed(self, t, phi):
        """Inward normal speed."""
        dx, dy = self.velocity_phi(t, phi)
        n = np.hypot(dx, dy)
        nx, ny = dy / n, -dx / n  # inward normal of a clockwise curve
        phi = np.asarray(phi, dtype=float)
        vx, vy = self.dA(t) * np.cos(phi), -self.dB(t) * np.sin(phi)
        return vx * nx + vy * ny

    def poles(self, t) -> list[tuple[float, float]]:
        """Point-like poles ``L_k = R_k`` in clockwise order starting north."""
        A, B = self.A(t), self.B(t)
        cx, cy = self.center
        return [(cx, cy + B), (cx + A, cy), (cx, cy - B), (cx - A, cy)]

    def droplet_integral(self, f, t, n_r: int = 48, n_phi: int = 256) -> float:
        A, B = self.A(t), self.B(t)
        rho, wr = _gl(n_r, 0.0, 1.0)
        # per-quarter Gauss nodes: integrands may kink on the axes
        parts = [_gl(n_phi // 4, q * math.pi / 2, (q + 1) * math.pi / 2) for q in range(4)]
        phi = np.concatenate([p for p, _ in parts])
        wp = np.concatenate([w for _, w in parts])
        R, P = np.meshgrid(rho, phi, indexing="ij")
        X = self.center[0] + A * R * np.cos(P)
        Y = self.center[1] + B * R * np.sin(P)
        vals = f(X, Y) * A * B * R
        return float((vals * wr[:, None] * wp[None, :]).sum())

    def arc_nodes(self, t, n: int = 64):
        """Quadrature on the four open quarters: (phi, ds weight, region)."""
        out_phi, out_w, out_k = [], [], []
        for q in range(4):
            phi, w = _gl(n, q * math.pi / 2, (q + 1) * math.pi / 2)
            dx, dy = self.velocity_phi(t, phi)
            out_phi.append(phi)
            out_w.append(w * np.hypot(dx, dy))
            out_k.append(np.full(n, (q + 1) % 4 + 1))
        return np.concatenate(out_phi), np.concatenate(out_w), np.concatenate(out_k)

    def area(self, t) -> float:
        return math.pi * self.A(t) * self.B(t)


def _time_nodes(T: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    return _gl(n, 0.0, T)


def _droplet_terms(traj: SmoothTrajectory, G: TestFunction, n_t: int) -> float:
    """``<Gamma_T, G_T> - <Gamma_0, G_0> - int <Gamma_t, dG/dt> dt``."""
    T = traj.T
    end = traj.droplet_integral(lambda x, y: G(T, x, y), T)
    start = traj.droplet_integral(lambda x, y: G(0.0, x, y), 0.0)
    ts, wt = _time_nodes(T, n_t)
    mid = sum(w * traj.droplet_integral(lambda x, y, t=t: G.dt(t, x, y), t)
              for t, w in zip(ts, wt))
    return end - start - mid


def _smooth_line_terms(traj: SmoothTrajectory, G: TestFunction, H: TestFunction | None,
                       t: float, n: int = 64) -> tuple[float, float, float]:
    """Instantaneous ``int alpha dG/ds ds``, ``int mu H G ds`` and ``int mu H^2 ds``."""
    phi, w, _ = traj.arc_nodes(t, n)
    x, y = traj.point(t, phi)
    dx, dy = traj.velocity_phi(t, phi)
    sp = np.hypot(dx, dy)
    th = np.arctan2(dy, dx)
    gx, gy = G.grad(t, x, y)
    dGds = (gx * dx + gy * dy) / sp
    a_term = float(np.sum(alpha(th) * dGds * w))
    if H is None:
        return a_term, 0.0, 0.0
    mu = mobility_mu(th)
    h = H(t, x, y)
    return a_term, float(np.sum(mu * h * G(t, x, y) * w)), float(np.sum(mu * h * h * w))


def _pole_sum(traj: SmoothTrajectory, G: TestFunction, t: float) -> float:
    return float(sum(G(t, px, py) for px, py in traj.poles(t)))


def weak_form_residual_smooth(traj: SmoothTrajectory, G, beta: float, bias=None,
                              n_t: int = 24, n_s: int = 64) -> float:
    G = _as_test(G)
    H = None if bias is None else _as_test(bias)
    pole_c = 0.5 - (0.0 if beta == math.inf else math.exp(-beta))
    ts, wt = _time_nodes(traj.T, n_t)
    line = 0.0
    for t, w in zip(ts, wt):
        a_term, hg, _ = _smooth_line_terms(traj, G, H, t, n_s)
        line += w * (a_term - pole_c * _pole_sum(traj, G, t) + hg)
    return _droplet_terms(traj, G, n_t) - line


def ell_H(traj: SmoothTrajectory, H, beta: float, n_t: int = 24, n_s: int = 64) -> float:
    H = _as_test(H)
    pole_c = 0.25 - (0.0 if beta == math.inf else 0.5 * math.exp(-beta))
    ts, wt = _time_nodes(traj.T, n_t)
    val = _droplet_terms(traj, H, n_t)
    for t, w in zip(ts, wt):
        a_term, _, _ = _smooth_line_terms(traj, H, None, t, n_s)
        # point-like poles: H(L_k) + H(R_k) = 2 H(L_k)
        val += w * (-a_term + pole_c * 2.0 * _pole_sum(traj, H, t))
    return val


def mobility_quadratic(traj: SmoothTrajectory, H, n_t: int = 24, n_s: int = 64) -> float:
    """``int int mu H^2 ds dt``."""
    H = _as_test(H)
    ts, wt = _time_nodes(traj.T, n_t)
    return float(sum(w * _smooth_line_terms(traj, H, H, t, n_s)[2] for t, w in zip(ts, wt)))


def J_H(traj: SmoothTrajectory, H, beta: float, n_t: int = 24, n_s: int = 64) -> float:
    return ell_H(traj, H, beta, n_t, n_s) - 0.5 * mobility_quadratic(traj, H, n_t, n_s)


def rate_beta_infinity(traj: SmoothTrajectory, n_t: int = 24, n_s: int = 64) -> float:
    """``(1/2) int int (v - a k)^2 / mu ds dt`` by direct quadrature."""
    ts, wt = _time_nodes(traj.T, n_t)
    tot = 0.0
    for t, w in zip(ts, wt):
        phi, ws, _ = traj.arc_nodes(t, n_s)
        th = traj.tangent_angle(t, phi)
        d = traj.normal_speed(t, phi) - anisotropy_a(th) * traj.curvature(t, phi)
        tot += w * float(np.sum(d * d / mobility_mu(th) * ws))
    return 0.5 * tot


def sup_over_dictionary(traj: SmoothTrajectory, dictionary: Sequence[TestFunction], beta: float,
                        n_t: int = 24, n_s: int = 64) -> tuple[float, np.ndarray]:
    """Maximise ``J_H`` over the span of ``dictionary``; a lower bound on the rate."""
    ell = np.array([ell_H(traj, f, beta, n_t, n_s) for f in dictionary])
    n = len(dictionary)
    M = np.zeros((n, n))
    ts, wt = _time_nodes(traj.T, n_t)
    for t, w in zip(ts, wt):
        phi, ws, _ = traj.arc_nodes(t, n_s)
        x, y = traj.point(t, phi)
        mu = mobility_mu(traj.tangent_angle(t, phi))
        F = np.array([f(t, x, y) for f in dictionary])
        M += w * (F * (mu * ws)) @ F.T
    c = np.linalg.lstsq(M, ell, rcond=None)[0]
    return float(0.5 * ell @ c), c


# -- epsilon-regularised functionals ------------------------------------------------------

def _quarter_point_at(traj: SmoothTrajectory, t: float, q: int, sig: np.ndarray) -> np.ndarray:
    """Parameter ``phi`` on quarter ``q`` whose 1-arclength from the quarter start is ``sig``."""
    a, b = q * math.pi / 2, (q + 1) * math.pi / 2
    x0, y0 = traj.point(t, a)
    lo = np.full(sig.shape, a)
    hi = np.full(sig.shape, b)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        x, y = traj.point(t, mid)
        d = np.abs(x - x0) + np.abs(y - y0)
        below = d < sig
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def _smooth_eps_terms(traj: SmoothTrajectory, H: TestFunction, t: float, eps: float,
                      n: int = 64) -> tuple[float, float]:
    """Instantaneous ``(1/4) int (t.m)(t.grad H) dsigma`` and ``int |t_x t_y| H^2 dsigma``."""
    A, B = traj.A(t), traj.B(t)
    quarter_len = A + B
    if 2 * eps >= quarter_len:
        raise DomainError("epsilon exceeds half a region")
    grad_term = 0.0
    quad_term = 0.0
    for q in range(4):
        k = (q + 1) % 4 + 1
        m = _M[k - 1]
        sig, w = _gl(n, eps, quarter_len - eps)
        p0 = np.array(traj.point(t, _quarter_point_at(traj, t, q, sig)))
        pp = np.array(traj.point(t, _quarter_point_at(traj, t, q, sig + eps)))
        pm = np.array(traj.point(t, _quarter_point_at(traj, t, q, sig - eps)))
        tv = (pp - pm) / (2 * eps)
        gx, gy = H.grad(t, p0[0], p0[1])
        tm = tv[0] * m[0] + tv[1] * m[1]
        tg = tv[0] * gx + tv[1] * gy
        grad_term += 0.25 * float(np.sum(tm * tg * w))
        quad_term += float(np.sum(np.abs(tv[0] * tv[1]) * H(t, p0[0], p0[1]) ** 2 * w))
    return grad_term, quad_term


def J_H_eps_smooth(traj: SmoothTrajectory, H, beta: float, eps: float,
                   n_t: int = 24, n_s: int = 64) -> float:
    H = _as_test(H)
    pole_c = 0.25 - (0.0 if beta == math.inf else 0.5 * math.exp(-beta))
    ts, wt = _time_nodes(traj.T, n_t)
    val = _droplet_terms(traj, H, n_t)
    for t, w in zip(ts, wt):
        g, qd = _smooth_eps_terms(traj, H, t, eps, n_s)
        val += w * (-g + pole_c * 2.0 * _pole_sum(traj, H, t) - 0.5 * qd)
    return val


# -- lattice records ----------------------------------------------------------------------

def block_sum(curve: LatticeCurve, f: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> float:
    """Midpoint rule for the integral of ``f`` over the droplet."""
    N = curve.N
    xs, ys = [], []
    for j, (lo, hi) in curve.rows().items():
        i = np.arange(lo, hi + 1)
        xs.append((i + 0.5) / N)
        ys.append(np.full(len(i), (j + 0.5) / N))
    X = np.concatenate(xs)
    Y = np.concatenate(ys)
    return float(np.sum(f(X, Y))) / N**2


@dataclass
class LatticeLineTerms:
    """Per-snapshot curve sums of a lattice curve at one time."""

    grad_term: float   # (1/4)(1/N) sum (t.m)(t.grad G)
    quad_term: float   # (1/N) sum |t_x t_y| H G
    pole_sum: float    # sum_k G(L_k) + G(R_k)
    n_vertices: int


def lattice_line_terms(curve: LatticeCurve, G: TestFunction, H: TestFunction | None,
                       t: float, eps: float) -> LatticeLineTerms:
    cv = CurveView(curve)
    N = cv.N
    if eps * N < 1:
        raise DomainError("epsilon below lattice resolution")
    d = v_eps_tangents(cv, eps)
    x = d["pos"][:, 0] / N
    y = d["pos"][:, 1] / N
    tv, m = d["t"], d["m"]
    gx, gy = G.grad(t, x, y)
    grad_term = 0.25 * float(np.sum((tv * m).sum(1) * (tv[:, 0] * gx + tv[:, 1] * gy))) / N
    quad = 0.0
    if H is not None:
        quad = float(np.sum(np.abs(tv[:, 0] * tv[:, 1]) * H(t, x, y) * G(t, x, y))) / N
    ps = 0.0
    for p in cv.poles:
        ps += float(G(t, p.L[0] / N, p.L[1] / N)) + float(G(t, p.R[0] / N, p.R[1] / N))
    return LatticeLineTerms(grad_term, quad, ps, len(x))


def _snapshots(record) -> list[tuple[float, LatticeCurve]]:
    snaps = list(record.snapshots)
    if len(snaps) < 2:
        raise DomainError("record needs at least two snapshots")
    if abs(snaps[-1][0] - record.t_final) > 1e-12:
        raise DomainError("record snapshots do not reach the final time")
    return snaps


def _trapezoid(ts: np.ndarray, vals: np.ndarray) -> float:
    return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(ts)))


def _record_droplet_terms(snaps, G: TestFunction) -> float:
    ts = np.array([t for t, _ in snaps])
    end = block_sum(snaps[-1][1], lambda x, y: G(ts[-1], x, y))
    start = block_sum(snaps[0][1], lambda x, y: G(ts[0], x, y))
    dts = np.array([block_sum(c, lambda x, y, t=t: G.dt(t, x, y)) for t, c in snaps])
    return end - start - _trapezoid(ts, dts)


def weak_form_residual_lattice(record, G, beta: float, eps: float = 0.05, bias=None) -> float:
    G = _as_test(G)
    H = None if bias is None else _as_test(bias)
    snaps = _snapshots(record)
    pole_c = 0.25 - (0.0 if beta == math.inf else 0.5 * math.exp(-beta))
    ts = np.array([t for t, _ in snaps])
    line = []
    for t, c in snaps:
        lt = lattice_line_terms(c, G, H, t, eps)
        line.append(lt.grad_term - pole_c * lt.pole_sum + lt.quad_term)
    return _record_droplet_terms(snaps, G) - _trapezoid(ts, np.array(line))


def J_H_eps_lattice(record, H, beta: float, eps: float = 0.05) -> float:
    H = _as_test(H)
    snaps = _snapshots(record)
    pole_c = 0.25 - (0.0 if beta == math.inf else 0.5 * math.exp(-beta))
    ts = np.array([t for t, _ in snaps])
    inst = []
    for t, c in snaps:
        lt = lattice_line_terms(c, H, H, t, eps)
        inst.append(-lt.grad_term + pole_c * lt.pole_sum - 0.5 * lt.quad_term)
    return _record_droplet_terms(snaps, H) + _trapezoid(ts, np.array(inst))


def weak_form_residual(record, G, beta: float, bias=None, eps: float = 0.05, **kw) -> float:
    """Residual of the weak formulation on a smooth family or a simulation record."""
    if isinstance(record, SmoothTrajectory):
        return weak_form_residual_smooth(record, G, beta, bias, **kw)
    return weak_form_residual_lattice(record, G, beta, eps, bias)


def J_H_eps(record, H, beta: float, eps: float = 0.05, **kw) -> float:
    if isinstance(record, SmoothTrajectory):
        return J_H_eps_smooth(record, H, beta, eps, **kw)
    return J_H_eps_lattice(record, H, beta, eps)
