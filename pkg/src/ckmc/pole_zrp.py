"""Pole neighbourhood as a two-species zero-range model.

A window of ``ell`` columns with both endpoints pinned at height 0 carries an
up-down path: column heights are nondecreasing up to a flat top of width
``p >= 2`` and nonincreasing after it. Up steps left of the top are particles,
down steps right of it are antiparticles. The top height ``q`` counts each species.
Equilibrium weights are ``exp(-beta * (ell + 2 q))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba as nb
import numpy as np

from .kmc_engine.engine import make_rng

TAIL_TOL = 1e-15


class ZrpError(ValueError):
    pass


def _check(ell: int, beta: float) -> None:
    if ell < 2:
        raise ZrpError("window size must be at least 2")
    if not beta > math.log(2.0):
        raise ZrpError("beta must exceed log 2")


def log_height_weight(q, ell: int, beta: float) -> np.ndarray:
    """Unnormalised ``log[binom(2q + ell - 2, 2q) e^{-2 beta q}]``."""
    q = np.asarray(q, dtype=float)
    lb = (np.vectorize(math.lgamma)(2 * q + ell - 1) - np.vectorize(math.lgamma)(2 * q + 1)
          - math.lgamma(ell - 1))
    return lb - 2.0 * beta * q


def _ratio(q: int, ell: int, beta: float) -> float:
    return math.exp(-2 * beta) * (2 * q + ell) * (2 * q + ell - 1) / ((2 * q + 2) * (2 * q + 1))


def default_q_max(ell: int, beta: float, tol: float = TAIL_TOL) -> int:
    """Smallest cutoff whose geometric tail bound is below ``tol`` relative mass."""
    _check(ell, beta)
    qc = u_crit(beta) * ell
    q = max(int(qc), 0)
    lw_mode = float(log_height_weight(q, ell, beta))
    while True:
        r = _ratio(q, ell, beta)
        if r < 1.0:
            lw = float(log_height_weight(q + 1, ell, beta))
            if lw - lw_mode + math.log(1.0 / (1.0 - r)) < math.log(tol):
                return q
        q += 1


def _tail_bound(q_max: int, ell: int, beta: float, log_z: float) -> float:
    r = _ratio(q_max, ell, beta)
    if r >= 1.0:
        return math.inf
    return math.exp(float(log_height_weight(q_max + 1, ell, beta)) - log_z) / (1.0 - r)


def exact_height_log_pmf(ell: int, beta: float, q_max: int | None = None) -> np.ndarray:
    _check(ell, beta)
    if q_max is None:
        q_max = default_q_max(ell, beta)
    q = np.arange(q_max + 1)
    lw = log_height_weight(q, ell, beta)
    m = lw.max()
    log_z = m + math.log(np.exp(lw - m).sum())
    if _tail_bound(q_max, ell, beta, log_z) > TAIL_TOL:
        raise ZrpError(f"q_max={q_max} leaves tail mass above {TAIL_TOL:g}")
    return lw - log_z


def exact_height_pmf(ell: int, beta: float, q_max: int | None = None) -> np.ndarray:
    """Equilibrium law of the top height on ``0..q_max``."""
    return np.exp(exact_height_log_pmf(ell, beta, q_max))


def p2_given_height(q, ell: int) -> np.ndarray:
    """Probability that the flat top has width exactly 2 given top height ``q``."""
    q = np.asarray(q, dtype=float)
    den = 2 * q + ell - 2
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(den > 0, 2 * q / np.where(den > 0, den, 1.0), 1.0)
    return out


def exact_p2_expectation(ell: int, beta: float) -> float:
    pmf = exact_height_pmf(ell, beta)
    return float(np.sum(pmf * p2_given_height(np.arange(len(pmf)), ell)))


def u_crit(beta: float) -> float:
    return 0.5 / (math.exp(beta) - 1.0)


def rate_C(u: float, beta: float) -> float:
    """Large-deviation rate of the top height per column at height ``u * ell``."""
    if u <= 0:
        raise ZrpError("u must be positive")
    return (2 * beta * u - 2 * u * math.log1p(1 / (2 * u)) - math.log1p(2 * u)
            - math.log1p(-math.exp(-beta)))


def rate_C_prime(u: float, beta: float) -> float:
    if u <= 0:
        raise ZrpError("u must be positive")
    return 2 * beta - 2 * math.log1p(1 / (2 * u))


def rate_C_second(u: float) -> float:
    if u <= 0:
        raise ZrpError("u must be positive")
    return 2.0 / (u + 2 * u * u)


# -- states ---------------------------------------------------------------------

@dataclass(frozen=True)
class ZrpState:
    """Occupations on sites ``0..ell``: ``eta_j >= 0`` left of the top, ``<= 0`` right of it."""

    eta: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "eta", tuple(int(e) for e in self.eta))
        if len(self.eta) < 3:
            raise ZrpError("window size must be at least 2")
        pos = sum(e for e in self.eta if e > 0)
        neg = -sum(e for e in self.eta if e < 0)
        if pos != neg:
            raise ZrpError("particle and antiparticle counts differ")
        seen_neg = False
        for e in self.eta:
            if e < 0:
                seen_neg = True
            elif e > 0 and seen_neg:
                raise ZrpError("particle right of an antiparticle")
        if self.pole_width < 2:
            raise ZrpError("top narrower than 2")

    @property
    def ell(self) -> int:
        return len(self.eta) - 1

    @property
    def height(self) -> int:
        return sum(e for e in self.eta if e > 0)

    @property
    def heights(self) -> np.ndarray:
        return np.cumsum(self.eta[:-1])

    @property
    def pole_width(self) -> int:
        h = self.heights
        return int(np.sum(h == h.max()))

    @property
    def log_weight_factor(self) -> int:
        """Total path length ``ell + sum |eta_j|``."""
        return self.ell + sum(abs(e) for e in self.eta)

    @classmethod
    def from_heights(cls, h) -> "ZrpState":
        h = np.asarray(h, dtype=int)
        return cls(tuple(np.diff(np.concatenate(([0], h, [0])))))


def zrp_moves(state: ZrpState, beta: float) -> list[tuple[ZrpState, float]]:
    """All moves out of ``state`` with their rates."""
    h = [int(v) for v in state.heights]
    ell = len(h)
    out: list[tuple[ZrpState, float]] = []

    def ok(g):
        try:
            return ZrpState.from_heights(g)
        except ZrpError:
            return None

    for c in range(ell):
        for d in (-1, +1):
            g = h[:]
            g[c] += d
            if g[c] < 0 or max(g) != max(h):
                continue
            s = ok(g)
            if s is not None:
                out.append((s, 0.5))
    q = max(h)
    top = [i for i, v in enumerate(h) if v == q]
    p = len(top)
    if p == 2 and q >= 1:
        g = h[:]
        g[top[0]] -= 1
        g[top[1]] -= 1
        out.append((ZrpState.from_heights(g), 1.0))
    for m in range(1, p):
        g = h[:]
        g[top[0] + m - 1] += 1
        g[top[0] + m] += 1
        out.append((ZrpState.from_heights(g), math.exp(-2 * beta)))
    return out


def enumerate_states(ell: int, q_max: int) -> list[ZrpState]:
    out = []

    def rec(prefix):
        if len(prefix) == ell:
            try:
                out.append(ZrpState.from_heights(prefix))
            except ZrpError:
                pass
            return
        for v in range(q_max + 1):
            rec(prefix + [v])

    rec([])
    return out


# -- sampler --------------------------------------------------------------------

@nb.njit(cache=True)
def _legal_flips(h, ell, L, R, out_c, out_d):
    """Fill legal single-block changes (column, +-1); return their count.

    ``L`` and ``R`` are the first and last columns of the flat top.
    """
    n = 0
    p = R - L + 1
    for c in range(ell):
        left = h[c - 1] if c > 0 else 0
        right = h[c + 1] if c < ell - 1 else 0
        if c < L:
            if h[c] > left:
                out_c[n] = c
                out_d[n] = -1
                n += 1
            if h[c] < right:
                out_c[n] = c
                out_d[n] = +1
                n += 1
        elif c > R:
            if h[c] > right:
                out_c[n] = c
                out_d[n] = -1
                n += 1
            if h[c] < left:
                out_c[n] = c
                out_d[n] = +1
                n += 1
        else:
            if p >= 3 and ((c == L and h[c] > left) or (c == R and h[c] > right)):
                out_c[n] = c
                out_d[n] = -1
                n += 1
    return n


@nb.njit(cache=True)
def _top(h, ell):
    q = 0
    for c in range(ell):
        if h[c] > q:
            q = h[c]
    L = -1
    R = -1
    for c in range(ell):
        if h[c] == q:
            if L < 0:
                L = c
            R = c
    return q, L, R


@nb.njit(cache=True)
def _run_zrp(h, ell, e2b, n_events, q_cap, u):
    """Gillespie loop; returns time-weighted height histogram, p2 time, batch stats."""
    hist = np.zeros(q_cap + 2)
    p2_time = 0.0
    t = 0.0
    cap_hits = 0
    out_c = np.empty(2 * ell + 2, np.int64)
    out_d = np.empty(2 * ell + 2, np.int64)
    n_batches = 50
    per = max(n_events // n_batches, 1)
    b_p2 = np.zeros(n_batches)
    b_t = np.zeros(n_batches)
    ui = 0
    q, L, R = _top(h, ell)
    for ev in range(n_events):
        nf = _legal_flips(h, ell, L, R, out_c, out_d)
        p = R - L + 1
        r_flip = 0.5 * nf
        r_del = 1.0 if (p == 2 and q >= 1) else 0.0
        r_grow = e2b * (p - 1)
        tot = r_flip + r_del + r_grow
        dt = -math.log(1.0 - u[ui]) / tot
        ui += 1
        hist[q] += dt
        b = min(ev // per, n_batches - 1)
        b_t[b] += dt
        if p == 2:
            p2_time += dt
            b_p2[b] += dt
        t += dt
        x = u[ui] * tot
        ui += 1
        if x < r_flip:
            i = min(int(x / 0.5), nf - 1)
            h[out_c[i]] += out_d[i]
        elif x < r_flip + r_del:
            h[L] -= 1
            h[R] -= 1
        else:
            m = min(int((x - r_flip - r_del) / e2b), p - 2)
            if q + 1 > q_cap:
                cap_hits += 1
            else:
                h[L + m] += 1
                h[L + m + 1] += 1
        q, L, R = _top(h, ell)
    return hist, p2_time, t, cap_hits, b_p2, b_t


@dataclass
class ZrpStats:
    ell: int
    beta: float
    n_events: int
    total_time: float
    pmf: np.ndarray
    p2_mean: float
    p2_stderr: float
    cap_hit_fraction: float
    q_cap: int

    def tv_distance(self, other: np.ndarray) -> float:
        n = max(len(self.pmf), len(other))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.pmf)] = self.pmf
        b[: len(other)] = other
        return 0.5 * float(np.abs(a - b).sum())


def simulate_zrp(ell: int, beta: float, n_events: int, seed: int,
                 initial: ZrpState | None = None, burn_in: int | None = None) -> ZrpStats:
    """Run the pole chain and return time-weighted statistics."""
    if ell < 2:
        raise ZrpError("window size must be at least 2")
    rng = make_rng(seed)
    q_cap = max(int(20 * u_crit(beta) * ell), 4)
    h = (np.zeros(ell, dtype=np.int64) if initial is None
         else np.asarray(initial.heights, dtype=np.int64).copy())
    e2b = math.exp(-2 * beta)
    if burn_in is None:
        burn_in = min(n_events // 10, 100_000)
    if burn_in:
        _run_zrp(h, ell, e2b, burn_in, q_cap, rng.random(2 * burn_in))
    hist, p2_time, t, hits, b_p2, b_t = _run_zrp(h, ell, e2b, n_events, q_cap,
                                                  rng.random(2 * n_events))
    means = b_p2 / np.where(b_t > 0, b_t, 1.0)
    stderr = float(means.std(ddof=1) / math.sqrt(len(means)))
    pmf = hist / t
    last = int(np.max(np.flatnonzero(pmf))) if np.any(pmf) else 0
    return ZrpStats(ell, beta, n_events, float(t), pmf[: last + 1], p2_time / t, stderr,
                    hits / n_events, q_cap)


@dataclass
class ZrpEnsemble:
    """Equilibrium law of the pole window with cached height PMF."""

    ell: int
    beta: float
    q_cap: int | None = None
    _log_pmf: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        _check(self.ell, self.beta)

    @property
    def log_pmf(self) -> np.ndarray:
        if self._log_pmf is None:
            self._log_pmf = exact_height_log_pmf(self.ell, self.beta, self.q_cap)
        return self._log_pmf

    @property
    def pmf(self) -> np.ndarray:
        return np.exp(self.log_pmf)

    @property
    def log_normalization(self) -> float:
        """Log of the sum of ``exp(-beta * (ell + 2q)) * count(q)`` over heights."""
        q = np.arange(len(self.log_pmf))
        lw = log_height_weight(q, self.ell, self.beta) - self.beta * self.ell
        m = lw.max()
        return float(m + math.log(np.exp(lw - m).sum()))

    def log_weight(self, state: ZrpState) -> float:
        return -self.beta * state.log_weight_factor

    def p2_expectation(self) -> float:
        return float(np.sum(self.pmf * p2_given_height(np.arange(len(self.pmf)), self.ell)))

    def mode(self) -> int:
        return int(np.argmax(self.log_pmf))
