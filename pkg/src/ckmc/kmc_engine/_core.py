"""Compiled event loop.

Geometry lives in ``G`` (int64, shape ``(4, CAP)``): rows ``G[0], G[1]`` hold
``lo, hi`` of each block row, columns ``G[2], G[3]`` hold ``lo, hi`` of each
block column; index = coordinate + OFF.  ``ext`` holds the extremes and
counters (see the ``E_*`` constants).

Slots: ``4*r + kind`` are corner flips in row ``r`` (0 remove lo, 1 add lo-1,
2 remove hi, 3 add hi+1); ``4*CAP + k-1`` are pole deletions; ``4*CAP + 4 +
(k-1)*CAP + m-1`` are growth sites ``m = 1..p_k-1`` of pole ``k``.
"""

from __future__ import annotations

import numpy as np
from numba import njit

EMPTY_LO = 1 << 40
EMPTY_HI = -(1 << 40)

E_JMIN, E_JMAX, E_IMIN, E_IMAX, E_OFF, E_CAP, E_AREA, E_DL1, E_UPD = range(9)
N_EXT = 9

# float accumulators
A_INTG, A_INTDT, A_SG, A_LOGTILT, A_GSUM, A_BSUM, A_TNEXT, A_TREF = range(8)
N_ACC = 8

# float params
P_N, P_BETA, P_E2B, P_HAS_BIAS, P_TKIND, P_TKAPPA, P_DTMAX, P_R0SQ, P_AREA_STOP = range(9)
N_PAR = 9

# statuses
ST_TIME, ST_BUFFER, ST_EXTINCT, ST_GUARD, ST_AREA, ST_CAPACITY = range(6)

# event codes
EV_FLIP, EV_PDEL, EV_PGROW = 0, 1, 2

REBUILD_EVERY = 1 << 16


# -- Fenwick tree -------------------------------------------------------------

@njit(cache=True)
def fw_add(tree, i, delta):
    n = tree.shape[0] - 1
    i += 1
    while i <= n:
        tree[i] += delta
        i += i & (-i)


@njit(cache=True)
def fw_prefix(tree, i):
    s = 0.0
    while i > 0:
        s += tree[i]
        i -= i & (-i)
    return s


@njit(cache=True)
def fw_build(tree, w):
    n = w.shape[0]
    tree[0] = 0.0
    for i in range(1, n + 1):
        tree[i] = w[i - 1]
    for i in range(1, n + 1):
        j = i + (i & (-i))
        if j <= n:
            tree[j] += tree[i]


@njit(cache=True)
def fw_find(tree, u):
    """Smallest index whose inclusive prefix sum exceeds ``u``."""
    n = tree.shape[0] - 1
    mask = 1
    while mask * 2 <= n:
        mask *= 2
    pos = 0
    while mask > 0:
        nxt = pos + mask
        if nxt <= n and tree[nxt] <= u:
            u -= tree[nxt]
            pos = nxt
        mask //= 2
    return pos


# -- bias ----------------------------------------------------------------------

@njit(cache=True)
def bump_value(bumps, x, y):
    s = 0.0
    for b in range(bumps.shape[0]):
        w = bumps[b, 3]
        dx = (x - bumps[b, 1]) / w
        dy = (y - bumps[b, 2]) / w
        r2 = dx * dx + dy * dy
        if r2 < 1.0:
            s += bumps[b, 0] * np.exp(1.0 - 1.0 / (1.0 - r2))
    return s


@njit(cache=True)
def phi(par, t):
    if par[P_TKIND] == 1.0:
        return 1.0 + par[P_TKAPPA] * t
    return 1.0


@njit(cache=True)
def block_S(par, bumps, i, j):
    """Spatial bias at the block centre divided by N (midpoint rule)."""
    if par[P_HAS_BIAS] == 0.0:
        return 0.0
    N = par[P_N]
    return bump_value(bumps, (i + 0.5) / N, (j + 0.5) / N) / N


# -- geometry ------------------------------------------------------------------

@njit(cache=True)
def blk_in(G, ext, i, j):
    off = ext[E_OFF]
    r = j + off
    if r < 0 or r >= ext[E_CAP]:
        return False
    return G[0, r] <= i and i <= G[1, r]


@njit(cache=True)
def origin_count(G, ext):
    c = 0
    for i in (-1, 0):
        for j in (-1, 0):
            if blk_in(G, ext, i, j):
                c += 1
    return c


@njit(cache=True)
def is_origin_block(i, j):
    return (i == -1 or i == 0) and (j == -1 or j == 0)


@njit(cache=True)
def toggle(G, ext, i, j, add):
    """Add or remove block (i, j); the caller guarantees intervals stay intervals."""
    off = ext[E_OFF]
    r = j + off
    c = i + off
    if add:
        if G[0, r] > G[1, r]:
            G[0, r] = i
            G[1, r] = i
            if j > ext[E_JMAX]:
                ext[E_JMAX] = j
            if j < ext[E_JMIN]:
                ext[E_JMIN] = j
        elif i == G[0, r] - 1:
            G[0, r] = i
        else:
            G[1, r] = i
        if G[2, c] > G[3, c]:
            G[2, c] = j
            G[3, c] = j
            if i > ext[E_IMAX]:
                ext[E_IMAX] = i
            if i < ext[E_IMIN]:
                ext[E_IMIN] = i
        elif j == G[2, c] - 1:
            G[2, c] = j
        else:
            G[3, c] = j
        ext[E_AREA] += 1
    else:
        if G[0, r] == G[1, r]:
            G[0, r] = EMPTY_LO
            G[1, r] = EMPTY_HI
            if j == ext[E_JMAX]:
                ext[E_JMAX] = j - 1
            if j == ext[E_JMIN]:
                ext[E_JMIN] = j + 1
        elif i == G[0, r]:
            G[0, r] = i + 1
        else:
            G[1, r] = i - 1
        if G[2, c] == G[3, c]:
            G[2, c] = EMPTY_LO
            G[3, c] = EMPTY_HI
            if i == ext[E_IMAX]:
                ext[E_IMAX] = i - 1
            if i == ext[E_IMIN]:
                ext[E_IMIN] = i + 1
        elif j == G[2, c]:
            G[2, c] = j + 1
        else:
            G[3, c] = j - 1
        ext[E_AREA] -= 1


@njit(cache=True)
def flip_candidate(G, ext, r, kind):
    """Block targeted by flip slot (r, kind) and whether the flip is legal."""
    off = ext[E_OFF]
    j = r - off
    if j < ext[E_JMIN] or j > ext[E_JMAX]:
        return False, 0, 0
    lo = G[0, r]
    hi = G[1, r]
    if kind == 0:
        i = lo
    elif kind == 1:
        i = lo - 1
    elif kind == 2:
        i = hi
    else:
        i = hi + 1
    if i < ext[E_IMIN] or i > ext[E_IMAX]:
        return False, i, j
    c = i + off
    clo = G[2, c]
    chi = G[3, c]
    if kind == 1 or kind == 3:
        return (j == clo - 1 or j == chi + 1), i, j
    # removal
    if lo == hi or clo == chi:
        return False, i, j
    if not (j == clo or j == chi):
        return False, i, j
    nlo = lo + 1 if kind == 0 else lo
    nhi = hi - 1 if kind == 2 else hi
    if j + 1 <= ext[E_JMAX]:
        if max(nlo, G[0, r + 1]) > min(nhi, G[1, r + 1]):
            return False, i, j
    if j - 1 >= ext[E_JMIN]:
        if max(nlo, G[0, r - 1]) > min(nhi, G[1, r - 1]):
            return False, i, j
    if (j == ext[E_JMAX] or j == ext[E_JMIN]) and hi - lo + 1 < 3:
        return False, i, j
    if (i == ext[E_IMAX] or i == ext[E_IMIN]) and chi - clo + 1 < 3:
        return False, i, j
    if is_origin_block(i, j) and origin_count(G, ext) < 2:
        return False, i, j
    return True, i, j


@njit(cache=True)
def pole_line(G, ext, k):
    """(extreme line coordinate e, lo, hi, inward step s) of pole k."""
    off = ext[E_OFF]
    if k == 1:
        e = ext[E_JMAX]
        return e, G[0, e + off], G[1, e + off], -1
    if k == 3:
        e = ext[E_JMIN]
        return e, G[0, e + off], G[1, e + off], 1
    if k == 2:
        e = ext[E_IMAX]
        return e, G[2, e + off], G[3, e + off], -1
    e = ext[E_IMIN]
    return e, G[2, e + off], G[3, e + off], 1


@njit(cache=True)
def pole_delete_legal(G, ext, k):
    e, lo, hi, s = pole_line(G, ext, k)
    if hi - lo + 1 != 2:
        return False
    off = ext[E_OFF]
    prim = 0 if (k == 1 or k == 3) else 2
    cross = 2 - prim
    if k == 1 or k == 3:
        cmin, cmax = ext[E_IMIN], ext[E_IMAX]
        pmin, pmax = ext[E_JMIN], ext[E_JMAX]
    else:
        cmin, cmax = ext[E_JMIN], ext[E_JMAX]
        pmin, pmax = ext[E_IMIN], ext[E_IMAX]
    n = e + s
    if n < pmin or n > pmax:
        return False
    if G[prim + 1, n + off] - G[prim, n + off] + 1 < 2:
        return False
    for c in (lo, lo + 1):
        ln = G[cross + 1, c + off] - G[cross, c + off] + 1
        if ln < 2:
            return False
        if (c == cmin or c == cmax) and ln < 3:
            return False
    # origin containment after removing both blocks
    cnt = origin_count(G, ext)
    for c in (lo, lo + 1):
        if k == 1 or k == 3:
            bi, bj = c, e
        else:
            bi, bj = e, c
        if is_origin_block(bi, bj):
            cnt -= 1
    return cnt > 0


@njit(cache=True)
def pole_blocks(G, ext, k, m):
    """Blocks of pole deletion (m = 0) or of growth at site m >= 1.

    Returns (i1, j1, i2, j2, vx, vy) where (vx, vy) is the logged vertex.
    """
    e, lo, hi, s = pole_line(G, ext, k)
    if m == 0:
        if k == 1 or k == 3:
            return lo, e, lo + 1, e, 0, 0
        return e, lo, e, lo + 1, 0, 0
    ln = e - s
    if k == 1:
        return lo + m - 1, ln, lo + m, ln, lo + m, e + 1
    if k == 3:
        return hi - m, ln, hi - m + 1, ln, hi + 1 - m, e
    if k == 2:
        return ln, hi - m, ln, hi - m + 1, e + 1, hi + 1 - m
    return ln, lo + m - 1, ln, lo + m, e, lo + m


# -- slot evaluation -------------------------------------------------------------

@njit(cache=True)
def eval_slot(G, ext, par, bumps, s):
    """(base rate, N * Delta V / phi) of slot s."""
    cap = ext[E_CAP]
    if s < 4 * cap:
        r = s // 4
        kind = s % 4
        ok, i, j = flip_candidate(G, ext, r, kind)
        if not ok:
            return 0.0, 0.0
        d = block_S(par, bumps, i, j)
        if kind == 0 or kind == 2:
            d = -d
        return 0.5, d
    s2 = s - 4 * cap
    if s2 < 4:
        k = s2 + 1
        if not pole_delete_legal(G, ext, k):
            return 0.0, 0.0
        i1, j1, i2, j2, vx, vy = pole_blocks(G, ext, k, 0)
        return 1.0, -(block_S(par, bumps, i1, j1) + block_S(par, bumps, i2, j2))
    s3 = s2 - 4
    k = s3 // cap + 1
    m = s3 % cap + 1
    e, lo, hi, sg = pole_line(G, ext, k)
    if m > hi - lo:
        return 0.0, 0.0
    e2b = par[P_E2B]
    if e2b == 0.0:
        return 0.0, 0.0
    i1, j1, i2, j2, vx, vy = pole_blocks(G, ext, k, m)
    return e2b, block_S(par, bumps, i1, j1) + block_S(par, bumps, i2, j2)


@njit(cache=True)
def set_slot(tree, base, w, dsn, acc, s, b, d, ph):
    nw = b * np.exp(ph * d) if d != 0.0 else b
    old = w[s]
    if nw != old:
        fw_add(tree, s, nw - old)
    acc[A_GSUM] += (nw - b) - (old - base[s])
    acc[A_BSUM] += b - base[s]
    base[s] = b
    w[s] = nw
    dsn[s] = d


@njit(cache=True)
def update_slot(G, ext, par, bumps, tree, base, w, dsn, acc, s, ph):
    b, d = eval_slot(G, ext, par, bumps, s)
    if b != base[s] or d != dsn[s] or b * np.exp(ph * d) != w[s]:
        set_slot(tree, base, w, dsn, acc, s, b, d, ph)


@njit(cache=True)
def update_row(G, ext, par, bumps, tree, base, w, dsn, acc, j, ph):
    r = j + ext[E_OFF]
    if r < 0 or r >= ext[E_CAP]:
        return
    for kind in range(4):
        update_slot(G, ext, par, bumps, tree, base, w, dsn, acc, 4 * r + kind, ph)


@njit(cache=True)
def update_poles(G, ext, par, bumps, tree, base, w, dsn, acc, pgeo, ph, force):
    cap = ext[E_CAP]
    for k in range(1, 5):
        update_slot(G, ext, par, bumps, tree, base, w, dsn, acc, 4 * cap + k - 1, ph)
        e, lo, hi, s = pole_line(G, ext, k)
        g = pgeo[k - 1]
        if force or g[0] != e or g[1] != lo or g[2] != hi:
            top = max(g[2] - g[1], hi - lo)
            if force:
                top = cap
            for m in range(1, min(top, cap) + 1):
                update_slot(G, ext, par, bumps, tree, base, w, dsn, acc,
                            4 * cap + 4 + (k - 1) * cap + m - 1, ph)
            g[0] = e
            g[1] = lo
            g[2] = hi


@njit(cache=True)
def rebuild_all(G, ext, par, bumps, tree, base, w, dsn, acc, pgeo, ph):
    """Full re-enumeration of every slot (also resets the running sums)."""
    M = base.shape[0]
    for s in range(M):
        b, d = eval_slot(G, ext, par, bumps, s)
        base[s] = b
        dsn[s] = d
        w[s] = b * np.exp(ph * d) if d != 0.0 else b
    fw_build(tree, w)
    gs = 0.0
    bs = 0.0
    for s in range(M):
        gs += w[s] - base[s]
        bs += base[s]
    acc[A_GSUM] = gs
    acc[A_BSUM] = bs
    for k in range(1, 5):
        e, lo, hi, sg = pole_line(G, ext, k)
        pgeo[k - 1, 0] = e
        pgeo[k - 1, 1] = lo
        pgeo[k - 1, 2] = hi


@njit(cache=True)
def refresh_tilts(tree, base, w, dsn, acc, ph):
    M = base.shape[0]
    gs = 0.0
    for s in range(M):
        w[s] = base[s] * np.exp(ph * dsn[s]) if dsn[s] != 0.0 else base[s]
        gs += w[s] - base[s]
    fw_build(tree, w)
    acc[A_GSUM] = gs


@njit(cache=True)
def gamma_S(G, ext, par, bumps):
    """<Gamma, S> with S the static bias profile, by midpoint rule."""
    if par[P_HAS_BIAS] == 0.0:
        return 0.0
    off = ext[E_OFF]
    N = par[P_N]
    tot = 0.0
    for j in range(ext[E_JMIN], ext[E_JMAX] + 1):
        r = j + off
        for i in range(G[0, r], G[1, r] + 1):
            tot += block_S(par, bumps, i, j)
    return tot / N


# -- applying moves ----------------------------------------------------------------

@njit(cache=True)
def _track_toggle(G, ext, G0, i, j, add):
    """Update the L1-distance counter to the initial droplet, then toggle."""
    off = ext[E_OFF]
    r = j + off
    in0 = G0[0, r] <= i and i <= G0[1, r]
    if add == in0:
        ext[E_DL1] -= 1
    else:
        ext[E_DL1] += 1
    toggle(G, ext, i, j, add)


@njit(cache=True)
def _refresh_near(G, ext, par, bumps, tree, base, w, dsn, acc, i, j, ph):
    off = ext[E_OFF]
    for jj in range(j - 1, j + 2):
        update_row(G, ext, par, bumps, tree, base, w, dsn, acc, jj, ph)
    c = i + off
    clo = G[2, c]
    chi = G[3, c]
    if clo <= chi:
        for jj in range(clo - 2, clo + 2):
            update_row(G, ext, par, bumps, tree, base, w, dsn, acc, jj, ph)
        for jj in range(chi - 1, chi + 3):
            update_row(G, ext, par, bumps, tree, base, w, dsn, acc, jj, ph)
    if is_origin_block(i, j):
        update_row(G, ext, par, bumps, tree, base, w, dsn, acc, -1, ph)
        update_row(G, ext, par, bumps, tree, base, w, dsn, acc, 0, ph)


@njit(cache=True)
def flip_vertex(G, ext, kind, i, j):
    """Corner shared by the two droplet-facing (added) or exposed (removed) sides."""
    off = ext[E_OFF]
    if kind == 1 or kind == 3:
        vx = i + 1 if kind == 1 else i
        vy = j + 1 if j == G[2, i + off] - 1 else j
    else:
        vx = i if kind == 0 else i + 1
        vy = j if j == G[2, i + off] else j + 1
    return vx, vy


@njit(cache=True)
def describe_slot(G, ext, s):
    """(code, a, b, c) of the move in slot s, as written in the event log."""
    cap = ext[E_CAP]
    if s < 4 * cap:
        r = s // 4
        kind = s % 4
        ok, i, j = flip_candidate(G, ext, r, kind)
        vx, vy = flip_vertex(G, ext, kind, i, j)
        return EV_FLIP, vx, vy, (1 if (kind == 1 or kind == 3) else -1)
    s2 = s - 4 * cap
    if s2 < 4:
        return EV_PDEL, s2 + 1, 0, 0
    s3 = s2 - 4
    k = s3 // cap + 1
    m = s3 % cap + 1
    i1, j1, i2, j2, vx, vy = pole_blocks(G, ext, k, m)
    return EV_PGROW, k, vx, vy


@njit(cache=True)
def apply_slot(G, ext, G0, par, bumps, tree, base, w, dsn, acc, pgeo, s, ph, out):
    """Apply the move of slot s and refresh the affected slots.

    ``out`` receives (code, a, b, c) for the event log.  Returns False when the
    move would leave the geometry arrays.
    """
    cap = ext[E_CAP]
    off = ext[E_OFF]
    if s < 4 * cap:
        r = s // 4
        kind = s % 4
        ok, i, j = flip_candidate(G, ext, r, kind)
        add = kind == 1 or kind == 3
        vx, vy = flip_vertex(G, ext, kind, i, j)
        sgn = 1 if add else -1
        _track_toggle(G, ext, G0, i, j, add)
        acc[A_SG] += sgn * block_S(par, bumps, i, j) / par[P_N]
        out[0] = EV_FLIP
        out[1] = vx
        out[2] = vy
        out[3] = sgn
        _refresh_near(G, ext, par, bumps, tree, base, w, dsn, acc, i, j, ph)
        update_poles(G, ext, par, bumps, tree, base, w, dsn, acc, pgeo, ph, False)
        return True
    s2 = s - 4 * cap
    if s2 < 4:
        k = s2 + 1
        i1, j1, i2, j2, vx, vy = pole_blocks(G, ext, k, 0)
        add = False
        out[0] = EV_PDEL
        out[1] = k
        out[2] = 0
        out[3] = 0
    else:
        s3 = s2 - 4
        k = s3 // cap + 1
        m = s3 % cap + 1
        i1, j1, i2, j2, vx, vy = pole_blocks(G, ext, k, m)
        add = True
        for q in (i1 + off, j1 + off, i2 + off, j2 + off):
            if q < 2 or q > cap - 3:
                return False
        out[0] = EV_PGROW
        out[1] = k
        out[2] = vx
        out[3] = vy
    sgn = 1 if add else -1
    _track_toggle(G, ext, G0, i1, j1, add)
    _track_toggle(G, ext, G0, i2, j2, add)
    acc[A_SG] += sgn * (block_S(par, bumps, i1, j1) + block_S(par, bumps, i2, j2)) / par[P_N]
    # pole moves change extremes: refresh every occupied row plus margins
    for jj in range(ext[E_JMIN] - 2, ext[E_JMAX] + 3):
        update_row(G, ext, par, bumps, tree, base, w, dsn, acc, jj, ph)
    update_poles(G, ext, par, bumps, tree, base, w, dsn, acc, pgeo, ph, False)
    return True


@njit(cache=True)
def slot_of_event(G, ext, code, a, b, c):
    """Slot index realising a logged event, or -1 if it is not legal."""
    cap = ext[E_CAP]
    off = ext[E_OFF]
    if code == EV_FLIP:
        vx, vy, sgn = a, b, c
        cnt = 0
        bi = 0
        bj = 0
        for di in (-1, 0):
            for dj in (-1, 0):
                inside = blk_in(G, ext, vx + di, vy + dj)
                if inside:
                    cnt += 1
                if (sgn < 0 and inside) or (sgn > 0 and not inside):
                    bi = vx + di
                    bj = vy + dj
        if (sgn < 0 and cnt != 1) or (sgn > 0 and cnt != 3):
            return -1
        r = bj + off
        if r < 0 or r >= cap:
            return -1
        for kind in range(4):
            ok, i, j = flip_candidate(G, ext, r, kind)
            if ok and i == bi and j == bj and ((kind & 1) == 1) == (sgn > 0):
                return 4 * r + kind
        return -1
    if code == EV_PDEL:
        if pole_delete_legal(G, ext, a):
            return 4 * cap + a - 1
        return -1
    k = a
    e, lo, hi, s = pole_line(G, ext, k)
    for m in range(1, hi - lo + 1):
        i1, j1, i2, j2, vx, vy = pole_blocks(G, ext, k, m)
        if vx == b and vy == c:
            return 4 * cap + 4 + (k - 1) * cap + m - 1
    return -1


# -- main loop -------------------------------------------------------------------

@njit(cache=True)
def _integrate(par, acc, t0, t1):
    N = par[P_N]
    acc[A_INTG] += N * N * acc[A_GSUM] * (t1 - t0)
    if par[P_TKIND] != 0.0:
        acc[A_INTDT] += acc[A_SG] * (phi(par, t1) - phi(par, t0))


@njit(cache=True)
def run_loop(G, ext, G0, par, bumps, tree, base, w, dsn, acc, pgeo,
             u, ucur, t, t_stop, max_events, ev_t, ev_code, ev_val, record):
    """Advance until t_stop, a full buffer, or a terminal condition.

    Returns (status, n_events, ucur, t).  ``u`` holds pre-drawn uniforms; the
    caller refills it when fewer than two remain before a draw.
    """
    N = par[P_N]
    N2 = N * N
    timedep = par[P_TKIND] != 0.0 and par[P_HAS_BIAS] != 0.0
    nu = u.shape[0]
    out = np.zeros(4, dtype=np.int64)
    n = 0
    M = base.shape[0]
    while True:
        if n >= max_events:
            return ST_BUFFER, n, ucur, t
        if ucur + 2 > nu:
            return ST_BUFFER, n, ucur, t
        total = fw_prefix(tree, M)
        if not (total > 1e-300):
            return ST_EXTINCT, n, ucur, t
        if acc[A_TNEXT] < 0.0:
            acc[A_TNEXT] = t - np.log(1.0 - u[ucur]) / (total * N2)
            ucur += 1
        tn = acc[A_TNEXT]
        if timedep and tn > acc[A_TREF] and acc[A_TREF] <= t_stop:
            tr = acc[A_TREF]
            _integrate(par, acc, t, tr)
            t = tr
            refresh_tilts(tree, base, w, dsn, acc, phi(par, t))
            acc[A_TREF] = tr + par[P_DTMAX]
            acc[A_TNEXT] = -1.0
            continue
        if tn > t_stop:
            _integrate(par, acc, t, t_stop)
            return ST_TIME, n, ucur, t_stop
        _integrate(par, acc, t, tn)
        t = tn
        acc[A_TNEXT] = -1.0
        target = u[ucur] * total
        ucur += 1
        s = fw_find(tree, target)
        if s >= M or w[s] <= 0.0:
            # rounding fallback: linear scan
            run = 0.0
            s = -1
            for q in range(M):
                if w[q] > 0.0:
                    s = q
                    run += w[q]
                    if run > target:
                        break
            if s < 0:
                return ST_EXTINCT, n, ucur, t
        ph = phi(par, t)
        acc[A_LOGTILT] += ph * dsn[s]
        if not apply_slot(G, ext, G0, par, bumps, tree, base, w, dsn, acc, pgeo, s, ph, out):
            return ST_CAPACITY, n, ucur, t
        if record:
            ev_t[n] = t
            ev_code[n] = out[0]
            ev_val[n, 0] = out[1]
            ev_val[n, 1] = out[2]
            ev_val[n, 2] = out[3]
        n += 1
        ext[E_UPD] += 1
        if ext[E_UPD] % REBUILD_EVERY == 0:
            fw_build(tree, w)
            gs = 0.0
            bs = 0.0
            for q in range(M):
                gs += w[q] - base[q]
                bs += base[q]
            acc[A_GSUM] = gs
            acc[A_BSUM] = bs
        if par[P_R0SQ] > 0.0 and ext[E_DL1] > par[P_R0SQ] * N2:
            return ST_GUARD, n, ucur, t
        if ext[E_AREA] < par[P_AREA_STOP]:
            return ST_AREA, n, ucur, t


@njit(cache=True)
def export_edges(G, ext):
    """Clockwise direction codes (0 R, 1 D, 2 L, 3 U) from L1 and its coordinates."""
    off = ext[E_OFF]
    top = ext[E_JMAX]
    bot = ext[E_JMIN]
    n = 2 * (top - bot + 1)  # one U and one D per row
    # horizontal edges: top + bottom lengths + row-to-row shifts on both sides
    nh = (G[1, top + off] - G[0, top + off] + 1) + (G[1, bot + off] - G[0, bot + off] + 1)
    for j in range(bot, top):
        r = j + off
        nh += abs(G[1, r + 1] - G[1, r]) + abs(G[0, r + 1] - G[0, r])
    out = np.empty(n + nh, dtype=np.int8)
    p = 0
    lo = G[0, top + off]
    hi = G[1, top + off]
    for _ in range(hi - lo + 1):
        out[p] = 0
        p += 1
    for j in range(top, bot - 1, -1):
        out[p] = 1
        p += 1
        if j > bot:
            h1 = G[1, j + off]
            h2 = G[1, j - 1 + off]
            d = 0 if h2 > h1 else 2
            for _ in range(abs(h2 - h1)):
                out[p] = d
                p += 1
    for _ in range(G[1, bot + off] - G[0, bot + off] + 1):
        out[p] = 2
        p += 1
    for j in range(bot, top + 1):
        out[p] = 3
        p += 1
        if j < top:
            l1 = G[0, j + off]
            l2 = G[0, j + 1 + off]
            d = 2 if l2 < l1 else 0
            for _ in range(abs(l2 - l1)):
                out[p] = d
                p += 1
    return out, lo, top + 1
