"""Shared generators for the tests."""

import math

import numpy as np

from ckmc.kmc_engine import Engine, SimConfig
from ckmc.lattice_curve import (
    CornerFlip, IllegalMove, PoleDelete, PoleGrow, apply_move, discretize_shape, disk, pole_table,
)


def reachable_curves(N, beta, count, seed, events_between=7, radius=0.4, min_edges=16):
    """Curves visited by unbiased trajectories, sampled every few events.

    A trajectory restarts from the disk once its length drops below ``min_edges``.
    """
    start = discretize_shape(disk(radius), N)
    replica = 0

    def fresh():
        cfg = SimConfig(N=N, beta=beta, horizon_T=math.inf, seed=seed, replica=replica,
                        record_events=False)
        return Engine(start, cfg)

    eng = fresh()
    out = [eng.curve()]
    while len(out) < count:
        eng.advance(math.inf, max_events=events_between)
        if eng.terminal or len(eng.curve()) < min_edges:
            replica += 1
            eng = fresh()
        out.append(eng.curve())
    return out


def legal_moves(curve):
    """All legal moves by brute force over vertices and poles."""
    out = []
    for v in curve.vertices:
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
    poles, _ = pole_table(curve)
    for p in poles:
        if p.p == 2:
            try:
                apply_move(curve, PoleDelete(p.k))
                out.append(PoleDelete(p.k))
            except IllegalMove:
                pass
        dx = np.sign(p.R[0] - p.L[0])
        dy = np.sign(p.R[1] - p.L[1])
        for m in range(1, p.p):
            out.append(PoleGrow(p.k, (p.L[0] + m * dx, p.L[1] + m * dy)))
    return out
