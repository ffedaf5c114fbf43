"""Continuous-time simulation of the contour dynamics."""

from .bias import BiasField, Bump
from .engine import (
    Engine,
    Extinct,
    RateCatalog,
    SimConfig,
    TrajectoryRecord,
    decode_event,
    encode_move,
    event_log_end,
    enumerate_catalog,
    format_event,
    generator_action,
    log_rnd,
    make_rng,
    move_blocks,
    parse_event,
    read_events,
    replay,
    replica_seed,
    run,
    step,
    tilt_factor,
    write_events,
)
from .fenwick import FenwickSampler, LinearSampler
from ..lattice_curve import stationary_log_weight

__all__ = [
    "BiasField", "Bump", "Engine", "Extinct", "RateCatalog", "SimConfig", "TrajectoryRecord",
    "decode_event", "encode_move", "event_log_end", "enumerate_catalog", "format_event", "generator_action",
    "log_rnd", "make_rng", "move_blocks", "parse_event", "read_events", "replay",
    "replica_seed", "run", "step", "tilt_factor", "write_events", "FenwickSampler",
    "LinearSampler", "stationary_log_weight",
]
