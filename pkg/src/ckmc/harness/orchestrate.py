"""Replica runs, the on-disk output tree, and summary aggregation."""

from __future__ import annotations

import math
import os
import shutil
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..kmc_engine.engine import TrajectoryRecord, read_events, event_log_end, run, write_events
from ..lattice_curve import LatticeCurve, fmt_float, read_snapshot, write_snapshot
from ..observables import Observables, WindowError, analysis_window, series
from .config import RunConfig, write_config
from .stats import SummaryStats

SUMMARY_HEADER = "name,window_t0,window_t1,mean,stderr,n_replicas"


def worker_count(n_tasks: int) -> int:
    env = os.environ.get("CKMC_THREADS")
    cap = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(cap, n_tasks))


def _observer_for(cfg: RunConfig) -> Observables | None:
    names = list(cfg.observables)
    if not names:
        return None
    if "area" not in names:
        names.insert(0, "area")
    return Observables.from_names(names)


def replica_summary(record: TrajectoryRecord, names) -> SummaryStats:
    st = SummaryStats()
    if record.status == "extinct":
        st.extinction_times.append(record.t_final)
    try:
        t0, t1 = analysis_window(record)
    except WindowError:
        return st
    for name in names:
        try:
            v = series(record, name).time_average(t0, t1)
        except (KeyError, WindowError):
            continue
        st.add(name, v, (t0, t1))
    return st


def write_record(record: TrajectoryRecord, rdir: Path, beta: float) -> None:
    rdir.mkdir(parents=True, exist_ok=True)
    write_events(rdir / "events.log", record.event_t, record.event_code, record.event_val,
                 t_end=record.t_final)
    sdir = rdir / "snapshots"
    sdir.mkdir(exist_ok=True)
    for k, (t, c) in enumerate(record.snapshots):
        write_snapshot(sdir / f"snap_{k:05d}.txt", c, beta, t)
    write_snapshot(rdir / "final.snap", record.final, beta, record.t_final)
    names = sorted(record.samples)
    with open(rdir / "observables.csv", "w", newline="\n") as fh:
        fh.write(",".join(["t", *names]) + "\n")
        if names:
            ts = record.samples[names[0]][0]
            for q, t in enumerate(ts):
                fh.write(",".join([fmt_float(t)] + [fmt_float(float(record.samples[n][1][q]))
                                                    for n in names]) + "\n")


@dataclass
class ReplicaResult:
    index: int
    summary: SummaryStats
    status: str
    t_final: float
    n_events: int
    log_rnd: float
    final_area: float
    error: str | None = None


def run_replica(cfg: RunConfig, index: int, out: Path | None, base: Path | None) -> ReplicaResult:
    try:
        obs = _observer_for(cfg)
        rec = run(cfg.sim_config(index), cfg.initial_curve(base), [obs] if obs else [])
        if out is not None:
            write_record(rec, out / f"replica_{index}", cfg.beta)
        summ = replica_summary(rec, cfg.observables)
        return ReplicaResult(index, summ, rec.status, rec.t_final, rec.n_events, rec.log_rnd,
                             rec.final_area_blocks / cfg.N**2)
    except Exception:
        s = SummaryStats()
        s.failures[index] = traceback.format_exc(limit=3)
        return ReplicaResult(index, s, "failed", math.nan, 0, math.nan, math.nan,
                             traceback.format_exc(limit=3))


def _run_replica_args(args):
    return run_replica(*args)


@dataclass
class RunResult:
    summary: SummaryStats
    replicas: list[ReplicaResult]

    @property
    def ok(self) -> bool:
        return not self.summary.partial


def orchestrate(cfg: RunConfig, out: Path | str | None = None, base: Path | None = None,
                workers: int | None = None) -> RunResult:
    """Run all replicas and merge their summaries in replica order."""
    out_p = None if out is None else Path(out)
    if out_p is not None:
        if out_p.exists():
            shutil.rmtree(out_p)
        out_p.mkdir(parents=True)
        write_config(out_p / "config.ini", cfg)
    tasks = [(cfg, i, out_p, base) for i in range(cfg.replicas)]
    n = worker_count(len(tasks)) if workers is None else workers
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            results = list(ex.map(_run_replica_args, tasks))
    else:
        results = [run_replica(*a) for a in tasks]
    results.sort(key=lambda r: r.index)
    summary = SummaryStats()
    for r in results:
        summary = summary.merge(r.summary)
    if out_p is not None:
        write_summary(out_p / "summary.csv", summary)
        with open(out_p / "replicas.csv", "w", newline="\n") as fh:
            fh.write("replica,status,t_final,n_events,log_rnd,final_area\n")
            for r in results:
                fh.write(f"{r.index},{r.status},{fmt_float(r.t_final)},{r.n_events},"
                         f"{fmt_float(r.log_rnd)},{fmt_float(r.final_area)}\n")
        for r in results:
            if r.error:
                (out_p / f"replica_{r.index}").mkdir(exist_ok=True)
                (out_p / f"replica_{r.index}" / "FAILED").write_text(r.error)
    return RunResult(summary, results)


def summary_lines(summary: SummaryStats, prefix: str = "") -> list[str]:
    return [prefix + ",".join([name, fmt_float(t0), fmt_float(t1), fmt_float(m), fmt_float(se),
                               str(n)])
            for name, t0, t1, m, se, n in summary.rows()]


def write_summary(path, summary: SummaryStats) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for line in summary_lines(summary):
            fh.write(line + "\n")


# -- reading output back ------------------------------------------------------------

@dataclass
class StoredRecord:
    """Snapshots and event log of one replica directory."""

    path: Path
    snapshots: list[tuple[float, LatticeCurve]]
    t_final: float
    beta: float

    @property
    def initial(self) -> LatticeCurve:
        return self.snapshots[0][1]

    @property
    def final(self) -> LatticeCurve:
        return self.snapshots[-1][1]

    def events(self):
        return read_events(self.path / "events.log")


def load_replica(rdir) -> StoredRecord:
    rdir = Path(rdir)
    files = sorted((rdir / "snapshots").glob("snap_*.txt"))
    if not files:
        raise FileNotFoundError(f"no snapshots under {rdir}")
    snaps = []
    beta = math.nan
    for f in files:
        c, beta, t = read_snapshot(f)
        snaps.append((t, c))
    t_end = event_log_end(rdir / "events.log") if (rdir / "events.log").exists() else None
    return StoredRecord(rdir, snaps, snaps[-1][0] if t_end is None else t_end, beta)


def load_records(path) -> list[StoredRecord]:
    """A replica directory or a run directory holding ``replica_<i>`` folders."""
    p = Path(path)
    if (p / "snapshots").is_dir():
        return [load_replica(p)]
    dirs = sorted((d for d in p.glob("replica_*") if d.is_dir()),
                  key=lambda d: int(d.name.split("_")[1]))
    if not dirs:
        raise FileNotFoundError(f"no replica directories under {p}")
    return [load_replica(d) for d in dirs]


__all__ = [
    "orchestrate", "run_replica", "replica_summary", "write_record", "write_summary",
    "RunResult", "ReplicaResult", "StoredRecord", "load_replica", "load_records",
    "worker_count", "SUMMARY_HEADER",
]
