"""Command-line entry point ``ckmc``."""

from __future__ import annotations

import argparse
import itertools
import math
import sys
from pathlib import Path

import numpy as np

from ..continuum import weak_form_residual_lattice
from ..kmc_engine.bias import BiasField
from ..kmc_engine.engine import (
    SimConfig, enumerate_catalog, event_log_end, read_events, replay, run,
)
from ..lattice_curve import CurveError, fmt_float, read_snapshot, to_snapshot, validate
from ..pole_zrp import ZrpError, exact_height_log_pmf, exact_p2_expectation, simulate_zrp, u_crit
from .config import ConfigError, override, read_config
from .orchestrate import SUMMARY_HEADER, load_records, orchestrate, summary_lines

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _out(text: str = "") -> None:
    sys.stdout.write(text + "\n")


def _err(text: str) -> None:
    sys.stderr.write(text + "\n")


# -- subcommands ------------------------------------------------------------------

def cmd_simulate(a) -> int:
    cfg = read_config(a.config)
    if a.replicas is not None:
        cfg = cfg.with_values(replicas=a.replicas)
    out = Path(a.out) if a.out else Path(cfg.directory)
    res = orchestrate(cfg, out, base=Path(a.config).resolve().parent)
    _out(SUMMARY_HEADER)
    for line in summary_lines(res.summary):
        _out(line)
    for i, msg in sorted(res.summary.failures.items()):
        _err(f"replica {i} failed:\n{msg}")
    return EXIT_OK if res.ok else EXIT_RUNTIME


def cmd_sweep(a) -> int:
    cfg = read_config(a.config)
    axes: list[tuple[str, list[str]]] = []
    for item in a.assignments:
        if "=" not in item:
            raise UsageError(f"expected key=v1,v2,... got {item!r}")
        key, vals = item.split("=", 1)
        parts = [v for v in vals.split(",") if v]
        if len(parts) == 1:
            cfg = override(cfg, key, parts[0])
        else:
            axes.append((key, parts))
    out = Path(a.out) if a.out else Path(cfg.directory)
    out.mkdir(parents=True, exist_ok=True)
    keys = [k for k, _ in axes]
    header = ",".join(keys + [SUMMARY_HEADER])
    rows = []
    ok = True
    for n, combo in enumerate(itertools.product(*[v for _, v in axes])):
        c = cfg
        for k, v in zip(keys, combo):
            c = override(c, k, v)
        res = orchestrate(c, out / f"combo_{n}", base=Path(a.config).resolve().parent)
        ok &= res.ok
        prefix = ",".join(combo) + ("," if combo else "")
        rows.extend(summary_lines(res.summary, prefix))
    with open(out / "sweep_summary.csv", "w", newline="\n") as fh:
        fh.write(header + "\n")
        for r in rows:
            fh.write(r + "\n")
    _out(header)
    for r in rows:
        _out(r)
    return EXIT_OK if ok else EXIT_RUNTIME


def cmd_zrp_exact(a) -> int:
    lp = exact_height_log_pmf(a.ell, a.beta, a.q_max)
    _out(f"ell={a.ell} beta={fmt_float(a.beta)} p2={fmt_float(exact_p2_expectation(a.ell, a.beta))} "
         f"mode={int(np.argmax(lp))} q_c={fmt_float(u_crit(a.beta) * a.ell)}")
    if a.pmf_out:
        with open(a.pmf_out, "w", newline="\n") as fh:
            fh.write("q,pmf,logpmf\n")
            for q, v in enumerate(lp):
                fh.write(f"{q},{fmt_float(math.exp(v))},{fmt_float(v)}\n")
    return EXIT_OK


def cmd_zrp_sim(a) -> int:
    st = simulate_zrp(a.ell, a.beta, a.events, a.seed)
    exact = exact_height_log_pmf(a.ell, a.beta)
    _out("ell,beta,events,p2_mean,p2_stderr,p2_exact,tv_to_exact,cap_hit_fraction")
    _out(f"{a.ell},{fmt_float(a.beta)},{a.events},{fmt_float(st.p2_mean)},"
         f"{fmt_float(st.p2_stderr)},{fmt_float(exact_p2_expectation(a.ell, a.beta))},"
         f"{fmt_float(st.tv_distance(np.exp(exact)))},{fmt_float(st.cap_hit_fraction)}")
    return EXIT_OK


def _parse_gdict(spec: str) -> list[BiasField]:
    out = []
    for part in spec.split(";"):
        g = BiasField.from_spec(part)
        if g is None:
            raise UsageError(f"empty test function in {spec!r}")
        out.append(g)
    return out


def cmd_verify_weakform(a) -> int:
    recs = load_records(a.record)
    bias = None
    cfg_path = Path(a.record) / "config.ini"
    if not cfg_path.exists():
        cfg_path = Path(a.record).parent / "config.ini"
    if a.bias is not None:
        bias = BiasField.from_spec(a.bias)
    elif cfg_path.exists():
        bias = read_config(cfg_path).bias
    beta = a.beta if a.beta is not None else recs[0].beta
    _out("G_id,residual,stat_error")
    for gid, G in enumerate(_parse_gdict(a.gdict)):
        vals = np.array([weak_form_residual_lattice(r, G, beta, a.eps, bias) for r in recs])
        se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else math.nan
        _out(f"{gid},{fmt_float(float(vals.mean()))},{fmt_float(se)}")
    return EXIT_OK


def cmd_rate_eval(a) -> int:
    curve, beta_snap, t_snap = read_snapshot(a.snapshot)
    beta = a.beta if a.beta is not None else beta_snap
    bias = BiasField.from_spec(a.bias) if a.bias else None
    t = a.t if a.t is not None else t_snap
    cat = enumerate_catalog(curve, beta, bias, t)
    _out("move,base_rate,rate")
    for (m, r), b in zip(cat.entries, cat.base_rates):
        _out(f"{m!r},{fmt_float(b)},{fmt_float(r)}")
    _out(f"# total {fmt_float(cat.total_rate)} over {len(cat)} moves")
    return EXIT_OK


def cmd_rnd_martingale(a) -> int:
    cfg = read_config(a.config)
    if cfg.bias is None:
        raise ConfigError(f"{a.config}: rnd-martingale needs a [bias] field")
    n = a.replicas if a.replicas is not None else cfg.replicas
    init = cfg.initial_curve(Path(a.config).resolve().parent)
    w = []
    for i in range(n):
        sim = cfg.sim_config(i)
        if a.dual:
            rec = run(SimConfig(**{**sim.__dict__, "bias": None}), init)
            eng = replay(rec.initial, sim, rec.event_t, rec.event_code, rec.event_val, rec.t_final)
            w.append(math.exp(cfg.N * eng.log_rnd()))
        else:
            rec = run(sim, init)
            w.append(math.exp(-cfg.N * rec.log_rnd))
    w = np.array(w)
    se = float(w.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    _out("mode,replicas,mean,stderr,z")
    z = (w.mean() - 1.0) / se if se > 0 else math.nan
    _out(f"{'dual' if a.dual else 'tilted'},{n},{fmt_float(float(w.mean()))},{fmt_float(se)},"
         f"{fmt_float(float(z))}")
    return EXIT_OK if not (abs(z) > 3) else EXIT_VALIDATION


def cmd_replay(a) -> int:
    curve, beta, t0 = read_snapshot(a.snapshot0)
    ev_t, ev_c, ev_v = read_events(a.events)
    t_end = a.t_end
    if t_end is None:
        t_end = event_log_end(a.events)
    if t_end is None:
        t_end = float(ev_t[-1]) if len(ev_t) else t0
    bias = BiasField.from_spec(a.bias) if a.bias else None
    cfg = SimConfig(N=curve.N, beta=beta, horizon_T=t_end, bias=bias, record_events=False)
    eng = replay(curve, cfg, ev_t, ev_c, ev_v, t_end)
    text = to_snapshot(eng.curve(), beta, t_end)
    if a.out:
        with open(a.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if a.expect:
        with open(a.expect) as fh:
            if fh.read() != text:
                _err("replayed snapshot differs from the expected one")
                return EXIT_VALIDATION
    return EXIT_OK


def cmd_validate(a) -> int:
    try:
        curve, _, _ = read_snapshot(a.snapshot)
    except (CurveError, ValueError) as exc:
        _err(f"invalid snapshot: {exc}")
        return EXIT_VALIDATION
    rep = validate(curve)
    if rep.ok:
        _out("ok")
        return EXIT_OK
    for v in rep.violations:
        _err(f"violation: {v}")
    return EXIT_VALIDATION


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ckmc", description="Contour dynamics simulator and checks.")
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)

    s = sub.add_parser("simulate", help="run the replicas of a config file")
    s.add_argument("config")
    s.add_argument("--out")
    s.add_argument("--replicas", type=int)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("sweep", help="run a config over a grid of key values")
    s.add_argument("config")
    s.add_argument("assignments", nargs="*", help="key=v1,v2,...")
    s.add_argument("--out")
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("zrp-exact", help="exact pole-window height law")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--q-max", type=int)
    s.add_argument("--pmf-out")
    s.set_defaults(func=cmd_zrp_exact)

    s = sub.add_parser("zrp-sim", help="simulate the pole-window chain")
    s.add_argument("--ell", type=int, required=True)
    s.add_argument("--beta", type=float, required=True)
    s.add_argument("--events", type=int, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_zrp_sim)

    s = sub.add_parser("verify-weakform", help="weak-form residuals of stored runs")
    s.add_argument("--record", required=True)
    s.add_argument("--beta", type=float)
    s.add_argument("--eps", type=float, default=0.05)
    s.add_argument("--gdict", required=True, help="bump(...); bump(...); ...")
    s.add_argument("--bias")
    s.set_defaults(func=cmd_verify_weakform)

    s = sub.add_parser("rate-eval", help="list the rate catalog of a snapshot")
    s.add_argument("--snapshot", required=True)
    s.add_argument("--beta", type=float)
    s.add_argument("--bias")
    s.add_argument("--t", type=float)
    s.set_defaults(func=cmd_rate_eval)

    s = sub.add_parser("rnd-martingale", help="mean of the likelihood-ratio weights")
    s.add_argument("config")
    s.add_argument("--replicas", type=int)
    s.add_argument("--dual", action="store_true", help="sample untilted, weight by D")
    s.set_defaults(func=cmd_rnd_martingale)

    s = sub.add_parser("replay", help="re-apply an event log to an initial snapshot")
    s.add_argument("events")
    s.add_argument("snapshot0")
    s.add_argument("--out")
    s.add_argument("--t-end", type=float)
    s.add_argument("--bias")
    s.add_argument("--expect", help="snapshot that the result must equal byte for byte")
    s.set_defaults(func=cmd_replay)

    s = sub.add_parser("validate", help="check a snapshot's curve invariants")
    s.add_argument("snapshot")
    s.set_defaults(func=cmd_validate)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        if not getattr(a, "func", None):
            raise UsageError("missing subcommand")
        return a.func(a)
    except UsageError as exc:
        _err(f"usage error: {exc}")
        _err(parser.format_usage().rstrip())
        return EXIT_USAGE
    except (ConfigError, CurveError, ZrpError) as exc:
        _err(f"error: {exc}")
        return EXIT_VALIDATION
    except (OSError, RuntimeError, ValueError) as exc:
        _err(f"runtime error: {exc}")
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
