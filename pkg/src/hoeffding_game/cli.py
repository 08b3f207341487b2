"""Command-line front end.

Exit codes: 0 success, 1 a verification/sandwich check failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import oracle, verify
from .bounds import c_from_widths, hoeffding_bound, montecarlo_report
from .config import ConfigError, load_config
from .errors import GameError, StateExplosion
from .events import DeviationEvent
from .protocol import Forecast
from .serialize import dumps_csv, dumps_report, write_ledger, write_trace
from .strategies import GameConfig, RealityPolicy, ScheduleForecaster, run_hoeffding_sceptic
from .supermartingale import REL_TOL, dominance_audit, log_process_path

ORACLE_COLUMNS = ("N", "m", "t", "upper_probability", "strategy_value", "hoeffding_bound", "sandwich")


class UsageError(Exception):
    pass


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
        return v
    return conv


def _float_list(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_simulate(args) -> int:
    cfg = load_config(args.config, seed=args.seed)
    trace, ledger = run_hoeffding_sceptic(cfg)
    h = cfg.hedge_h()
    logs = log_process_path(trace, h)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    write_trace(out / "trace.jsonl", trace)
    write_ledger(out / "ledger.jsonl", trace, ledger, logs[1:].tolist())
    audit = dominance_audit(trace, ledger, h, rel_tol=args.tol)
    summary = {
        "N": cfg.horizon,
        "h": h,
        "final_capital": ledger.final,
        "log_floor": float(logs[-1]),
        "floor": ledger.initial * math.exp(logs[-1]),
        "audit_passed": audit.passed,
        "min_slack": audit.min_slack,
        "seed": cfg.master_seed,
    }
    sys.stdout.write(dumps_report(summary))
    return 0 if audit.passed else 1


def cmd_verify(args) -> int:
    import numpy as np

    h_values = np.linspace(args.h_min, args.h_max, args.h_count)
    if args.fuzz and args.seed is None:
        raise UsageError("--fuzz needs --seed")
    report = verify.run_verification(
        a_values=args.a_values, b_values=args.b_values, h_values=h_values,
        x_count=args.x_count, fuzz=args.fuzz, seed=args.seed, rel_tol=args.tol,
    )
    _emit(dumps_report(report), args.out)
    for c in report["checks"]:
        if not c["passed"]:
            print(f"FAIL {c['check']}: slack {c['min_slack']!r} at {c['worst_tuple']}", file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_bound(args) -> int:
    if (args.C is None) == (args.widths is None):
        raise UsageError("give exactly one of --C or --widths")
    if args.widths is not None:
        if len(args.widths) != args.N:
            raise UsageError(f"--widths has {len(args.widths)} entries, expected N={args.N}")
        if any(w <= 0 for w in args.widths):
            raise UsageError("widths must be positive")
        c = c_from_widths(args.widths)
    else:
        c = args.C
    br = hoeffding_bound(DeviationEvent(args.N, args.t), c)
    report = {"N": args.N, "t": args.t, "C": c, **br.to_dict()}
    _emit(dumps_report(report), args.out)
    return 0


def oracle_row(game: oracle.DiscretizedGame, t: float, m: int, tol: float = 1e-9) -> dict:
    event = DeviationEvent(game.horizon, t)
    c = c_from_widths(game.widths)
    br = hoeffding_bound(event, c)
    up = oracle.upper_probability(game, event)
    sv = oracle.strategy_value(game, event, br.optimal_h)
    ok = up <= sv and sv <= br.bound + tol
    return {
        "N": game.horizon, "m": m, "t": t, "C": c,
        "upper_probability": up, "strategy_value": sv,
        "hoeffding_bound": br.bound, "optimal_h": br.optimal_h,
        "sandwich": "PASS" if ok else "FAIL",
    }


def cmd_oracle(args) -> int:
    a, b, mu = args.forecast
    try:
        game = oracle.DiscretizedGame.uniform(Forecast(a, b, mu), args.m, horizon=args.N)
    except StateExplosion as exc:
        raise UsageError(str(exc)) from None
    rows = [oracle_row(game, t, args.m, args.tol) for t in args.t]
    if args.format == "csv":
        text = dumps_csv(rows, ORACLE_COLUMNS)
    else:
        grid = [float(x) for x in game.grids[0]]
        docs = [{**r, "grid": grid} for r in rows]
        text = dumps_report(docs[0] if len(docs) == 1 else docs)
    _emit(text, args.out)
    return 0 if all(r["sandwich"] == "PASS" for r in rows) else 1


def cmd_montecarlo(args) -> int:
    if args.config:
        cfg = load_config(args.config, seed=args.seed)
        if cfg.event is None and args.t is None:
            raise UsageError("config has no event; pass --t")
        event = DeviationEvent(cfg.horizon, args.t) if args.t is not None else cfg.event
    else:
        if args.N is None or args.forecast is None or args.t is None:
            raise UsageError("without --config, --N, --forecast and --t are required")
        if args.seed is None:
            raise UsageError("--seed is required for Monte Carlo runs")
        f = Forecast(*args.forecast)
        reality = RealityPolicy("iid", distribution=args.distribution, seed=args.seed)
        event = DeviationEvent(args.N, args.t)
        cfg = GameConfig(args.N, ScheduleForecaster.constant(f, args.N), reality, event=event,
                         master_seed=args.seed)
    if cfg.master_seed is None:
        raise UsageError("--seed (or master_seed in the config) is required")
    report = montecarlo_report(cfg, event, args.replicates, cfg.master_seed, n_jobs=args.jobs)
    if args.format == "csv":
        text = dumps_csv([report], list(report))
    else:
        text = dumps_report(report)
    _emit(text, args.out)
    return 0 if report["dominated"] else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hoeffding-game", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=False):
        sp.add_argument("--seed", type=int, default=None, help="master seed")
        sp.add_argument("--out", default=None, help="output path")
        sp.add_argument("--tol", type=float, default=REL_TOL, help="relative tolerance")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    sp = sub.add_parser("simulate", help="play the Hoeffding sceptic through a configured game")
    sp.add_argument("--config", required=True)
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("verify", help="check the proof inequalities on a grid")
    sp.add_argument("--a-values", type=_float_list, default=list(verify.DEFAULT_A))
    sp.add_argument("--b-values", type=_float_list, default=list(verify.DEFAULT_B))
    sp.add_argument("--h-min", type=float, default=-5.0)
    sp.add_argument("--h-max", type=float, default=5.0)
    sp.add_argument("--h-count", type=int, default=41)
    sp.add_argument("--x-count", type=int, default=verify.DEFAULT_X_COUNT)
    sp.add_argument("--fuzz", type=int, default=0, help="extra random tuples (needs --seed)")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("bound", help="Hoeffding tail bound and optimal h")
    sp.add_argument("--N", type=_positive(int), required=True)
    sp.add_argument("--t", type=_positive(float), required=True)
    sp.add_argument("--C", type=_positive(float))
    sp.add_argument("--widths", type=_float_list)
    common(sp)
    sp.set_defaults(func=cmd_bound)

    sp = sub.add_parser("oracle", help="exact upper probability on a discretized game")
    sp.add_argument("--N", type=_positive(int), required=True)
    sp.add_argument("--forecast", type=float, nargs=3, metavar=("A", "B", "MU"), required=True)
    sp.add_argument("--m", type=int, required=True, help="grid points per round")
    sp.add_argument("--t", type=_positive(float), nargs="+", required=True)
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("montecarlo", help="seeded event frequency versus the bound")
    sp.add_argument("--config")
    sp.add_argument("--N", type=_positive(int))
    sp.add_argument("--forecast", type=float, nargs=3, metavar=("A", "B", "MU"))
    sp.add_argument("--distribution", choices=("uniform", "two_point"), default="uniform")
    sp.add_argument("--t", type=_positive(float))
    sp.add_argument("--replicates", type=_positive(int), default=100_000)
    sp.add_argument("--jobs", type=_positive(int), default=1)
    common(sp, fmt=True)
    sp.set_defaults(func=cmd_montecarlo)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, GameError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
