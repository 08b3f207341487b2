"""JSON-lines traces and ledgers, JSON reports, CSV sweeps.

Trace file: one round per line, keys ``a``, ``b``, ``mu``, ``x``.
Ledger file: a header line ``{"K0": ...}``, then one line per round with
the trace keys plus ``M`` (tickets), ``K`` (capital after the round),
``discard`` and, when known, ``log_floor``. Floats are written with 17
significant digits, so reading a file back yields identical values.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .protocol import CapitalLedger, Forecast, LedgerEntry, Round, Trace

_TRACE_KEYS = ("a", "b", "mu", "x")


def fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x!r}")
    text = format(x, ".17g")
    # Keep a float literal so that -0.0 survives the JSON round trip.
    return text if any(c in text for c in ".e") else text + ".0"


def _line(pairs: Iterable[tuple[str, float]]) -> str:
    return "{" + ", ".join(f'"{k}": {fmt(v)}' for k, v in pairs) + "}\n"


def _round_pairs(rnd: Round):
    f = rnd.forecast
    return [("a", f.lower), ("b", f.upper), ("mu", f.mean), ("x", rnd.outcome)]


def dumps_trace(trace: Trace) -> str:
    return "".join(_line(_round_pairs(r)) for r in trace)


def loads_trace(text: str) -> Trace:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        rec = json.loads(line)
        try:
            rows.append(tuple(float(rec[k]) for k in _TRACE_KEYS))
        except KeyError as exc:
            raise ValueError(f"line {lineno}: missing key {exc}") from None
    return Trace.from_rows(rows)


def dumps_ledger(trace: Trace, ledger: CapitalLedger, log_floors: Sequence[float] | None = None) -> str:
    if len(trace) != len(ledger):
        raise ValueError("trace and ledger lengths differ")
    out = [_line([("K0", ledger.initial)])]
    for n, (rnd, e) in enumerate(zip(trace, ledger.entries)):
        pairs = _round_pairs(rnd) + [("M", e.tickets), ("K", e.capital_after), ("discard", e.discarded)]
        if log_floors is not None:
            pairs.append(("log_floor", log_floors[n]))
        out.append(_line(pairs))
    return "".join(out)


def loads_ledger(text: str) -> tuple[Trace, CapitalLedger]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty ledger file")
    initial = float(json.loads(lines[0])["K0"])
    rows, entries = [], []
    for line in lines[1:]:
        rec = json.loads(line)
        rows.append(tuple(float(rec[k]) for k in _TRACE_KEYS))
        entries.append(LedgerEntry(float(rec["M"]), float(rec["K"]), float(rec.get("discard", 0.0))))
    return Trace.from_rows(rows), CapitalLedger(initial, tuple(entries))


def write_trace(path, trace: Trace) -> None:
    Path(path).write_text(dumps_trace(trace))


def read_trace(path) -> Trace:
    return loads_trace(Path(path).read_text())


def write_ledger(path, trace: Trace, ledger: CapitalLedger, log_floors=None) -> None:
    Path(path).write_text(dumps_ledger(trace, ledger, log_floors))


def read_ledger(path) -> tuple[Trace, CapitalLedger]:
    return loads_ledger(Path(path).read_text())


def dumps_report(report: dict) -> str:
    # json uses the shortest repr that round-trips each float.
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=False) + "\n"


def dumps_csv(rows: list[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for row in rows:
        w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def forecast_from_dict(d: dict) -> Forecast:
    return Forecast(float(d["a"]), float(d["b"]), float(d["mu"]))
