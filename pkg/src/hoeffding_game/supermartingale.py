"""Hoeffding's exponential process in log domain and checks of its proof.

The check functions work on scalars or broadcast over numpy arrays, so the
same code path serves single tuples and whole verification grids. Each
returns a *slack*, ``RHS - LHS`` of the inequality it verifies; a correct
implementation never sees slack below ``-tolerance(...)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadCentering, LengthMismatch, NonpositiveWidth
from .protocol import CapitalLedger, Trace

REL_TOL = 1e-9
ABS_TOL = 1e-12


def tolerance(scale, rel: float = REL_TOL, abs_floor: float = ABS_TOL):
    """Allowed negative slack for a check whose terms have magnitude ``scale``."""
    return rel * np.abs(scale) + abs_floor


def _require_centered(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not (np.all(a < 0) and np.all(b > 0)):
        raise BadCentering("centered form needs a < 0 < b")
    return a, b


def _scalar(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


@dataclass(frozen=True)
class LogProcessValue:
    log_value: float

    @property
    def value(self) -> float:
        return float(np.exp(self.log_value))


def log_increments(trace: Trace, h: float) -> np.ndarray:
    """Per-round terms ``h (x - mu) - h^2 (b - a)^2 / 8``."""
    if not len(trace):
        return np.zeros(0)
    rows = np.array(
        [(r.forecast.lower, r.forecast.upper, r.forecast.mean, r.outcome) for r in trace]
    )
    a, b, mu, x = rows.T
    return h * (x - mu) - h * h * (b - a) ** 2 / 8.0


def log_process_path(trace: Trace, h: float) -> np.ndarray:
    """Log of the process after rounds ``0..N`` (length ``N + 1``, starts at 0)."""
    return np.concatenate(([0.0], np.cumsum(log_increments(trace, h))))


def hoeffding_log_process(trace: Trace, h: float) -> LogProcessValue:
    return LogProcessValue(float(log_process_path(trace, h)[-1]))


def chord(a, b, h, x):
    """Secant of ``exp(h * .)`` through the interval endpoints, at ``x``.

    Anchored at the nearer endpoint, so the value is exact at both ends.
    """
    ea = np.exp(h * a)
    eb = np.exp(h * b)
    slope = (eb - ea) / (b - a)
    return np.where(x - a <= b - x, ea + (x - a) * slope, eb - (b - x) * slope)


def check_chord_dominance(a, b, h, x):
    """``chord(x) - exp(hx)``: nonnegative by convexity of exp."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if not np.all(b > a):
        raise NonpositiveWidth("need a < b")
    x = np.asarray(x, dtype=float)
    return _scalar(chord(a, b, h, x) - np.exp(h * x))


def goal_rhs(a, b, h, x):
    w = b - a
    return np.exp(h * h * w * w / 8.0) + x * (np.exp(h * b) - np.exp(h * a)) / w


def check_goal_inequality(a, b, h, x):
    """Slack of ``exp(hx) <= exp(h^2 (b-a)^2 / 8) + x (e^{hb} - e^{ha}) / (b-a)``."""
    a, b = _require_centered(a, b)
    return _scalar(goal_rhs(a, b, h, x) - np.exp(np.multiply(h, x)))


def check_reduced_inequality(a, b, h):
    """Slack of ``(b e^{ha} - a e^{hb}) / (b - a) <= exp(h^2 (b-a)^2 / 8)``.

    This is the goal inequality with ``exp(hx)`` replaced by the chord; it
    does not depend on ``x``, and goal slack = chord slack + this slack.
    """
    a, b = _require_centered(a, b)
    w = b - a
    return _scalar(
        np.exp(h * h * w * w / 8.0) - (b * np.exp(h * a) - a * np.exp(h * b)) / w
    )


def check_simpler_inequality(a, b, h):
    """Log form of the reduced inequality: ``h^2 (b-a)^2/8 + ln(b-a) - ln(b e^{ha} - a e^{hb})``."""
    a, b = _require_centered(a, b)
    w = b - a
    return _scalar(
        h * h * w * w / 8.0 + np.log(w) - np.log(b * np.exp(h * a) - a * np.exp(h * b))
    )


def check_quarter_bound(a, b, h):
    """Return ``(u, second_derivative)`` of ``ln(b e^{ha} - a e^{hb})`` in ``h``.

    ``u = b e^{ha} / (b e^{ha} - a e^{hb})`` lies in ``(0, 1)`` and the
    second derivative equals ``(b - a)^2 u (1 - u) <= (b - a)^2 / 4``.
    """
    a, b = _require_centered(a, b)
    p = b * np.exp(h * a)
    q = -a * np.exp(h * b)
    u = p / (p + q)
    # u(1-u) written as p q / (p + q)^2 to avoid cancellation near u = 1.
    second = (b - a) ** 2 * (p * q) / (p + q) ** 2
    return _scalar(u), _scalar(second)


def log_first_derivative(a, b, h):
    """``d/dh ln(b e^{ha} - a e^{hb})``."""
    ea = np.exp(h * a)
    eb = np.exp(h * b)
    return (a * b * ea - a * b * eb) / (b * ea - a * eb)


@dataclass(frozen=True)
class AuditReport:
    slacks: list[float]
    floors: list[float]
    tolerances: list[float]
    min_slack: float
    rel_tol: float
    abs_tol: float
    passed: bool
    worst_round: int | None

    def to_dict(self) -> dict:
        return {
            "per_round_slack": self.slacks,
            "floor": self.floors,
            "min_slack": self.min_slack,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "worst_round": self.worst_round,
            "passed": self.passed,
        }


def dominance_audit(
    trace: Trace,
    ledger: CapitalLedger,
    h: float,
    rel_tol: float = REL_TOL,
    abs_tol: float = ABS_TOL,
) -> AuditReport:
    """Check ``K_n >= K_0 exp(L_n)`` for every round ``n = 1..N``.

    ``L_n`` is the log process through round ``n``. The slack at round
    ``n`` passes when it is at least ``-(rel_tol |K_n| + abs_tol)``.
    """
    if len(trace) != len(ledger):
        raise LengthMismatch(f"trace has {len(trace)} rounds, ledger {len(ledger)}")
    logs = log_process_path(trace, h)[1:]
    caps = np.array([e.capital_after for e in ledger.entries], dtype=float)
    with np.errstate(over="ignore"):
        floors = ledger.initial * np.exp(logs)
    slacks = caps - floors
    tols = rel_tol * np.abs(caps) + abs_tol
    ok = slacks >= -tols
    if len(slacks):
        worst = int(np.argmin(slacks + tols))
        min_slack = float(slacks.min())
    else:
        worst, min_slack = None, 0.0
    return AuditReport(
        slacks=slacks.tolist(),
        floors=floors.tolist(),
        tolerances=tols.tolist(),
        min_slack=min_slack,
        rel_tol=rel_tol,
        abs_tol=abs_tol,
        passed=bool(ok.all()),
        worst_round=None if worst is None else worst + 1,
    )
