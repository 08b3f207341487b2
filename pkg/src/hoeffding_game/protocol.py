"""The game of forecasting bounded variables as a pure-value state machine.

Each round Forecaster announces ``[lower, upper]`` and a price ``mean``,
Sceptic buys ``tickets`` paying the outcome, Reality picks the outcome
inside the interval, and Sceptic may throw away a nonnegative ``discard``.
Every operation returns a new :class:`GameState`; nothing is mutated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InvalidForecast, NegativeDiscard, OutcomeOutOfRange


@dataclass(frozen=True)
class Forecast:
    """Forecaster's move: interval endpoints and the ticket price.

    Construction does not validate, so that illegal traces can still be
    represented and reported on by :func:`validate_trace`.
    """

    lower: float
    upper: float
    mean: float

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def problems(self) -> list[tuple[str, str]]:
        vals = (self.lower, self.upper, self.mean)
        if not all(math.isfinite(v) for v in vals):
            return [("non_finite", f"non-finite forecast {vals}")]
        out = []
        if not self.lower < self.upper:
            out.append(("width", f"lower={self.lower!r} must be < upper={self.upper!r}"))
        if not self.lower < self.mean < self.upper:
            out.append(
                ("interior_mean", f"mean={self.mean!r} not strictly inside "
                 f"({self.lower!r}, {self.upper!r})")
            )
        return out

    def validate(self) -> "Forecast":
        probs = self.problems()
        if probs:
            raise InvalidForecast("; ".join(msg for _, msg in probs))
        return self


@dataclass(frozen=True)
class Round:
    forecast: Forecast
    outcome: float

    def problems(self) -> list[tuple[str, str]]:
        out = self.forecast.problems()
        f = self.forecast
        if not math.isfinite(self.outcome):
            out.append(("non_finite", f"non-finite outcome {self.outcome!r}"))
        elif not f.lower <= self.outcome <= f.upper:
            out.append(
                ("range", f"outcome={self.outcome!r} outside [{f.lower!r}, {f.upper!r}]")
            )
        return out


@dataclass(frozen=True)
class Trace:
    """Ordered rounds; an element of the sample space."""

    rounds: tuple[Round, ...] = ()

    def __len__(self) -> int:
        return len(self.rounds)

    def __iter__(self) -> Iterator[Round]:
        return iter(self.rounds)

    def __getitem__(self, i):
        return self.rounds[i]

    @property
    def horizon(self) -> int:
        return len(self.rounds)

    def extend(self, rnd: Round) -> "Trace":
        return Trace(self.rounds + (rnd,))

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[float, float, float, float]]) -> "Trace":
        """Build a trace from ``(lower, upper, mean, outcome)`` tuples."""
        return cls(tuple(Round(Forecast(a, b, mu), x) for a, b, mu, x in rows))


@dataclass(frozen=True)
class LedgerEntry:
    tickets: float
    capital_after: float
    discarded: float = 0.0


@dataclass(frozen=True)
class CapitalLedger:
    initial: float
    entries: tuple[LedgerEntry, ...] = ()

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def capitals(self) -> list[float]:
        """Capital path ``K_0, K_1, ..., K_N``."""
        return [self.initial] + [e.capital_after for e in self.entries]

    @property
    def final(self) -> float:
        return self.entries[-1].capital_after if self.entries else self.initial


@dataclass(frozen=True)
class Violation:
    round_index: int  # 1-based
    kind: str
    message: str


@dataclass(frozen=True)
class GameState:
    ledger: CapitalLedger
    trace: Trace = field(default_factory=Trace)

    @property
    def capital(self) -> float:
        return self.ledger.final

    @property
    def round(self) -> int:
        """Index of the next round to be played (1-based)."""
        return len(self.trace) + 1


def new_game(initial_capital: float) -> GameState:
    # Any real K_0 is legal, including zero and negative values.
    return GameState(CapitalLedger(float(initial_capital)))


def play_round(
    state: GameState,
    forecast: Forecast,
    tickets: float,
    outcome: float,
    discard: float = 0.0,
) -> GameState:
    """Play one round and return the successor state.

    Raises :class:`InvalidForecast`, :class:`OutcomeOutOfRange` or
    :class:`NegativeDiscard` when a move is illegal.
    """
    forecast.validate()
    if not (math.isfinite(outcome) and forecast.lower <= outcome <= forecast.upper):
        raise OutcomeOutOfRange(
            f"round {state.round}: outcome {outcome!r} outside "
            f"[{forecast.lower!r}, {forecast.upper!r}]"
        )
    if not discard >= 0:
        raise NegativeDiscard(f"round {state.round}: discard {discard!r} < 0")
    capital = state.capital + tickets * (outcome - forecast.mean) - discard
    entry = LedgerEntry(float(tickets), capital, float(discard))
    ledger = CapitalLedger(state.ledger.initial, state.ledger.entries + (entry,))
    return GameState(ledger, state.trace.extend(Round(forecast, outcome)))


def replay(
    initial_capital: float,
    trace: Trace,
    tickets: Iterable[float],
    discards: Iterable[float] | None = None,
) -> GameState:
    """Re-run a recorded game through :func:`play_round`."""
    tickets = list(tickets)
    discards = [0.0] * len(tickets) if discards is None else list(discards)
    state = new_game(initial_capital)
    for rnd, m, d in zip(trace, tickets, discards, strict=True):
        state = play_round(state, rnd.forecast, m, rnd.outcome, d)
    return state


def validate_trace(trace: Trace) -> list[Violation]:
    """Every invariant violation in ``trace``; empty iff the trace is legal."""
    report = []
    for n, rnd in enumerate(trace, start=1):
        for kind, msg in rnd.problems():
            report.append(Violation(n, kind, msg))
    return report
