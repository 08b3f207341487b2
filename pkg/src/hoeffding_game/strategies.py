"""Policies for Sceptic, Forecaster and Reality, and a game driver.

Policies only ever see the prefix of rounds already played, plus the moves
announced earlier in the current round; the driver never exposes the future.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import InvalidForecast, NegativeCapital, NonpositiveC, NonpositiveWidth
from .events import DeviationEvent
from .protocol import CapitalLedger, Forecast, GameState, Trace, new_game, play_round

REALITY_KINDS = ("iid", "adversarial_max_sum", "replay")
DISTRIBUTIONS = ("uniform", "two_point")


@dataclass(frozen=True)
class HedgeParams:
    """Exponent parameter for the Hoeffding sceptic.

    ``h`` may be left ``None`` when ``known_c`` is given; it is then fixed
    from the target event as ``4 N t / C`` when the game starts.
    """

    h: float | None = None
    known_c: float | None = None

    def __post_init__(self):
        if self.h is not None and not math.isfinite(self.h):
            raise ValueError(f"h must be finite, got {self.h!r}")
        if self.known_c is not None and not self.known_c >= 0:
            raise ValueError(f"known_c must be >= 0, got {self.known_c!r}")
        if self.h is None and self.known_c is None:
            raise ValueError("need h or known_c")

    def resolve(self, event: DeviationEvent | None = None, c_total: float | None = None) -> float:
        if self.h is not None:
            return self.h
        if event is None:
            raise ValueError("known_c hedge needs a target event to fix h")
        c = self.known_c if c_total is None else c_total
        if not c > 0:
            raise NonpositiveC(f"C must be > 0, got {c!r}")
        return 4.0 * event.horizon * event.threshold / c


def hedge_ratio(forecast: Forecast, h: float) -> float:
    """Tickets bought per unit of capital under the Hoeffding hedge."""
    width = forecast.upper - forecast.lower
    if not width > 0:
        raise NonpositiveWidth(f"interval width {width!r} <= 0")
    lo = forecast.lower - forecast.mean
    hi = forecast.upper - forecast.mean
    q = h * h * width * width / 8.0
    # exp(-q) folded into each exponent so large |h| cannot overflow.
    return (math.exp(h * hi - q) - math.exp(h * lo - q)) / width


def hedge_tickets(capital: float, forecast: Forecast, h: float) -> float:
    """Ticket count ``M_n`` that turns ``capital`` into at least
    ``capital * exp(h (x - mean) - h^2 width^2 / 8)`` for every outcome."""
    if capital < 0:
        raise NegativeCapital(f"capital {capital!r} < 0")
    return capital * hedge_ratio(forecast, h)


def adversarial_reality(prefix: Trace, forecast: Forecast, target: DeviationEvent | None = None) -> float:
    """Outcome pushing the centered sum furthest toward a ``>=`` threshold."""
    return forecast.upper


# --- Forecaster -----------------------------------------------------------


@dataclass(frozen=True)
class ScheduleForecaster:
    """Oblivious Forecaster announcing a fixed list of forecasts.

    ``known_c`` is set by :meth:`budget`, where only the total of squared
    widths is promised in advance.
    """

    forecasts: tuple[Forecast, ...]
    known_c: float | None = None

    def __call__(self, prefix: Trace) -> Forecast:
        return self.forecasts[len(prefix)]

    def __len__(self) -> int:
        return len(self.forecasts)

    @classmethod
    def constant(cls, forecast: Forecast, horizon: int) -> "ScheduleForecaster":
        return cls((forecast,) * horizon)

    @classmethod
    def budget(cls, c_total: float, horizon: int, seed: int, center: float = 0.0) -> "ScheduleForecaster":
        """Random symmetric intervals whose squared widths sum to ``c_total``."""
        if not c_total > 0:
            raise NonpositiveC(f"C must be > 0, got {c_total!r}")
        rng = np.random.default_rng(seed)
        shares = rng.dirichlet(np.ones(horizon)) if horizon else np.zeros(0)
        widths = np.sqrt(shares * c_total)
        fcs = tuple(Forecast(center - w / 2, center + w / 2, center) for w in widths)
        return cls(fcs, known_c=float(c_total))


# --- Reality --------------------------------------------------------------


def sample_outcomes(distribution: str, rng: np.random.Generator, lower, upper, mean, size=None):
    """Draw outcomes in ``[lower, upper]`` (broadcasting over rounds).

    ``two_point`` puts all mass on the endpoints with mean exactly ``mean``.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    u = rng.random(size if size is not None else lower.shape)
    if distribution == "uniform":
        return np.minimum(lower + (upper - lower) * u, upper)
    if distribution == "two_point":
        p_upper = (np.asarray(mean, dtype=float) - lower) / (upper - lower)
        return np.where(u < p_upper, upper, lower)
    raise ValueError(f"unknown distribution {distribution!r}")


@dataclass(frozen=True)
class RealityPolicy:
    kind: str
    distribution: str = "uniform"
    seed: int | None = None
    outcomes: tuple[float, ...] = ()
    target: DeviationEvent | None = None

    def __post_init__(self):
        if self.kind not in REALITY_KINDS:
            raise ValueError(f"unknown reality kind {self.kind!r}")
        if self.kind == "iid":
            if self.distribution not in DISTRIBUTIONS:
                raise ValueError(f"unknown distribution {self.distribution!r}")
            if self.seed is None:
                raise ValueError("stochastic reality needs an explicit seed")

    @property
    def stochastic(self) -> bool:
        return self.kind == "iid"

    def __call__(self, prefix: Trace, forecast: Forecast, tickets: float | None = None) -> float:
        if self.kind == "replay":
            return float(self.outcomes[len(prefix)])
        if self.kind == "adversarial_max_sum":
            return adversarial_reality(prefix, forecast, self.target)
        # Round-indexed stream: the draw is a function of (seed, round) only.
        rng = np.random.default_rng([self.seed, len(prefix)])
        x = sample_outcomes(self.distribution, rng, forecast.lower, forecast.upper, forecast.mean)
        return float(x)


# --- Sceptic and driver ---------------------------------------------------

ScepticFn = Callable[[float, Trace, Forecast], float]


@dataclass(frozen=True)
class HoeffdingSceptic:
    h: float

    def __call__(self, capital: float, prefix: Trace, forecast: Forecast) -> float:
        return hedge_tickets(capital, forecast, self.h)


@dataclass(frozen=True)
class GameConfig:
    horizon: int
    forecaster: ScheduleForecaster
    reality: RealityPolicy
    sceptic: HedgeParams | None = None
    event: DeviationEvent | None = None
    master_seed: int | None = None

    def __post_init__(self):
        if len(self.forecaster) != self.horizon:
            raise ValueError(
                f"forecast schedule has {len(self.forecaster)} rounds, horizon is {self.horizon}"
            )
        if self.reality.kind == "replay" and len(self.reality.outcomes) != self.horizon:
            raise ValueError("replay outcomes must have one entry per round")
        for n, f in enumerate(self.forecaster.forecasts, start=1):
            try:
                f.validate()
            except InvalidForecast as exc:
                raise InvalidForecast(f"round {n}: {exc}") from None

    @property
    def forecasts(self) -> tuple[Forecast, ...]:
        return self.forecaster.forecasts

    def c_total(self) -> float:
        """``C``: the promised budget when only C is known, else from the schedule."""
        if self.forecaster.known_c is not None:
            return self.forecaster.known_c
        return math.fsum((f.upper - f.lower) ** 2 for f in self.forecasts)

    def hedge_h(self) -> float:
        params = self.sceptic or HedgeParams(known_c=self.c_total())
        return params.resolve(self.event)

    def for_run(self, run_index: int) -> "GameConfig":
        """Copy with reality seeded as ``master_seed + run_index``."""
        if not self.reality.stochastic:
            return self
        base = self.master_seed if self.master_seed is not None else self.reality.seed
        return replace(self, reality=replace(self.reality, seed=base + run_index))


def play_game(forecaster, sceptic: ScepticFn, reality, horizon: int, initial_capital: float = 1.0) -> GameState:
    """Drive ``horizon`` rounds; each player sees only what is already announced."""
    state = new_game(initial_capital)
    for _ in range(horizon):
        prefix = state.trace
        forecast = forecaster(prefix)
        tickets = sceptic(state.capital, prefix, forecast)
        outcome = reality(prefix, forecast, tickets)
        state = play_round(state, forecast, tickets, outcome)
    return state


def run_hoeffding_sceptic(game: GameConfig, h: float | None = None) -> tuple[Trace, CapitalLedger]:
    """Play the game with the Hoeffding hedge from capital 1, keeping all surplus."""
    if h is None:
        h = game.hedge_h()
    state = play_game(game.forecaster, HoeffdingSceptic(h), game.reality, game.horizon)
    return state.trace, state.ledger
