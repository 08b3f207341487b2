"""Exact upper probabilities for small discretized games.

Reality is restricted to a finite outcome grid per round, which can only
weaken her, so the values computed here are lower bounds on the upper
probability of the interval game. Grid points, prices and thresholds are
converted to exact rationals through their shortest decimal repr; backward
induction then runs in exact :class:`~fractions.Fraction` arithmetic, with
states keyed by the exact centered sum.

Caps: ``horizon <= MAX_HORIZON`` and ``m <= MAX_GRID`` points per round.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import EmptyGrid, InvalidForecast, StateExplosion
from .events import DeviationEvent
from .protocol import Forecast
from .strategies import hedge_ratio

MAX_HORIZON = 6
MAX_GRID = 9
MAX_STATES = 200_000


def exact(x) -> Fraction:
    if isinstance(x, (Fraction, int)):
        return Fraction(x)
    return Fraction(repr(float(x)))


@dataclass(frozen=True)
class DiscretizedGame:
    forecasts: tuple[Forecast, ...]
    grids: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.forecasts) != len(self.grids):
            raise ValueError("one outcome grid per round is required")
        if len(self.forecasts) > MAX_HORIZON:
            raise StateExplosion(f"horizon {len(self.forecasts)} exceeds cap N <= {MAX_HORIZON}")
        for n, (f, grid) in enumerate(zip(self.forecasts, self.grids), start=1):
            f.validate()
            if len(grid) > MAX_GRID:
                raise StateExplosion(f"round {n}: grid size {len(grid)} exceeds cap m <= {MAX_GRID}")
            if len(grid) < 2:
                raise EmptyGrid(f"round {n}: grid needs at least 2 points")
            lo, hi = exact(f.lower), exact(f.upper)
            if min(grid) != lo or max(grid) != hi:
                raise InvalidForecast(f"round {n}: grid must contain both endpoints and stay inside them")

    @property
    def horizon(self) -> int:
        return len(self.forecasts)

    @property
    def widths(self) -> list[float]:
        return [f.width for f in self.forecasts]

    @classmethod
    def uniform(cls, forecasts: Forecast | Sequence[Forecast], m: int, horizon: int | None = None) -> "DiscretizedGame":
        """``m`` evenly spaced outcomes per round, endpoints included."""
        if isinstance(forecasts, Forecast):
            forecasts = [forecasts] * (1 if horizon is None else horizon)
        if m < 2:
            raise EmptyGrid("grid needs at least 2 points")
        if m > MAX_GRID:
            raise StateExplosion(f"grid size {m} exceeds cap m <= {MAX_GRID}")
        grids = []
        for f in forecasts:
            lo, hi = exact(f.lower), exact(f.upper)
            grids.append(tuple(lo + (hi - lo) * k / (m - 1) for k in range(m)))
        return cls(tuple(forecasts), tuple(grids))

    @classmethod
    def from_grids(cls, forecasts: Sequence[Forecast], grids: Sequence[Sequence[float]]) -> "DiscretizedGame":
        return cls(tuple(forecasts), tuple(tuple(sorted(set(exact(x) for x in g))) for g in grids))


def envelope_minimum(slopes, intercepts, reverse: bool = False):
    """Minimize ``max_i intercepts[i] + slopes[i] * M`` over real ``M``.

    Walks the upper envelope of the lines in slope order and returns
    ``(value, M)`` at the breakpoint where the envelope's slope changes
    sign. With ``reverse`` the envelope is built from the other side; the
    value is the same. The minimum must exist (slopes of both signs).
    """
    if not slopes:
        raise EmptyGrid("no lines")
    sign = -1 if reverse else 1
    best = {}
    for s, c in zip(slopes, intercepts):
        s = sign * s
        if s not in best or c > best[s]:
            best[s] = c
    lines = sorted(best.items())
    if lines[0][0] > 0 or lines[-1][0] < 0:
        raise ValueError("objective unbounded below; need slopes of both signs")
    hull: list[tuple] = []
    for s3, c3 in lines:
        while len(hull) >= 2:
            (s1, c1), (s2, c2) = hull[-2], hull[-1]
            # Middle line never strictly on top once l1 and l3 cross first.
            if (c1 - c3) * (s2 - s1) <= (c1 - c2) * (s3 - s1):
                hull.pop()
            else:
                break
        hull.append((s3, c3))
    k = next(i for i, (s, _) in enumerate(hull) if s >= 0)
    s_k, c_k = hull[k]
    if k == 0:  # only possible when the flattest line is horizontal
        return c_k, 0 * s_k
    s_p, c_p = hull[k - 1]
    m_star = (c_p - c_k) / (s_k - s_p)
    value = c_k if s_k == 0 else c_k + s_k * m_star
    return value, sign * m_star


def one_round_solve(payoff: Callable, forecast: Forecast, grid: Sequence, reverse: bool = False):
    """Cheapest hedge of ``payoff`` over one round: ``(price, tickets)``.

    The price is ``inf_M max_x [payoff(x) - M (x - mean)]`` over grid ``x``.
    """
    if not len(grid):
        raise EmptyGrid("empty outcome grid")
    mu = exact(forecast.mean)
    slopes = [-(exact(x) - mu) for x in grid]
    intercepts = [payoff(x) for x in grid]
    return envelope_minimum(slopes, intercepts, reverse=reverse)


def one_round_upper_expectation(payoff: Callable, forecast: Forecast, grid: Sequence, reverse: bool = False):
    return one_round_solve(payoff, forecast, grid, reverse)[0]


def _reachable_sums(game: DiscretizedGame) -> list[list[Fraction]]:
    stages = [[Fraction(0)]]
    for f, grid in zip(game.forecasts, game.grids):
        mu = exact(f.mean)
        nxt = sorted({s + x - mu for s in stages[-1] for x in grid})
        if len(nxt) > MAX_STATES:
            raise StateExplosion(f"{len(nxt)} states exceeds cap {MAX_STATES}")
        stages.append(nxt)
    return stages


def value_tables(game: DiscretizedGame, event: DeviationEvent, reverse: bool = False) -> list[dict]:
    """Per-stage map from exact centered sum to exact upper probability."""
    if event.horizon != game.horizon:
        raise ValueError("event horizon differs from game horizon")
    target = event.horizon * exact(event.threshold)
    stages = _reachable_sums(game)
    tables: list[dict] = [None] * (game.horizon + 1)
    tables[-1] = {s: Fraction(int(s >= target)) for s in stages[-1]}
    for n in range(game.horizon - 1, -1, -1):
        f, grid = game.forecasts[n], game.grids[n]
        mu = exact(f.mean)
        nxt = tables[n + 1]
        table = {}
        for s in stages[n]:
            vals = [nxt[s + x - mu] for x in grid]
            if min(vals) == max(vals):
                table[s] = vals[0]
            else:
                table[s] = one_round_upper_expectation(
                    lambda x, s=s: nxt[s + x - mu], f, grid, reverse)
        tables[n] = table
    return tables


def upper_probability(game: DiscretizedGame, event: DeviationEvent, exact_value: bool = False):
    value = value_tables(game, event)[0][Fraction(0)]
    return value if exact_value else float(value)


def strategy_value(game: DiscretizedGame, event: DeviationEvent, h: float) -> float:
    """Initial capital the fixed Hoeffding hedge needs to reach 1 on ``event``.

    Worst case over grid play, with all surplus kept: at each state the
    requirement is ``max_x need(next) / (1 + r (x - mean))`` where ``r`` is
    the hedge's tickets per unit capital.
    """
    if event.horizon != game.horizon:
        raise ValueError("event horizon differs from game horizon")
    target = event.horizon * exact(event.threshold)
    stages = _reachable_sums(game)
    need = {s: float(s >= target) for s in stages[-1]}
    for n in range(game.horizon - 1, -1, -1):
        f, grid = game.forecasts[n], game.grids[n]
        mu = exact(f.mean)
        r = hedge_ratio(f, h)
        need = {
            s: max(need[s + x - mu] / (1.0 + r * float(x - mu)) for x in grid)
            for s in stages[n]
        }
    return need[Fraction(0)]
