"""Hoeffding tail bound, its optimal exponent, and Monte Carlo frequencies."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import LengthMismatch, NonpositiveC, ZeroReplicates
from .events import DeviationEvent
from .strategies import GameConfig, sample_outcomes

# Replicates are drawn in fixed-size blocks; block k uses the seed sequence
# (master_seed, spawn_key=(k,)), so results never depend on the worker count.
BLOCK_SIZE = 8192


@dataclass(frozen=True)
class BoundReport:
    c_total: float
    optimal_h: float
    log_bound: float
    bound: float

    def to_dict(self) -> dict:
        return asdict(self)


def _check_c(c_total: float) -> float:
    if not (math.isfinite(c_total) and c_total > 0):
        raise NonpositiveC(f"C must be a positive real, got {c_total!r}")
    return float(c_total)


def c_from_widths(widths: Sequence[float]) -> float:
    return math.fsum(w * w for w in widths)


def optimal_h(event: DeviationEvent, c_total: float) -> float:
    """Maximizer ``4 N t / C`` of ``h N t - h^2 C / 8``."""
    c = _check_c(c_total)
    return 4.0 * event.horizon * event.threshold / c


def log_growth(h: float, event: DeviationEvent, c_total: float) -> float:
    return h * event.horizon * event.threshold - h * h * c_total / 8.0


def hoeffding_bound(event: DeviationEvent, c_total: float) -> BoundReport:
    c = _check_c(c_total)
    n, t = event.horizon, event.threshold
    log_bound = -2.0 * n * n * t * t / c
    return BoundReport(c, optimal_h(event, c), log_bound, math.exp(log_bound))


def guaranteed_growth_on_event(event: DeviationEvent, per_round_widths: Sequence[float], h: float) -> float:
    """Lower bound on the log process over every trace in ``event``."""
    if len(per_round_widths) != event.horizon:
        raise LengthMismatch(
            f"{len(per_round_widths)} widths for a horizon of {event.horizon}"
        )
    return log_growth(h, event, c_from_widths(per_round_widths))


class MonteCarloResult(NamedTuple):
    frequency: float
    stderr: float
    hits: int
    replicates: int


def _block_hits(k, n_rows, seed, distribution, lower, upper, mean, event):
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(k,)))
    x = sample_outcomes(distribution, rng, lower, upper, mean, size=(n_rows, lower.size))
    sums = (x - mean).sum(axis=1)
    return int(np.count_nonzero(event.occurred(sums)))


def monte_carlo_frequency(
    game: GameConfig,
    event: DeviationEvent,
    replicates: int,
    master_seed: int,
    n_jobs: int = 1,
) -> MonteCarloResult:
    """Fraction of seeded replicates landing in ``event``.

    Reality must be ``iid``. Hit counts are integers summed per block, so
    the result is identical for any ``n_jobs``.
    """
    if replicates <= 0:
        raise ZeroReplicates("need at least one replicate")
    if game.reality.kind != "iid":
        raise ValueError("Monte Carlo needs a stochastic (iid) reality policy")
    if event.horizon != game.horizon:
        raise LengthMismatch("event horizon differs from game horizon")
    rows = np.array([(f.lower, f.upper, f.mean) for f in game.forecasts], dtype=float)
    lower, upper, mean = rows.T
    sizes = [min(BLOCK_SIZE, replicates - s) for s in range(0, replicates, BLOCK_SIZE)]
    args = [(k, n, master_seed, game.reality.distribution, lower, upper, mean, event)
            for k, n in enumerate(sizes)]
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            hits = sum(pool.map(lambda a: _block_hits(*a), args))
    else:
        hits = sum(_block_hits(*a) for a in args)
    f = hits / replicates
    return MonteCarloResult(f, math.sqrt(f * (1 - f) / replicates), hits, replicates)


def montecarlo_report(game: GameConfig, event: DeviationEvent, replicates: int,
                      master_seed: int, n_jobs: int = 1) -> dict:
    c = game.c_total()
    br = hoeffding_bound(event, c)
    mc = monte_carlo_frequency(game, event, replicates, master_seed, n_jobs)
    return {
        "N": event.horizon,
        "t": event.threshold,
        "C": c,
        "optimal_h": br.optimal_h,
        "bound": br.bound,
        "log_bound": br.log_bound,
        "frequency": mc.frequency,
        "log_frequency": math.log(mc.frequency) if mc.hits else None,
        "stderr": mc.stderr,
        "hits": mc.hits,
        "replicates": replicates,
        "seed": master_seed,
        "dominated": mc.frequency <= br.bound + 3 * mc.stderr,
    }
