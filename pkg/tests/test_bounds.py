import math

import numpy as np
import pytest

from hoeffding_game.bounds import (
    guaranteed_growth_on_event,
    hoeffding_bound,
    log_growth,
    monte_carlo_frequency,
    optimal_h,
)
from hoeffding_game.errors import InvalidEvent, LengthMismatch, NonpositiveC, ZeroReplicates
from hoeffding_game.events import DeviationEvent
from hoeffding_game.protocol import Forecast
from hoeffding_game.strategies import GameConfig, RealityPolicy, ScheduleForecaster, run_hoeffding_sceptic
from hoeffding_game.supermartingale import hoeffding_log_process

# exp(-1/2), exp(-1/5) and exp(-1/8), mpmath 30 digits
E_M_HALF = 0.60653065971263342360
E_M_FIFTH = 0.81873075307798184958
E_M_EIGHTH = 0.88249690258459540286


def test_bound_examples():
    r = hoeffding_bound(DeviationEvent(1, 1e-12), 1.0)
    assert r.bound == pytest.approx(1.0, abs=1e-20)
    r = hoeffding_bound(DeviationEvent(1, 1.0), 4.0)
    assert r.bound == pytest.approx(E_M_HALF, rel=1e-15)
    assert r.optimal_h == 1.0
    r = hoeffding_bound(DeviationEvent(10, 0.1), 10.0)
    assert r.bound == pytest.approx(E_M_FIFTH, rel=1e-14)
    assert r.optimal_h == pytest.approx(0.4, rel=1e-15)


def test_bound_report_invariants():
    r = hoeffding_bound(DeviationEvent(50, 2.0), 1e-3)
    assert r.log_bound == pytest.approx(-2e7)
    assert r.bound == 0.0 and r.log_bound <= 0
    r = hoeffding_bound(DeviationEvent(3, 0.5), 7.0)
    assert r.bound == math.exp(r.log_bound) and r.bound <= 1


@pytest.mark.parametrize("c", [0.0, -1.0, float("nan"), float("inf")])
def test_nonpositive_c(c):
    with pytest.raises(NonpositiveC):
        hoeffding_bound(DeviationEvent(1, 1.0), c)
    with pytest.raises(NonpositiveC):
        optimal_h(DeviationEvent(1, 1.0), c)


@pytest.mark.parametrize("t", [0.0, -0.5, float("nan")])
def test_event_rejects_nonpositive_threshold(t):
    with pytest.raises(InvalidEvent):
        DeviationEvent(3, t)


def test_optimal_h_examples():
    ev = DeviationEvent(1, 0.5)
    assert optimal_h(ev, 1.0) == 2.0
    for n, t, c in [(1, 0.5, 1.0), (7, 0.3, 2.5), (40, 0.05, 11.0)]:
        ev = DeviationEvent(n, t)
        h = optimal_h(ev, c)
        assert log_growth(h, ev, c) == pytest.approx(-hoeffding_bound(ev, c).log_bound, rel=1e-12)
        grid = np.linspace(0, 2 * h, 1001)
        g = grid * n * t - grid ** 2 * c / 8
        assert log_growth(h, ev, c) >= g.max() * (1 - 1e-12)
        assert abs(grid[np.argmax(g)] - h) <= grid[1] - grid[0]


def test_guaranteed_growth_examples():
    ev = DeviationEvent(1, 1.0)
    assert guaranteed_growth_on_event(ev, [2.0], 0.0) == 0.0
    assert guaranteed_growth_on_event(ev, [2.0], 1.0) == 0.5
    with pytest.raises(LengthMismatch):
        guaranteed_growth_on_event(ev, [1.0, 1.0], 1.0)


def test_growth_tight_on_equality_trace():
    n, t, w = 6, 0.25, 1.5
    ev = DeviationEvent(n, t)
    rows = [(-w / 2, w / 2, 0.0, t)] * n
    from hoeffding_game.protocol import Trace
    trace = Trace.from_rows(rows)
    h = 0.9
    assert hoeffding_log_process(trace, h).log_value == pytest.approx(
        guaranteed_growth_on_event(ev, [w] * n, h), rel=1e-14)


def test_monotonicity():
    cs = [0.5, 1.0, 4.0, 9.0]
    ts = [0.05, 0.1, 0.4, 1.0]
    ns = [1, 2, 5, 20]
    for c in cs:
        for n in ns:
            vals = [hoeffding_bound(DeviationEvent(n, t), c).log_bound for t in ts]
            assert all(x > y for x, y in zip(vals, vals[1:]))
        for t in ts:
            vals = [hoeffding_bound(DeviationEvent(n, t), c).log_bound for n in ns]
            assert all(x > y for x, y in zip(vals, vals[1:]))
    for n in ns:
        for t in ts:
            vals = [hoeffding_bound(DeviationEvent(n, t), c).log_bound for c in cs]
            assert all(x < y for x, y in zip(vals, vals[1:]))


def _mc_game(forecast, n, dist="uniform", seed=0):
    return GameConfig(n, ScheduleForecaster.constant(forecast, n), RealityPolicy("iid", distribution=dist, seed=seed))


def test_monte_carlo_impossible_event():
    g = _mc_game(Forecast(-1, 1, 0), 4)
    res = monte_carlo_frequency(g, DeviationEvent(4, 1.5), 5000, master_seed=1)
    assert res.frequency == 0.0 and res.hits == 0


def test_monte_carlo_uniform_tail():
    g = _mc_game(Forecast(-1, 1, 0), 1)
    ev = DeviationEvent(1, 0.5)
    res = monte_carlo_frequency(g, ev, 40_000, master_seed=2)
    assert abs(res.frequency - 0.25) <= 3 * res.stderr
    assert hoeffding_bound(ev, 4.0).bound == pytest.approx(E_M_EIGHTH, rel=1e-14)


def test_monte_carlo_errors_and_determinism():
    g = _mc_game(Forecast(0, 1, 0.5), 3, dist="two_point")
    ev = DeviationEvent(3, 0.1)
    with pytest.raises(ZeroReplicates):
        monte_carlo_frequency(g, ev, 0, 1)
    a = monte_carlo_frequency(g, ev, 30_000, 9, n_jobs=1)
    b = monte_carlo_frequency(g, ev, 30_000, 9, n_jobs=3)
    assert a == b
    assert monte_carlo_frequency(g, ev, 30_000, 10) != a


def test_adversarial_capital_certifies_bound():
    for n, f, t in [(5, Forecast(-1, 1, 0), 0.6), (12, Forecast(0, 3, 1.0), 1.5), (3, Forecast(-2, 1, 0.5), 0.5)]:
        ev = DeviationEvent(n, t)
        reality = RealityPolicy("adversarial_max_sum", target=ev)
        game = GameConfig(n, ScheduleForecaster.constant(f, n), reality, event=ev)
        trace, ledger = run_hoeffding_sceptic(game)
        c = n * f.width ** 2
        if ev.occurred(sum(r.outcome - r.forecast.mean for r in trace)):
            assert ledger.final >= math.exp(2 * n * n * t * t / c) * (1 - 1e-9)
