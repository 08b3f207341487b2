"""Game-theoretic Hoeffding inequality: protocol engine, Hoeffding's
supermartingale and hedge, the tail bound, and an exact small-game oracle."""

from .bounds import (
    BoundReport,
    guaranteed_growth_on_event,
    hoeffding_bound,
    monte_carlo_frequency,
    optimal_h,
)
from .events import DeviationEvent
from .oracle import DiscretizedGame, one_round_upper_expectation, strategy_value, upper_probability
from .protocol import (
    CapitalLedger,
    Forecast,
    GameState,
    LedgerEntry,
    Round,
    Trace,
    new_game,
    play_round,
    validate_trace,
)
from .strategies import (
    GameConfig,
    HedgeParams,
    RealityPolicy,
    ScheduleForecaster,
    adversarial_reality,
    hedge_tickets,
    run_hoeffding_sceptic,
)
from .supermartingale import (
    check_chord_dominance,
    check_goal_inequality,
    check_quarter_bound,
    check_simpler_inequality,
    dominance_audit,
    hoeffding_log_process,
)

__version__ = "0.1.0"
