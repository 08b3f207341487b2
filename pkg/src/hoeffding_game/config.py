"""Declarative game configuration files (JSON) and their schema.

Example::

    {
      "horizon": 5,
      "forecasts": {"constant": {"a": -1, "b": 1, "mu": 0}},
      "reality": {"kind": "iid", "distribution": "uniform"},
      "sceptic": {"h": "optimal"},
      "event": {"threshold": 0.5},
      "master_seed": 7
    }

``forecasts`` is a list of ``{"a", "b", "mu"}`` objects, ``{"constant": {...}}``
or ``{"budget": {"C": ..., "center": 0}}`` (random widths with squared sum C,
where Sceptic is told only C). ``sceptic`` is ``{"h": <number>}``,
``{"h": "optimal"}`` (``4 N t / C`` from the schedule) or
``{"known_c": <number>}`` (``4 N t / known_c``). Stochastic parts (iid
reality, budget forecasts) need ``master_seed``; there is no clock default.
"""

from __future__ import annotations

import json
from pathlib import Path

import jsonschema

from .events import DeviationEvent
from .serialize import forecast_from_dict
from .strategies import GameConfig, HedgeParams, RealityPolicy, ScheduleForecaster

_FORECAST = {
    "type": "object",
    "required": ["a", "b", "mu"],
    "properties": {k: {"type": "number"} for k in ("a", "b", "mu")},
    "additionalProperties": False,
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["horizon", "forecasts", "reality"],
    "additionalProperties": False,
    "properties": {
        "horizon": {"type": "integer", "minimum": 0},
        "forecasts": {
            "oneOf": [
                {"type": "array", "items": _FORECAST},
                {"type": "object", "required": ["constant"], "additionalProperties": False,
                 "properties": {"constant": _FORECAST}},
                {"type": "object", "required": ["budget"], "additionalProperties": False,
                 "properties": {"budget": {
                     "type": "object", "required": ["C"], "additionalProperties": False,
                     "properties": {"C": {"type": "number", "exclusiveMinimum": 0},
                                    "center": {"type": "number"}}}}},
            ]
        },
        "reality": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["iid", "adversarial_max_sum", "replay"]},
                "distribution": {"enum": ["uniform", "two_point"]},
                "outcomes": {"type": "array", "items": {"type": "number"}},
            },
        },
        "sceptic": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "h": {"oneOf": [{"type": "number"}, {"const": "optimal"}]},
                "known_c": {"type": "number", "minimum": 0},
            },
        },
        "event": {
            "type": "object",
            "required": ["threshold"],
            "additionalProperties": False,
            "properties": {"threshold": {"type": "number", "exclusiveMinimum": 0}},
        },
        "master_seed": {"type": "integer", "minimum": 0},
    },
}


class ConfigError(ValueError):
    pass


def parse_config(data: dict, seed: int | None = None) -> GameConfig:
    """Build a :class:`GameConfig`; ``seed`` overrides ``master_seed``."""
    try:
        jsonschema.validate(data, SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config {path}: {exc.message}") from None
    n = data["horizon"]
    master_seed = seed if seed is not None else data.get("master_seed")

    fc = data["forecasts"]
    if isinstance(fc, list):
        forecaster = ScheduleForecaster(tuple(forecast_from_dict(d) for d in fc))
    elif "constant" in fc:
        forecaster = ScheduleForecaster.constant(forecast_from_dict(fc["constant"]), n)
    else:
        if master_seed is None:
            raise ConfigError("budget forecasts are random: master_seed is required")
        b = fc["budget"]
        forecaster = ScheduleForecaster.budget(b["C"], n, master_seed, b.get("center", 0.0))

    r = data["reality"]
    if r["kind"] == "iid" and master_seed is None:
        raise ConfigError("iid reality is stochastic: master_seed is required")
    event = DeviationEvent(n, float(data["event"]["threshold"])) if "event" in data else None
    reality = RealityPolicy(
        kind=r["kind"],
        distribution=r.get("distribution", "uniform"),
        seed=master_seed if r["kind"] == "iid" else None,
        outcomes=tuple(float(x) for x in r.get("outcomes", ())),
        target=event,
    )

    s = data.get("sceptic", {"h": "optimal"})
    if "known_c" in s:
        sceptic = HedgeParams(known_c=float(s["known_c"]))
    elif s.get("h", "optimal") == "optimal":
        sceptic = None
    else:
        sceptic = HedgeParams(h=float(s["h"]))
    if (sceptic is None or sceptic.h is None) and event is None:
        raise ConfigError("an optimal or known_c sceptic needs an event threshold")

    try:
        return GameConfig(n, forecaster, reality, sceptic, event, master_seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, seed: int | None = None) -> GameConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(data, seed)
