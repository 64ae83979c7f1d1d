"""Scenario documents: strict JSON schema, defaults, and model construction.

A scenario is one JSON object holding the common run fields (name, model,
seed, ticks, replications, metric_interval) plus the named model's
parameters at top level. Validation is strict: unknown keys anywhere are
rejected by name, and out-of-range values report the field and its bounds,
so a diff between two scenario files is always meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Optional

from .errors import ConfigError, RangeError
from .models.ants import AntForaging, ForagingParams
from .models.retail import AGE_BANDS, RetailFloor, RetailParams
from .models.teams import ROUND_ROBIN, TeamComms, TeamsParams

MODEL_NAMES = ("ant_foraging", "retail", "team_comms")

_REQUIRED = object()


class _Doc:
    """A dict view that tracks consumed keys and reports leftovers."""

    def __init__(self, doc: Any, path: str = ""):
        if not isinstance(doc, dict):
            where = path or "scenario"
            raise ConfigError(f"{where} must be a JSON object")
        self._doc = dict(doc)
        self._path = path

    def _name(self, key: str) -> str:
        return f"{self._path}.{key}" if self._path else key

    def take(self, key: str, default: Any = _REQUIRED) -> Any:
        if key in self._doc:
            return self._doc.pop(key)
        if default is _REQUIRED:
            raise ConfigError(f"missing required key '{self._name(key)}'")
        return default

    def take_int(self, key: str, default: Any = _REQUIRED,
                 lo: Optional[int] = None, hi: Optional[int] = None) -> int:
        v = self.take(key, default)
        if v is default and default is not _REQUIRED:
            return v
        if isinstance(v, bool) or not isinstance(v, int):
            raise ConfigError(f"'{self._name(key)}' must be an integer, got {v!r}")
        _check_range(self._name(key), v, lo, hi)
        return v

    def take_float(self, key: str, default: Any = _REQUIRED,
                   lo: Optional[float] = None, hi: Optional[float] = None) -> float:
        v = self.take(key, default)
        if v is default and default is not _REQUIRED:
            return v
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ConfigError(f"'{self._name(key)}' must be a number, got {v!r}")
        _check_range(self._name(key), v, lo, hi)
        return float(v)

    def take_str(self, key: str, default: Any = _REQUIRED,
                 choices: Optional[tuple] = None) -> str:
        v = self.take(key, default)
        if v is default and default is not _REQUIRED:
            return v
        if not isinstance(v, str):
            raise ConfigError(f"'{self._name(key)}' must be a string, got {v!r}")
        if choices and v not in choices:
            raise RangeError(f"'{self._name(key)}' must be one of {list(choices)}, got {v!r}")
        return v

    def take_bool(self, key: str, default: Any = _REQUIRED) -> bool:
        v = self.take(key, default)
        if v is default and default is not _REQUIRED:
            return v
        if not isinstance(v, bool):
            raise ConfigError(f"'{self._name(key)}' must be a boolean, got {v!r}")
        return v

    def take_list(self, key: str, default: Any = _REQUIRED) -> list:
        v = self.take(key, default)
        if v is default and default is not _REQUIRED:
            return v
        if not isinstance(v, list):
            raise ConfigError(f"'{self._name(key)}' must be a list, got {v!r}")
        return v

    def child(self, key: str, default: Optional[dict] = None) -> "_Doc":
        v = self.take(key, dict(default) if default is not None else _REQUIRED)
        return _Doc(v, self._name(key))

    def finish(self) -> None:
        if self._doc:
            key = sorted(self._doc)[0]
            raise ConfigError(f"unknown key '{self._name(key)}'")


def _check_range(name: str, v, lo, hi) -> None:
    if lo is not None and v < lo:
        bound = f"[{lo}, {hi}]" if hi is not None else f"[{lo}, inf)"
        raise RangeError(f"'{name}' = {v} out of range {bound}")
    if hi is not None and v > hi:
        bound = f"[{lo}, {hi}]" if lo is not None else f"(-inf, {hi}]"
        raise RangeError(f"'{name}' = {v} out of range {bound}")


def _take_cell(doc: _Doc, key: str, default: Any = _REQUIRED) -> tuple[int, int]:
    v = doc.take_list(key, default)
    if v is default and default is not _REQUIRED:
        return v
    if len(v) != 2 or any(isinstance(c, bool) or not isinstance(c, int) for c in v):
        raise ConfigError(f"'{key}' must be a [x, y] pair of integers, got {v!r}")
    return (v[0], v[1])


@dataclass(frozen=True)
class Scenario:
    name: str
    model: str
    seed: int
    ticks: int
    replications: int
    metric_interval: int
    params: dict


def load_scenario(document: str) -> Scenario:
    """Parse and validate a scenario JSON document."""
    try:
        raw = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario is not valid JSON: {exc}") from exc
    return scenario_from_dict(raw)


def scenario_from_dict(raw: dict) -> Scenario:
    doc = _Doc(raw)
    if "model" not in doc._doc:
        raise ConfigError("missing required key 'model'")
    model = doc.take_str("model", choices=MODEL_NAMES)
    name = doc.take_str("name")
    seed = doc.take_int("seed", lo=0, hi=(1 << 64) - 1)
    ticks = doc.take_int("ticks", lo=1)
    replications = doc.take_int("replications", 1, lo=1)
    metric_interval = doc.take_int("metric_interval", 1, lo=1)
    params = _MODEL_PARSERS[model](doc)
    doc.finish()
    return Scenario(
        name=name, model=model, seed=seed, ticks=ticks,
        replications=replications, metric_interval=metric_interval, params=params,
    )


def _parse_ant_params(doc: _Doc) -> dict:
    grid = doc.child("grid", {})
    width = grid.take_int("width", 50, lo=1)
    height = grid.take_int("height", 50, lo=1)
    grid.finish()
    nest = _take_cell(doc, "nest", None) or (width // 2, height // 2)
    food = []
    for i, entry in enumerate(doc.take_list("food", [])):
        fdoc = _Doc(entry, f"food[{i}]")
        cell = _take_cell(fdoc, "cell")
        units = fdoc.take_int("units", lo=1)
        fdoc.finish()
        food.append({"cell": list(cell), "units": units})
    return {
        "grid": {"width": width, "height": height},
        "nest": list(nest),
        "food": food,
        "strategy": doc.take_str("strategy", choices=("mass", "tandem")),
        "n_ants": doc.take_int("n_ants", 50, lo=1),
        "evaporation_rate": doc.take_float("evaporation_rate", 0.005, lo=0.0, hi=1.0),
        "deposit_seek": doc.take_float("deposit_seek", 0.0, lo=0.0),
        "deposit_return": doc.take_float("deposit_return", 10.0, lo=0.0),
        "exploration_prob": doc.take_float("exploration_prob", 0.05, lo=0.0, hi=1.0),
        "smoothing_bias": doc.take_float("smoothing_bias", 0.2, lo=0.0),
        "scout_fraction": doc.take_float("scout_fraction", 0.04, lo=0.0, hi=1.0),
        "tandem_pace": doc.take_int("tandem_pace", 4, lo=1),
    }


def _parse_retail_params(doc: _Doc) -> dict:
    departments = doc.take_int("departments", 3, lo=1)
    staff = []
    for i, entry in enumerate(doc.take_list("staff", [])):
        sdoc = _Doc(entry, f"staff[{i}]")
        staff.append({
            "department": sdoc.take_int("department", lo=0, hi=departments - 1),
            "skill": sdoc.take_float("skill", 0.5, lo=0.0, hi=1.0),
            "attitude": sdoc.take_float("attitude", 0.5, lo=0.0, hi=1.0),
            "age_band": sdoc.take_str("age_band", "25_to_45", choices=AGE_BANDS),
        })
        sdoc.finish()
    manager = doc.child("manager", {})
    review_period = manager.take_int("review_period", 50, lo=1)
    min_staff_floor = manager.take_int("min_staff_floor", 1, lo=0)
    manager.finish()
    patience = doc.child("patience", {})
    patience_min = patience.take_int("min", 10, lo=0)
    patience_max = patience.take_int("max", 30, lo=patience_min)
    patience.finish()
    bands = doc.child("age_service_multiplier", {})
    multipliers = {band: bands.take_float(band, 1.0, lo=1e-9) for band in AGE_BANDS}
    bands.finish()
    return {
        "departments": departments,
        "staff": staff,
        "manager": {"review_period": review_period, "min_staff_floor": min_staff_floor},
        "patience": {"min": patience_min, "max": patience_max},
        "age_service_multiplier": multipliers,
        "arrival_rate": doc.take_float("arrival_rate", 0.3, lo=0.0),
        "browser_fraction": doc.take_float("browser_fraction", 0.5, lo=0.0, hi=1.0),
        "base_service_time": doc.take_int("base_service_time", 5, lo=1),
        "skill_speedup": doc.take_float("skill_speedup", 1.0, lo=0.0),
        "base_purchase_prob": doc.take_float("base_purchase_prob", 0.25, lo=0.0, hi=1.0),
        "attitude_weight": doc.take_float("attitude_weight", 0.3, lo=0.0),
        "goal_bonus": doc.take_float("goal_bonus", 0.3, lo=0.0),
        "impulse_prob": doc.take_float("impulse_prob", 0.1, lo=0.0, hi=1.0),
    }


def _parse_teams_params(doc: _Doc) -> dict:
    teams = []
    team_entries = doc.take_list("teams")
    if len(team_entries) < 2:
        raise ConfigError("'teams' must list at least two teams")
    for i, entry in enumerate(team_entries):
        tdoc = _Doc(entry, f"teams[{i}]")
        size = tdoc.take_int("size", lo=1)
        liaison = tdoc.take("liaison", None)
        if liaison is not None and (isinstance(liaison, bool) or not isinstance(liaison, int)):
            raise ConfigError(f"'teams[{i}].liaison' must be an integer or null")
        if liaison is not None:
            _check_range(f"teams[{i}].liaison", liaison, 0, size - 1)
        leader = tdoc.take_int("leader", 0, lo=0, hi=size - 1)
        tdoc.finish()
        teams.append({"size": size, "liaison": liaison, "leader": leader})
    facts = doc.child("facts", {})
    universe = facts.take_int("universe", 20, lo=0)
    distribution = facts.take("distribution", ROUND_ROBIN)
    if distribution != ROUND_ROBIN:
        if not isinstance(distribution, list):
            raise ConfigError("'facts.distribution' must be 'round_robin' or a list of per-team fact lists")
        if len(distribution) != len(teams):
            raise ConfigError("'facts.distribution' must list facts for every team")
    facts.finish()
    tasks = doc.child("tasks", {})
    task_count = tasks.take_int("count", 10, lo=0)
    task_k = tasks.take_int("k", 3, lo=1)
    task_deadline = tasks.take_int("deadline", 100, lo=0)
    tasks.finish()
    if task_k > universe:
        raise ConfigError(f"'tasks.k' ({task_k}) exceeds fact universe ({universe})")
    budget = doc.take("message_budget", None)
    if budget is not None and (isinstance(budget, bool) or not isinstance(budget, int)):
        raise ConfigError("'message_budget' must be an integer or null")
    if budget is not None:
        _check_range("message_budget", budget, 0, None)
    return {
        "teams": teams,
        "policy": doc.take_str("policy", "any_to_any", choices=("any_to_any", "gatewayed")),
        "facts": {"universe": universe, "distribution": distribution},
        "tasks": {"count": task_count, "k": task_k, "deadline": task_deadline},
        "capacity": doc.take_int("capacity", 2, lo=1),
        "liaison_capacity": doc.take_int("liaison_capacity", 2, lo=1),
        "trust_up": doc.take_float("trust_up", 0.05, lo=0.0),
        "trust_down": doc.take_float("trust_down", 0.02, lo=0.0),
        "drop_on_distrust": doc.take_bool("drop_on_distrust", False),
        "message_budget": budget,
    }


_MODEL_PARSERS = {
    "ant_foraging": _parse_ant_params,
    "retail": _parse_retail_params,
    "team_comms": _parse_teams_params,
}


def build_model(scenario: Scenario):
    """Instantiate the named model from a validated scenario."""
    p = scenario.params
    if scenario.model == "ant_foraging":
        params = ForagingParams(
            strategy=p["strategy"], n_ants=p["n_ants"],
            evaporation_rate=p["evaporation_rate"], deposit_seek=p["deposit_seek"],
            deposit_return=p["deposit_return"], exploration_prob=p["exploration_prob"],
            smoothing_bias=p["smoothing_bias"], scout_fraction=p["scout_fraction"],
            tandem_pace=p["tandem_pace"],
        )
        food = [(tuple(f["cell"]), f["units"]) for f in p["food"]]
        return AntForaging(p["grid"]["width"], p["grid"]["height"], tuple(p["nest"]), food, params)
    if scenario.model == "retail":
        params = RetailParams(
            arrival_rate=p["arrival_rate"], browser_fraction=p["browser_fraction"],
            base_service_time=p["base_service_time"], skill_speedup=p["skill_speedup"],
            base_purchase_prob=p["base_purchase_prob"], attitude_weight=p["attitude_weight"],
            goal_bonus=p["goal_bonus"], impulse_prob=p["impulse_prob"],
            patience_min=p["patience"]["min"], patience_max=p["patience"]["max"],
            review_period=p["manager"]["review_period"],
            min_staff_floor=p["manager"]["min_staff_floor"],
            age_service_multiplier=dict(p["age_service_multiplier"]),
        )
        staff = [(s["department"], s["skill"], s["attitude"], s["age_band"]) for s in p["staff"]]
        return RetailFloor(p["departments"], staff, params)
    if scenario.model == "team_comms":
        params = TeamsParams(
            policy=p["policy"], fact_universe=p["facts"]["universe"],
            fact_distribution=p["facts"]["distribution"],
            task_count=p["tasks"]["count"], task_k=p["tasks"]["k"],
            task_deadline=p["tasks"]["deadline"],
            capacity=p["capacity"], liaison_capacity=p["liaison_capacity"],
            trust_up=p["trust_up"], trust_down=p["trust_down"],
            drop_on_distrust=p["drop_on_distrust"], message_budget=p["message_budget"],
        )
        sizes = [t["size"] for t in p["teams"]]
        liaisons = [t["liaison"] for t in p["teams"]]
        leaders = [t["leader"] for t in p["teams"]]
        return TeamComms(sizes, liaisons, leaders, params)
    raise ConfigError(f"unknown model '{scenario.model}'")
