"""Built-in models and their scenario parameter documentation."""

from .ants import AntForaging, ForagingParams, foraging_metrics
from .retail import RetailFloor, RetailParams, retail_metrics
from .teams import TeamComms, TeamsParams, effectiveness

# Scenario keys per model, with type, bounds, and shipped defaults. Used by
# the CLI `models` command and the service /models endpoint.
PARAMETER_DOCS = {
    "ant_foraging": {
        "strategy": "one of 'mass' | 'tandem' (required)",
        "grid.width": "int >= 1 (default 50)",
        "grid.height": "int >= 1 (default 50)",
        "nest": "[x, y] cell (default grid centre)",
        "food": "list of {cell: [x, y], units: int >= 1} (default [])",
        "n_ants": "int >= 1 (default 50)",
        "evaporation_rate": "float in [0, 1] (default 0.005)",
        "deposit_seek": "float >= 0 (default 0.0)",
        "deposit_return": "float >= 0 (default 10.0)",
        "exploration_prob": "float in [0, 1] (default 0.05)",
        "smoothing_bias": "float >= 0 (default 0.2)",
        "scout_fraction": "float in [0, 1] (default 0.04; tandem scouts)",
        "tandem_pace": "int >= 1 (default 4; ticks per cell from memory)",
    },
    "retail": {
        "departments": "int >= 1 (default 3)",
        "staff": "list of {department, skill, attitude, age_band} (default [])",
        "manager.review_period": "int >= 1 (default 50)",
        "manager.min_staff_floor": "int >= 0 (default 1)",
        "arrival_rate": "float >= 0, expected customers/tick (default 0.3)",
        "browser_fraction": "float in [0, 1] (default 0.5)",
        "base_service_time": "int >= 1 ticks (default 5)",
        "skill_speedup": "float >= 0 (default 1.0)",
        "base_purchase_prob": "float in [0, 1] (default 0.25)",
        "attitude_weight": "float >= 0 (default 0.3)",
        "goal_bonus": "float >= 0 (default 0.3)",
        "impulse_prob": "float in [0, 1] (default 0.1)",
        "patience.min": "int >= 0 ticks (default 10)",
        "patience.max": "int >= patience.min (default 30)",
        "age_service_multiplier": "map age band -> float > 0 (default 1.0 each)",
    },
    "team_comms": {
        "teams": "list of {size, liaison: int|null, leader} (required, >= 2 teams)",
        "policy": "one of 'any_to_any' | 'gatewayed' (default 'any_to_any')",
        "facts.universe": "int >= 0 (default 20)",
        "facts.distribution": "'round_robin' or per-team fact lists (default 'round_robin')",
        "tasks.count": "int >= 0 (default 10)",
        "tasks.k": "int >= 1, facts per task (default 3)",
        "tasks.deadline": "int >= 0 tick (default 100)",
        "capacity": "int >= 1 messages/tick (default 2)",
        "liaison_capacity": "int >= 1 messages/tick (default 2)",
        "trust_up": "float >= 0 (default 0.05)",
        "trust_down": "float >= 0 (default 0.02)",
        "drop_on_distrust": "bool (default false)",
        "message_budget": "int >= 0 or null for unlimited (default null)",
    },
}

__all__ = [
    "AntForaging",
    "ForagingParams",
    "RetailFloor",
    "RetailParams",
    "TeamComms",
    "TeamsParams",
    "PARAMETER_DOCS",
    "foraging_metrics",
    "retail_metrics",
    "effectiveness",
]
