"""Deterministic agent-based simulation of organisational behaviour.

Three built-in models (ant foraging, retail floor, team communication)
run on a shared discrete-time engine, driven by JSON scenarios through an
experiment harness with replicated batches and statistical comparison.
"""

__version__ = "0.1.0"

from .engine import RunResult, WorldState, advance, new_world, run, tick, world_fingerprint
from .rng import RngStream, RngStreams

__all__ = [
    "RngStream",
    "RngStreams",
    "RunResult",
    "WorldState",
    "advance",
    "new_world",
    "run",
    "tick",
    "world_fingerprint",
    "__version__",
]
