"""Discrete-time simulation engine.

One engine step advances the clock by exactly one tick and updates every
live agent exactly once, in a fresh random permutation drawn from the
scheduler stream. Macro outcomes are never written by the engine itself:
all world changes happen inside per-agent rules and the model's
environment phases, and every transition leaves an event behind.

Stream ids 0-9 are reserved for the engine and model plumbing; each agent
owns the stream ``AGENT_STREAM_BASE + agent_id``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol

from .events import EventRecord, MetricSample, Scalar
from .rng import RngStream, RngStreams

STREAM_SCHEDULER = 0
STREAM_INIT = 1
STREAM_ENV = 2
STREAM_WORKLOAD = 3
AGENT_STREAM_BASE = 10


@dataclass
class SimClock:
    tick: int = 0


class TickContext:
    """Hands a model its clock, rng streams, and event sink for one phase."""

    __slots__ = ("tick", "_streams", "_log")

    def __init__(self, tick: int, streams: RngStreams, log: list[EventRecord]):
        self.tick = tick
        self._streams = streams
        self._log = log

    def emit(self, kind: str, agent_id: Optional[int] = None, **payload: Scalar) -> None:
        self._log.append(EventRecord(self.tick, agent_id, kind, payload))

    def agent_stream(self, agent_id: int) -> RngStream:
        return self._streams.stream(AGENT_STREAM_BASE + agent_id)

    def init_stream(self) -> RngStream:
        return self._streams.stream(STREAM_INIT)

    def env_stream(self) -> RngStream:
        return self._streams.stream(STREAM_ENV)

    def workload_stream(self) -> RngStream:
        return self._streams.stream(STREAM_WORKLOAD)


class Model(Protocol):
    """Contract each built-in model implements over its own state record."""

    name: str

    def build(self, ctx: TickContext): ...

    def begin_tick(self, state, ctx: TickContext) -> None: ...

    def agent_ids(self, state) -> list[int]: ...

    def agent_tick(self, state, agent_id: int, ctx: TickContext) -> None: ...

    def end_tick(self, state, ctx: TickContext) -> None: ...

    def metrics(self, state) -> dict[str, float]: ...

    def final_metrics(self, state) -> dict[str, float]: ...

    def check_invariants(self, state) -> None: ...

    def state_dict(self, state) -> dict: ...


@dataclass
class WorldState:
    clock: SimClock
    model: Model
    model_state: object
    rng: RngStreams
    event_log: list[EventRecord] = field(default_factory=list)
    last_order: list[int] = field(default_factory=list)


@dataclass
class RunResult:
    model: str
    seed: int
    ticks: int
    samples: list[MetricSample]
    final_metrics: dict[str, float]
    event_counts: dict[str, int]
    event_log: list[EventRecord]
    world: WorldState


def new_world(model: Model, seed: int) -> WorldState:
    """Build the initial world (tick 0) for a model instance."""
    clock = SimClock(0)
    rng = RngStreams(seed)
    log: list[EventRecord] = []
    ctx = TickContext(0, rng, log)
    state = model.build(ctx)
    return WorldState(clock=clock, model=model, model_state=state, rng=rng, event_log=log)


def tick(world: WorldState) -> None:
    """Advance the world by one step."""
    world.clock.tick += 1
    ctx = TickContext(world.clock.tick, world.rng, world.event_log)
    model = world.model
    model.begin_tick(world.model_state, ctx)
    order = model.agent_ids(world.model_state)
    world.rng.stream(STREAM_SCHEDULER).shuffle(order)
    world.last_order = order
    for agent_id in order:
        model.agent_tick(world.model_state, agent_id, ctx)
    model.end_tick(world.model_state, ctx)


def advance(world: WorldState, ticks: int, on_tick: Optional[Callable[[WorldState], None]] = None) -> None:
    for _ in range(ticks):
        tick(world)
        if on_tick is not None:
            on_tick(world)


def _sample(world: WorldState, samples: list[MetricSample]) -> None:
    values = world.model.metrics(world.model_state)
    t = world.clock.tick
    for name in sorted(values):
        samples.append(MetricSample(t, name, float(values[name])))


def run(
    model: Model,
    seed: int,
    ticks: int,
    metric_interval: int = 1,
    on_tick: Optional[Callable[[WorldState], None]] = None,
) -> RunResult:
    """Execute ``ticks`` engine steps and collect metrics.

    Metrics are sampled at tick 0, at every multiple of ``metric_interval``,
    and at the final tick. Final summary metrics are computed once at the end.
    """
    if ticks < 0:
        raise ValueError("ticks must be non-negative")
    if metric_interval < 1:
        raise ValueError("metric_interval must be positive")
    world = new_world(model, seed)
    samples: list[MetricSample] = []
    _sample(world, samples)
    for t in range(1, ticks + 1):
        tick(world)
        if on_tick is not None:
            on_tick(world)
        if t % metric_interval == 0 or t == ticks:
            _sample(world, samples)
    final = dict(model.final_metrics(world.model_state))
    counts = Counter(ev.kind for ev in world.event_log)
    return RunResult(
        model=model.name,
        seed=seed,
        ticks=ticks,
        samples=samples,
        final_metrics=final,
        event_counts=dict(sorted(counts.items())),
        event_log=world.event_log,
        world=world,
    )


def world_fingerprint(world: WorldState) -> str:
    """Canonical serialisation of the full world state.

    Two worlds with equal fingerprints will evolve identically: the model
    state, the clock, and the state of every rng stream are all included.
    """
    doc = {
        "tick": world.clock.tick,
        "model": world.model.name,
        "state": world.model.state_dict(world.model_state),
        "rng": world.rng.state_dict(),
    }
    return json.dumps(doc, sort_keys=True)
