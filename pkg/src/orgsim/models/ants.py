"""Ant colony foraging on a bounded grid, with two recruitment strategies.

Mass recruitment: every ant wanders from the nest depositing a weak trail;
an ant that finds food backtracks its outbound path, reinforcing the trail
heavily, and other ants follow trail intensity to the source.

Tandem recruitment: scouts wander without pheromone. A scout that finds
food memorises the cell, carries one unit home, and on each nest visit
recruits one idle ant; the pair walks a greedy straight path back to the
source, the recruit learning the location on arrival. Recruits recruit in
turn, so knowledge of a source can at most double per round trip.

Movement is on the 8-neighbourhood with walls at the grid edges. An ant's
``path`` records the cells it departed since leaving the nest, with loops
erased as they close, so the return journey is an exact backtrack of a
cycle-free route: a path of length L takes exactly L ticks to walk home,
and the trail reinforced on the way back is a crisp line rather than the
full wander.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..engine import RunResult, TickContext
from ..errors import BoundsError, ConfigError, NoFoodError, RangeError
from ..rng import RngStream

MASS = "mass"
TANDEM = "tandem"

SEEKING = "seeking"
RETURNING = "returning"
IDLE = "idle"
LEADING = "leading"
FOLLOWING = "following"
TRAVELING = "traveling"

Cell = tuple[int, int]


@dataclass
class ForagingParams:
    strategy: str = MASS
    n_ants: int = 50
    evaporation_rate: float = 0.005
    deposit_seek: float = 0.0
    deposit_return: float = 10.0
    exploration_prob: float = 0.05
    smoothing_bias: float = 0.2
    scout_fraction: float = 0.04  # tandem only: share of ants scouting at start
    tandem_pace: int = 4  # ticks per cell when walking from memory to known food

    def __post_init__(self):
        if self.strategy not in (MASS, TANDEM):
            raise RangeError(f"strategy must be '{MASS}' or '{TANDEM}', got {self.strategy!r}")
        if self.n_ants < 1:
            raise RangeError("n_ants must be >= 1")
        if not 0.0 <= self.evaporation_rate <= 1.0:
            raise RangeError("evaporation_rate must be in [0, 1]")
        if self.deposit_seek < 0 or self.deposit_return < 0:
            raise RangeError("deposits must be >= 0")
        if not 0.0 <= self.exploration_prob <= 1.0:
            raise RangeError("exploration_prob must be in [0, 1]")
        if self.smoothing_bias < 0:
            raise RangeError("smoothing_bias must be >= 0")
        if not 0.0 <= self.scout_fraction <= 1.0:
            raise RangeError("scout_fraction must be in [0, 1]")
        if self.tandem_pace < 1:
            raise RangeError("tandem_pace must be >= 1")


class PheromoneField:
    """Per-cell trail intensity, stored flat for cheap scalar access."""

    __slots__ = ("width", "height", "cells")

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.cells = [0.0] * (width * height)

    def get(self, x: int, y: int) -> float:
        return self.cells[y * self.width + x]

    def total(self) -> float:
        return sum(self.cells)

    def min(self) -> float:
        return min(self.cells)


def evaporate(pheromone: PheromoneField, rate: float) -> PheromoneField:
    """Scale every cell by (1 - rate), in place."""
    if not 0.0 <= rate <= 1.0:
        raise RangeError("evaporation rate must be in [0, 1]")
    keep = 1.0 - rate
    cells = pheromone.cells
    pheromone.cells = [v * keep for v in cells]
    return pheromone


def deposit(pheromone: PheromoneField, cell: Cell, amount: float) -> PheromoneField:
    """Add ``amount`` to a single cell, in place."""
    x, y = cell
    if not (0 <= x < pheromone.width and 0 <= y < pheromone.height):
        raise BoundsError(f"cell ({x}, {y}) outside {pheromone.width}x{pheromone.height} grid")
    if amount < 0:
        raise RangeError("deposit amount must be >= 0")
    pheromone.cells[y * pheromone.width + x] += amount
    return pheromone


def neighbors(x: int, y: int, width: int, height: int) -> list[Cell]:
    """In-bounds 8-neighbourhood, in fixed scan order."""
    out = []
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            nx, ny = x + dx, y + dy
            if 0 <= nx < width and 0 <= ny < height:
                out.append((nx, ny))
    return out


@dataclass
class FoodSource:
    x: int
    y: int
    initial: int
    remaining: int


@dataclass
class Ant:
    id: int
    x: int
    y: int
    state: str
    carrying: int = 0
    path: list[Cell] = field(default_factory=list)
    path_index: dict[Cell, int] = field(default_factory=dict)  # cell -> position in path
    known_food: Optional[Cell] = None
    partner: Optional[int] = None        # leader<->follower link while paired
    pending_target: Optional[Cell] = None  # released follower's final approach


@dataclass
class ColonyState:
    params: ForagingParams
    width: int
    height: int
    nest: Cell
    sources: list[FoodSource]
    source_at: dict[Cell, int]
    pheromone: PheromoneField
    ants: dict[int, Ant]
    neighbor_table: dict[Cell, list[Cell]]
    delivered: int = 0
    steps: int = 0
    tick_steps: int = 0
    depleted_tick: Optional[int] = None
    total_initial: int = 0


def harvest(source: FoodSource) -> int:
    """Take one unit from a source. Raises NoFoodError when it is empty."""
    if source.remaining <= 0:
        raise NoFoodError(f"source at ({source.x}, {source.y}) is empty")
    source.remaining -= 1
    return 1


def choose_step_mass(ant: Ant, pheromone: PheromoneField, rng: RngStream, params: ForagingParams,
                     nbrs: Optional[list[Cell]] = None) -> Cell:
    """Pick the next cell for a seeking ant under mass recruitment.

    With probability ``exploration_prob`` the choice is uniform over the
    in-bounds neighbours; otherwise it is proportional to trail intensity
    plus ``smoothing_bias`` over the neighbours excluding the previous cell
    on the ant's recorded path (no U-turns while following trail, which is
    what lets a trail carry an ant in one direction). A zero-weight
    neighbourhood falls back to the uniform rule.
    """
    if nbrs is None:
        nbrs = neighbors(ant.x, ant.y, pheromone.width, pheromone.height)
    if params.exploration_prob > 0 and rng.next_uniform() < params.exploration_prob:
        return nbrs[rng.randbelow(len(nbrs))]
    prev = ant.path[-1] if ant.path else None
    cands = [n for n in nbrs if n != prev] or nbrs
    cells = pheromone.cells
    w = pheromone.width
    bias = params.smoothing_bias
    weights = [cells[ny * w + nx] + bias for nx, ny in cands]
    total = 0.0
    for wgt in weights:
        total += wgt
    if total <= 0.0:
        return cands[rng.randbelow(len(cands))]
    r = rng.next_uniform() * total
    acc = 0.0
    for nbr, wgt in zip(cands, weights):
        acc += wgt
        if r < acc:
            return nbr
    return cands[-1]


def _sign(v: int) -> int:
    return (v > 0) - (v < 0)


class AntForaging:
    """Model wiring for the engine. State lives in a ColonyState record."""

    name = "ant_foraging"

    def __init__(self, width: int, height: int, nest: Cell, food: list[tuple[Cell, int]], params: ForagingParams):
        if width < 1 or height < 1:
            raise RangeError("grid dimensions must be positive")
        if not (0 <= nest[0] < width and 0 <= nest[1] < height):
            raise ConfigError(f"nest {nest} outside {width}x{height} grid")
        for cell, units in food:
            if not (0 <= cell[0] < width and 0 <= cell[1] < height):
                raise ConfigError(f"food source {cell} outside {width}x{height} grid")
            if units < 1:
                raise RangeError("food units must be >= 1")
        self.width = width
        self.height = height
        self.nest = (nest[0], nest[1])
        self.food = [((c[0], c[1]), u) for c, u in food]
        self.params = params

    def build(self, ctx: TickContext) -> ColonyState:
        p = self.params
        sources = [FoodSource(c[0], c[1], u, u) for c, u in self.food]
        source_at = {(s.x, s.y): i for i, s in enumerate(sources)}
        if len(source_at) != len(sources):
            raise ConfigError("duplicate food source cells")
        ants: dict[int, Ant] = {}
        n_scouts = p.n_ants if p.strategy == MASS else math.ceil(p.scout_fraction * p.n_ants)
        for i in range(p.n_ants):
            state = SEEKING if i < n_scouts else IDLE
            ants[i] = Ant(id=i, x=self.nest[0], y=self.nest[1], state=state)
        table = {
            (x, y): neighbors(x, y, self.width, self.height)
            for y in range(self.height)
            for x in range(self.width)
        }
        return ColonyState(
            params=p,
            width=self.width,
            height=self.height,
            nest=self.nest,
            sources=sources,
            source_at=source_at,
            pheromone=PheromoneField(self.width, self.height),
            ants=ants,
            neighbor_table=table,
            total_initial=sum(s.initial for s in sources),
        )

    # -- engine phases ----------------------------------------------------

    def begin_tick(self, st: ColonyState, ctx: TickContext) -> None:
        if st.params.evaporation_rate > 0:
            evaporate(st.pheromone, st.params.evaporation_rate)

    def agent_ids(self, st: ColonyState) -> list[int]:
        return list(st.ants.keys())

    def agent_tick(self, st: ColonyState, agent_id: int, ctx: TickContext) -> None:
        ant = st.ants[agent_id]
        if st.params.strategy == MASS:
            self._tick_mass(st, ant, ctx)
        else:
            self._tick_tandem(st, ant, ctx)

    def end_tick(self, st: ColonyState, ctx: TickContext) -> None:
        if st.tick_steps:
            ctx.emit("steps", None, count=st.tick_steps)
            st.steps += st.tick_steps
            st.tick_steps = 0

    # -- mass recruitment --------------------------------------------------

    def _tick_mass(self, st: ColonyState, ant: Ant, ctx: TickContext) -> None:
        p = st.params
        if ant.state == SEEKING:
            deposit(st.pheromone, (ant.x, ant.y), p.deposit_seek)
            nxt = choose_step_mass(ant, st.pheromone, ctx.agent_stream(ant.id), p,
                                   st.neighbor_table[(ant.x, ant.y)])
            self._move(st, ant, nxt)
            self._try_harvest(st, ant, ctx)
        elif ant.state == RETURNING:
            deposit(st.pheromone, (ant.x, ant.y), p.deposit_return)
            self._backtrack(st, ant, ctx)

    # -- tandem recruitment -------------------------------------------------

    def _tick_tandem(self, st: ColonyState, ant: Ant, ctx: TickContext) -> None:
        if ant.state in (IDLE, FOLLOWING):
            return  # idle ants wait at the nest; followers are moved by their leader
        if ant.state == SEEKING:
            nbrs = st.neighbor_table[(ant.x, ant.y)]
            nxt = nbrs[ctx.agent_stream(ant.id).randbelow(len(nbrs))]
            self._move(st, ant, nxt)
            self._try_harvest(st, ant, ctx)
        elif ant.state == RETURNING:
            self._backtrack(st, ant, ctx)
        elif ant.state in (LEADING, TRAVELING):
            self._travel(st, ant, ctx)

    def _travel(self, st: ColonyState, ant: Ant, ctx: TickContext) -> None:
        target = ant.known_food if ant.known_food is not None else ant.pending_target
        if target is None:
            ant.state = SEEKING
            return
        # Walking from memory is slow (scanning pauses, and the leader of a
        # tandem pair waits for antennal contact): one cell per `tandem_pace`
        # ticks. Trail-running and homing move at full speed.
        if ctx.tick % st.params.tandem_pace != 0:
            return
        if (ant.x, ant.y) != target:
            nxt = (ant.x + _sign(target[0] - ant.x), ant.y + _sign(target[1] - ant.y))
            departed = (ant.x, ant.y)
            self._move(st, ant, nxt)
            if ant.state == LEADING and ant.partner is not None:
                follower = st.ants[ant.partner]
                if (follower.x, follower.y) != departed:
                    self._move(st, follower, departed)
        if (ant.x, ant.y) == target:
            self._arrive_at_source(st, ant, ctx)

    def _arrive_at_source(self, st: ColonyState, ant: Ant, ctx: TickContext) -> None:
        idx = st.source_at.get((ant.x, ant.y))
        has_food = idx is not None and st.sources[idx].remaining > 0
        if ant.state == LEADING and ant.partner is not None:
            # Release the recruit for its final approach; it learns the
            # location when it arrives on the cell itself.
            follower = st.ants[ant.partner]
            follower.state = TRAVELING
            follower.pending_target = (ant.x, ant.y)
            follower.partner = None
            ant.partner = None
        ant.pending_target = None
        if has_food:
            if ant.known_food is None:
                ant.known_food = (ant.x, ant.y)
                ctx.emit("learn_food", ant.id, x=ant.x, y=ant.y)
            self._harvest_here(st, ant, ctx, st.sources[idx])
        else:
            if ant.known_food is not None:
                ctx.emit("forget_food", ant.id, x=ant.x, y=ant.y)
                ant.known_food = None
            ant.state = SEEKING

    # -- shared mechanics ----------------------------------------------------

    def _move(self, st: ColonyState, ant: Ant, nxt: Cell) -> None:
        """Step onto ``nxt``, keeping the recorded path loop-free."""
        back = ant.path_index.get(nxt)
        if back is not None:
            for cell in ant.path[back:]:
                del ant.path_index[cell]
            del ant.path[back:]
        else:
            departed = (ant.x, ant.y)
            ant.path_index[departed] = len(ant.path)
            ant.path.append(departed)
        ant.x, ant.y = nxt
        st.tick_steps += 1

    def _backtrack(self, st: ColonyState, ant: Ant, ctx: TickContext) -> None:
        if ant.path:
            cell = ant.path.pop()
            ant.path_index.pop(cell, None)
            ant.x, ant.y = cell
            st.tick_steps += 1
        if (ant.x, ant.y) == st.nest:
            self._deliver(st, ant, ctx)

    def _try_harvest(self, st: ColonyState, ant: Ant, ctx: TickContext) -> None:
        idx = st.source_at.get((ant.x, ant.y))
        if idx is None or st.sources[idx].remaining <= 0:
            return
        if st.params.strategy == TANDEM and ant.known_food is None:
            ant.known_food = (ant.x, ant.y)
            ctx.emit("learn_food", ant.id, x=ant.x, y=ant.y)
        self._harvest_here(st, ant, ctx, st.sources[idx])

    def _harvest_here(self, st: ColonyState, ant: Ant, ctx: TickContext, source: FoodSource) -> None:
        harvest(source)
        ant.carrying = 1
        ant.state = RETURNING
        ctx.emit("harvest", ant.id, x=source.x, y=source.y, remaining=source.remaining)
        if source.remaining == 0 and st.depleted_tick is None:
            if all(s.remaining == 0 for s in st.sources):
                st.depleted_tick = ctx.tick

    def _deliver(self, st: ColonyState, ant: Ant, ctx: TickContext) -> None:
        st.delivered += ant.carrying
        ctx.emit("delivered", ant.id, units=ant.carrying)
        ant.carrying = 0
        ant.path.clear()
        ant.path_index.clear()
        if st.params.strategy == TANDEM and ant.known_food is not None:
            self._recruit(st, ant, ctx)
        else:
            ant.state = SEEKING

    def _recruit(self, st: ColonyState, leader: Ant, ctx: TickContext) -> None:
        follower = None
        for aid in sorted(st.ants):
            if st.ants[aid].state == IDLE:
                follower = st.ants[aid]
                break
        if follower is None:
            leader.state = TRAVELING  # nobody to recruit: head back alone
            return
        leader.state = LEADING
        leader.partner = follower.id
        follower.state = FOLLOWING
        follower.partner = leader.id
        ctx.emit("recruit", leader.id, follower=follower.id)

    # -- metrics and audits ---------------------------------------------------

    def metrics(self, st: ColonyState) -> dict[str, float]:
        remaining = sum(s.remaining for s in st.sources)
        eff = st.delivered / st.steps if st.steps else 0.0
        return {
            "units_delivered": float(st.delivered),
            "ant_steps": float(st.steps),
            "food_remaining": float(remaining),
            "efficiency": eff,
        }

    def final_metrics(self, st: ColonyState) -> dict[str, float]:
        out = self.metrics(st)
        if st.depleted_tick is not None:
            out["time_to_depletion"] = float(st.depleted_tick)
        return out

    def check_invariants(self, st: ColonyState) -> None:
        carried = sum(a.carrying for a in st.ants.values())
        remaining = sum(s.remaining for s in st.sources)
        if st.total_initial != remaining + carried + st.delivered:
            raise AssertionError(
                f"food conservation violated: {st.total_initial} != "
                f"{remaining} + {carried} + {st.delivered}"
            )
        if st.pheromone.min() < 0.0:
            raise AssertionError("negative pheromone intensity")
        for a in st.ants.values():
            if not (0 <= a.x < st.width and 0 <= a.y < st.height):
                raise AssertionError(f"ant {a.id} out of bounds at ({a.x}, {a.y})")
            if a.carrying and a.state != RETURNING:
                raise AssertionError(f"ant {a.id} carrying outside returning state")

    def state_dict(self, st: ColonyState) -> dict:
        return {
            "nest": list(st.nest),
            "sources": [[s.x, s.y, s.initial, s.remaining] for s in st.sources],
            "delivered": st.delivered,
            "steps": st.steps,
            "depleted_tick": st.depleted_tick,
            "pheromone": st.pheromone.cells,
            "ants": [
                {
                    "id": a.id,
                    "pos": [a.x, a.y],
                    "state": a.state,
                    "carrying": a.carrying,
                    "path": [list(c) for c in a.path],
                    "known_food": list(a.known_food) if a.known_food else None,
                    "partner": a.partner,
                    "pending": list(a.pending_target) if a.pending_target else None,
                }
                for a in sorted(st.ants.values(), key=lambda a: a.id)
            ],
        }


def foraging_metrics(result: RunResult) -> dict:
    """Summary record for a completed foraging run."""
    fm = result.final_metrics
    out = {
        "units_delivered": int(fm["units_delivered"]),
        "ant_steps": int(fm["ant_steps"]),
        "efficiency": fm["efficiency"],
    }
    if "time_to_depletion" in fm:
        out["time_to_depletion"] = int(fm["time_to_depletion"])
    return out
