"""Inter-team communication: fact diffusion over a message topology.

Two policies connect the teams. Under ``any_to_any`` every engineer can
message every other engineer directly. Under ``gatewayed`` each team
designates one liaison and the only cross-team edge joins the two
liaisons: a fact crossing teams travels member -> own liaison -> other
liaison, and the receiving liaison then re-broadcasts a novel fact to each
teammate, one message per teammate.

Capacity is a unified work budget: each engineer performs up to
``capacity`` message operations per tick, where one operation is either
processing an arrived message (learn the fact, update trust toward the
sender, and forward it along its remaining route) or transmitting one
queued outbound message (an origination or a broadcast copy). Messages
sent during a tick arrive in the recipient's inbox at the next tick, so
every hop costs one tick plus any queueing delay.

The workload: at tick 1 every engineer shares each fact it initially
holds with every other engineer reachable under the policy (directly, or
through the liaison chain). Tasks are the measuring stick: a task is done
at the first tick any single engineer knows all its required facts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..engine import RunResult, TickContext
from ..errors import ConfigError, RangeError, UnreachableError
from ..rng import RngStream

ANY_TO_ANY = "any_to_any"
GATEWAYED = "gatewayed"

MEMBER = "member"
LIAISON = "liaison"
LEADER = "leader"

ROUND_ROBIN = "round_robin"


@dataclass
class TeamsParams:
    policy: str = ANY_TO_ANY
    fact_universe: int = 20
    fact_distribution: object = ROUND_ROBIN  # or explicit list of per-team fact lists
    task_count: int = 10
    task_k: int = 3
    task_deadline: int = 100
    capacity: int = 2
    liaison_capacity: int = 2
    trust_up: float = 0.05
    trust_down: float = 0.02
    drop_on_distrust: bool = False
    message_budget: Optional[int] = None  # cap on originated messages; None = unlimited

    def __post_init__(self):
        if self.policy not in (ANY_TO_ANY, GATEWAYED):
            raise RangeError(f"policy must be '{ANY_TO_ANY}' or '{GATEWAYED}', got {self.policy!r}")
        if self.fact_universe < 0:
            raise RangeError("fact_universe must be >= 0")
        if self.task_count < 0:
            raise RangeError("task_count must be >= 0")
        if self.task_k < 1:
            raise RangeError("task_k must be >= 1")
        if self.task_k > self.fact_universe:
            raise ConfigError(f"task_k ({self.task_k}) exceeds fact universe ({self.fact_universe})")
        if self.task_deadline < 0:
            raise RangeError("task_deadline must be >= 0")
        if self.capacity < 1 or self.liaison_capacity < 1:
            raise RangeError("capacities must be >= 1")
        if self.trust_up < 0 or self.trust_down < 0:
            raise RangeError("trust deltas must be >= 0")
        if self.message_budget is not None and self.message_budget < 0:
            raise RangeError("message_budget must be >= 0")


@dataclass
class Team:
    id: int
    members: list[int]
    leader: int
    liaison: Optional[int]


@dataclass
class Message:
    id: int
    fact: int
    origin: int
    created_tick: int
    route: tuple[int, ...]
    pos: int = 0  # index of the engineer currently holding the message

    @property
    def path_so_far(self) -> tuple[int, ...]:
        return self.route[: self.pos + 1]


@dataclass
class Engineer:
    id: int
    team: int
    role: str
    capacity: int
    knowledge: set[int] = field(default_factory=set)
    trust: dict[int, float] = field(default_factory=dict)
    queue: deque = field(default_factory=deque)     # work items for this tick
    incoming: list = field(default_factory=list)    # arrivals, merged next tick


@dataclass
class Task:
    id: int
    required_facts: frozenset[int]
    deadline: int
    assigned_to: int
    completed_tick: Optional[int] = None


@dataclass
class CommsState:
    params: TeamsParams
    teams: list[Team]
    engineers: dict[int, Engineer]
    edges: set[tuple[int, int]]
    tasks: list[Task]
    fact_home: dict[int, int]  # fact -> engineer initially holding it
    next_msg_id: int = 0
    budget_left: Optional[int] = None
    cross_deliveries: int = 0
    cross_latency_total: int = 0
    deliveries: int = 0
    messages_sent: int = 0
    completed: int = 0


def build_topology(teams: list[Team], policy: str) -> set[tuple[int, int]]:
    """Edge set for a policy: complete within teams, cross edges per policy."""
    if len(teams) < 2:
        raise ConfigError("need at least two teams")
    edges: set[tuple[int, int]] = set()
    for team in teams:
        members = sorted(team.members)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                edges.add((a, b))
    if policy == ANY_TO_ANY:
        for i, ta in enumerate(teams):
            for tb in teams[i + 1:]:
                for a in ta.members:
                    for b in tb.members:
                        edges.add((min(a, b), max(a, b)))
    elif policy == GATEWAYED:
        if len(teams) != 2:
            raise ConfigError("gatewayed policy is defined for exactly two teams")
        for team in teams:
            if team.liaison is None:
                raise ConfigError(f"gatewayed policy requires a liaison for team {team.id}")
        a, b = teams[0].liaison, teams[1].liaison
        edges.add((min(a, b), max(a, b)))
    else:
        raise RangeError(f"unknown policy {policy!r}")
    return edges


def route(src: int, dst: int, edges: set[tuple[int, int]], n_engineers: int) -> list[int]:
    """Shortest path from src to dst over the topology (BFS, id-ordered ties)."""
    if src == dst:
        raise ConfigError("route requires src != dst")
    adj: dict[int, list[int]] = {i: [] for i in range(n_engineers)}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    for nbrs in adj.values():
        nbrs.sort()
    prev: dict[int, int] = {src: src}
    frontier = [src]
    while frontier:
        nxt = []
        for node in frontier:
            for nbr in adj[node]:
                if nbr not in prev:
                    prev[nbr] = node
                    if nbr == dst:
                        path = [dst]
                        while path[-1] != src:
                            path.append(prev[path[-1]])
                        return path[::-1]
                    nxt.append(nbr)
        frontier = nxt
    raise UnreachableError(f"no path from {src} to {dst}")


def update_trust(engineer: Engineer, peer: int, novel: bool, up: float, down: float) -> float:
    """Adjust trust toward ``peer``: novel fact raises it, stale fact lowers it."""
    value = engineer.trust.get(peer, 0.5)
    value = value + up if novel else value - down
    value = min(1.0, max(0.0, value))
    engineer.trust[peer] = value
    return value


def jaccard(a: set, b: set) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union


def shared_understanding(state: CommsState, team_a: int, team_b: int) -> float:
    """Jaccard overlap between two teams' pooled knowledge."""
    ka: set[int] = set()
    kb: set[int] = set()
    for eng in state.engineers.values():
        if eng.team == team_a:
            ka |= eng.knowledge
        elif eng.team == team_b:
            kb |= eng.knowledge
    return jaccard(ka, kb)


def generate_tasks(rng: RngStream, params: TeamsParams) -> list[tuple[int, frozenset[int]]]:
    """Seeded workload: each task draws k facts without replacement."""
    if params.task_k > params.fact_universe:
        raise ConfigError(f"task_k ({params.task_k}) exceeds fact universe ({params.fact_universe})")
    universe = list(range(params.fact_universe))
    out = []
    for i in range(params.task_count):
        out.append((i, frozenset(rng.sample(universe, params.task_k))))
    return out


class TeamComms:
    """Model wiring for the engine. State lives in a CommsState record."""

    name = "team_comms"

    def __init__(self, team_sizes: list[int], liaisons: list[Optional[int]],
                 leaders: list[int], params: TeamsParams):
        if len(team_sizes) < 2:
            raise ConfigError("need at least two teams")
        if not (len(liaisons) == len(leaders) == len(team_sizes)):
            raise ConfigError("liaisons and leaders must match the team list")
        for size, liaison, leader in zip(team_sizes, liaisons, leaders):
            if size < 1:
                raise RangeError("team sizes must be >= 1")
            if liaison is not None and not 0 <= liaison < size:
                raise ConfigError(f"liaison index {liaison} out of range for team of {size}")
            if not 0 <= leader < size:
                raise ConfigError(f"leader index {leader} out of range for team of {size}")
        self.team_sizes = list(team_sizes)
        self.liaisons = list(liaisons)
        self.leaders = list(leaders)
        self.params = params

    def build(self, ctx: TickContext) -> CommsState:
        p = self.params
        teams: list[Team] = []
        engineers: dict[int, Engineer] = {}
        next_id = 0
        for t, size in enumerate(self.team_sizes):
            members = list(range(next_id, next_id + size))
            next_id += size
            liaison = None if self.liaisons[t] is None else members[self.liaisons[t]]
            leader = members[self.leaders[t]]
            teams.append(Team(id=t, members=members, leader=leader, liaison=liaison))
            for eng_id in members:
                role = LIAISON if eng_id == liaison else (LEADER if eng_id == leader else MEMBER)
                cap = p.liaison_capacity if eng_id == liaison else p.capacity
                engineers[eng_id] = Engineer(id=eng_id, team=t, role=role, capacity=cap)
        edges = build_topology(teams, p.policy)

        fact_home = self._distribute_facts(teams, engineers)

        tasks: list[Task] = []
        per_team_cursor = [0] * len(teams)
        for task_id, facts in generate_tasks(ctx.workload_stream(), p):
            team = teams[task_id % len(teams)]
            member = team.members[per_team_cursor[team.id] % len(team.members)]
            per_team_cursor[team.id] += 1
            tasks.append(Task(id=task_id, required_facts=facts,
                              deadline=p.task_deadline, assigned_to=member))
            ctx.emit("task_assigned", team.leader, task=task_id, engineer=member)

        state = CommsState(
            params=p, teams=teams, engineers=engineers, edges=edges,
            tasks=tasks, fact_home=fact_home,
            budget_left=p.message_budget,
        )
        self._check_tasks(state, ctx)
        return state

    def _distribute_facts(self, teams: list[Team], engineers: dict[int, Engineer]) -> dict[int, int]:
        p = self.params
        home: dict[int, int] = {}
        if p.fact_distribution == ROUND_ROBIN:
            n_teams = len(teams)
            for fact in range(p.fact_universe):
                team = teams[fact % n_teams]
                member = team.members[(fact // n_teams) % len(team.members)]
                home[fact] = member
        else:
            per_team = p.fact_distribution
            if not isinstance(per_team, list) or len(per_team) != len(teams):
                raise ConfigError("fact_distribution must be 'round_robin' or one fact list per team")
            seen: set[int] = set()
            for team, facts in zip(teams, per_team):
                for j, fact in enumerate(facts):
                    if not 0 <= fact < p.fact_universe:
                        raise RangeError(f"fact {fact} outside universe [0, {p.fact_universe})")
                    if fact in seen:
                        raise ConfigError(f"fact {fact} assigned to two teams")
                    seen.add(fact)
                    home[fact] = team.members[j % len(team.members)]
        for fact, eng_id in home.items():
            engineers[eng_id].knowledge.add(fact)
        return home

    # -- engine phases ----------------------------------------------------

    def begin_tick(self, st: CommsState, ctx: TickContext) -> None:
        for eng in st.engineers.values():
            if eng.incoming:
                eng.queue.extend(eng.incoming)
                eng.incoming.clear()

    def agent_ids(self, st: CommsState) -> list[int]:
        return list(st.engineers.keys())

    def agent_tick(self, st: CommsState, agent_id: int, ctx: TickContext) -> None:
        eng = st.engineers[agent_id]
        if ctx.tick == 1:
            self._originate(st, eng, ctx)
        budget = eng.capacity
        while budget > 0 and eng.queue:
            kind, msg = eng.queue.popleft()
            if kind == "send":
                self._transmit(st, eng, msg, ctx)
            else:
                self._process(st, eng, msg, ctx)
            budget -= 1

    def end_tick(self, st: CommsState, ctx: TickContext) -> None:
        self._check_tasks(st, ctx)

    # -- message flow -----------------------------------------------------

    def _originate(self, st: CommsState, eng: Engineer, ctx: TickContext) -> None:
        """Queue the initial shares for every fact this engineer holds."""
        p = st.params
        my_team = st.teams[eng.team]
        facts = sorted(f for f, home in st.fact_home.items() if home == eng.id)
        for fact in facts:
            routes: list[tuple[int, ...]] = []
            teammates = [m for m in my_team.members if m != eng.id]
            routes.extend((eng.id, mate) for mate in teammates)
            if p.policy == ANY_TO_ANY:
                for team in st.teams:
                    if team.id == eng.team:
                        continue
                    routes.extend((eng.id, other) for other in team.members)
            else:
                other_team = st.teams[1 - eng.team]
                if eng.id == my_team.liaison:
                    routes.append((eng.id, other_team.liaison))
                else:
                    routes.append((eng.id, my_team.liaison, other_team.liaison))
            for rt in routes:
                if st.budget_left is not None:
                    if st.budget_left == 0:
                        return
                    st.budget_left -= 1
                msg = Message(id=st.next_msg_id, fact=fact, origin=eng.id,
                              created_tick=ctx.tick, route=rt)
                st.next_msg_id += 1
                eng.queue.append(("send", msg))

    def _transmit(self, st: CommsState, eng: Engineer, msg: Message, ctx: TickContext) -> None:
        nxt = msg.route[msg.pos + 1]
        msg.pos += 1
        st.engineers[nxt].incoming.append(("recv", msg))
        st.messages_sent += 1
        ctx.emit("relay", eng.id, fact=msg.fact, to=nxt, origin=msg.origin)

    def _process(self, st: CommsState, eng: Engineer, msg: Message, ctx: TickContext) -> None:
        p = st.params
        prev = msg.route[msg.pos - 1]
        novel = msg.fact not in eng.knowledge
        if p.drop_on_distrust:
            trust = eng.trust.get(prev, 0.5)
            if ctx.agent_stream(eng.id).next_uniform() < 1.0 - trust:
                ctx.emit("drop", eng.id, fact=msg.fact, sender=prev)
                return
        update_trust(eng, prev, novel, p.trust_up, p.trust_down)
        if novel:
            eng.knowledge.add(msg.fact)
            ctx.emit("fact_learned", eng.id, fact=msg.fact)
        final = msg.pos == len(msg.route) - 1
        if not final:
            nxt = msg.route[msg.pos + 1]
            msg.pos += 1
            st.engineers[nxt].incoming.append(("recv", msg))
            st.messages_sent += 1
            ctx.emit("relay", eng.id, fact=msg.fact, to=nxt, origin=msg.origin)
            return
        origin_team = st.engineers[msg.origin].team
        cross = origin_team != eng.team
        st.deliveries += 1
        if cross:
            st.cross_deliveries += 1
            st.cross_latency_total += ctx.tick - msg.created_tick
        ctx.emit("delivery", eng.id, fact=msg.fact, origin=msg.origin,
                 created_tick=msg.created_tick, cross=cross)
        if (p.policy == GATEWAYED and cross and novel
                and eng.id == st.teams[eng.team].liaison):
            # Relay a novel cross-team fact onward to every teammate, one
            # message per teammate, each transmission consuming capacity.
            for mate in sorted(st.teams[eng.team].members):
                if mate == eng.id:
                    continue
                copy = Message(id=st.next_msg_id, fact=msg.fact, origin=msg.origin,
                               created_tick=msg.created_tick, route=(eng.id, mate))
                st.next_msg_id += 1
                eng.queue.append(("send", copy))

    # -- tasks ---------------------------------------------------------------

    def _check_tasks(self, st: CommsState, ctx: TickContext) -> None:
        tick = ctx.tick
        for task in st.tasks:
            if task.completed_tick is not None or tick > task.deadline:
                continue
            for eng in st.engineers.values():
                if task.required_facts <= eng.knowledge:
                    task.completed_tick = tick
                    st.completed += 1
                    ctx.emit("task_completed", None, task=task.id, engineer=eng.id)
                    break

    # -- metrics and audits ---------------------------------------------------

    def metrics(self, st: CommsState) -> dict[str, float]:
        pairs = []
        for i in range(len(st.teams)):
            for j in range(i + 1, len(st.teams)):
                pairs.append(shared_understanding(st, i, j))
        return {
            "task_completion_rate": st.completed / len(st.tasks) if st.tasks else 1.0,
            "mean_fact_latency": (
                st.cross_latency_total / st.cross_deliveries if st.cross_deliveries else 0.0
            ),
            "cross_deliveries": float(st.cross_deliveries),
            "messages_sent": float(st.messages_sent),
            "shared_understanding": sum(pairs) / len(pairs) if pairs else 1.0,
        }

    def final_metrics(self, st: CommsState) -> dict[str, float]:
        return self.metrics(st)

    def check_invariants(self, st: CommsState) -> None:
        for eng in st.engineers.values():
            for peer, value in eng.trust.items():
                if not 0.0 <= value <= 1.0:
                    raise AssertionError(f"trust[{eng.id}][{peer}] = {value} out of [0, 1]")
        for eng in st.engineers.values():
            for kind, msg in list(eng.queue) + list(eng.incoming):
                for a, b in zip(msg.route, msg.route[1:]):
                    if (min(a, b), max(a, b)) not in st.edges:
                        raise AssertionError(f"message {msg.id} routed over non-edge ({a}, {b})")

    def state_dict(self, st: CommsState) -> dict:
        return {
            "completed": st.completed,
            "cross_deliveries": st.cross_deliveries,
            "cross_latency_total": st.cross_latency_total,
            "deliveries": st.deliveries,
            "messages_sent": st.messages_sent,
            "budget_left": st.budget_left,
            "tasks": [[t.id, sorted(t.required_facts), t.deadline, t.assigned_to,
                       t.completed_tick] for t in st.tasks],
            "engineers": [
                {
                    "id": e.id,
                    "team": e.team,
                    "role": e.role,
                    "knowledge": sorted(e.knowledge),
                    "trust": {str(k): v for k, v in sorted(e.trust.items())},
                    "queue": [[kind, m.id, m.fact, m.pos] for kind, m in e.queue],
                    "incoming": [[kind, m.id, m.fact, m.pos] for kind, m in e.incoming],
                }
                for e in sorted(st.engineers.values(), key=lambda e: e.id)
            ],
        }


def effectiveness(result: RunResult) -> dict:
    """Summary record for a completed communication run."""
    fm = result.final_metrics
    return {
        "task_completion_rate": fm["task_completion_rate"],
        "mean_fact_latency": fm["mean_fact_latency"],
        "cross_deliveries": int(fm["cross_deliveries"]),
    }
