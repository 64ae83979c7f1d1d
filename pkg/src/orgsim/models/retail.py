"""Department-store floor model: customers, sales staff, and a manager.

Customers arrive at the entrance (department 0) and are either browsers,
drifting between adjacent departments until an impulse sends them to the
local queue, or goal-directed, walking one department per tick to their
target and queueing there. Waiting customers renege when their patience
runs out. Staff serve their department's queue head; service time shrinks
with skill, and the purchase decision at completion is a linear function
of attitude and goal-directedness, clamped to [0, 1]. Every review period
the manager moves one idle staff member from the shortest-queue department
to the longest, respecting a minimum staffing floor.

Departments are arranged on a line (an aisle): one hop moves a customer to
an adjacent department.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from ..engine import RunResult, TickContext
from ..errors import ConfigError, RangeError
from ..rng import RngStream

BROWSER = "browser"
GOAL_DIRECTED = "goal_directed"

ENTERING = "entering"
BROWSING = "browsing"
TRAVELING = "traveling"
WAITING = "waiting"
IN_SERVICE = "in_service"

IDLE = "idle"
SERVING = "serving"

AGE_BANDS = ("under_25", "25_to_45", "over_45")


@dataclass
class RetailParams:
    arrival_rate: float = 0.3
    browser_fraction: float = 0.5
    base_service_time: int = 5
    skill_speedup: float = 1.0
    base_purchase_prob: float = 0.25
    attitude_weight: float = 0.3
    goal_bonus: float = 0.3
    impulse_prob: float = 0.1
    patience_min: int = 10
    patience_max: int = 30
    review_period: int = 50
    min_staff_floor: int = 1
    age_service_multiplier: dict[str, float] = field(
        default_factory=lambda: {band: 1.0 for band in AGE_BANDS}
    )

    def __post_init__(self):
        if self.arrival_rate < 0:
            raise RangeError("arrival_rate must be >= 0")
        if not 0.0 <= self.browser_fraction <= 1.0:
            raise RangeError("browser_fraction must be in [0, 1]")
        if self.base_service_time < 1:
            raise RangeError("base_service_time must be >= 1")
        if self.skill_speedup < 0:
            raise RangeError("skill_speedup must be >= 0")
        if not 0.0 <= self.base_purchase_prob <= 1.0:
            raise RangeError("base_purchase_prob must be in [0, 1]")
        if self.attitude_weight < 0 or self.goal_bonus < 0:
            raise RangeError("attitude_weight and goal_bonus must be >= 0")
        if not 0.0 <= self.impulse_prob <= 1.0:
            raise RangeError("impulse_prob must be in [0, 1]")
        if self.patience_min < 0 or self.patience_max < self.patience_min:
            raise RangeError("patience range must satisfy 0 <= min <= max")
        if self.review_period < 1:
            raise RangeError("review_period must be >= 1")
        if self.min_staff_floor < 0:
            raise RangeError("min_staff_floor must be >= 0")
        for band, mult in self.age_service_multiplier.items():
            if band not in AGE_BANDS:
                raise ConfigError(f"unknown age band {band!r}")
            if mult <= 0:
                raise RangeError("age_service_multiplier values must be > 0")


@dataclass
class Customer:
    id: int
    mode: str
    target: Optional[int]  # department for goal-directed customers
    department: int
    state: str
    patience: int
    entered_tick: int
    queue_join_tick: Optional[int] = None
    purchased: bool = False


@dataclass
class StaffMember:
    id: int
    department: int
    age_band: str
    skill: float
    attitude: float
    state: str = IDLE
    customer: Optional[int] = None
    remaining: int = 0


@dataclass
class Manager:
    id: int
    department: int
    review_period: int
    min_staff_floor: int


@dataclass
class StoreState:
    params: RetailParams
    n_departments: int
    staff: dict[int, StaffMember]
    manager: Manager
    customers: dict[int, Customer] = field(default_factory=dict)
    queues: list[list[int]] = field(default_factory=list)
    next_customer_id: int = 0
    entered: int = 0
    exited_purchased: int = 0
    exited_unpurchased: int = 0
    reneges: int = 0
    served: int = 0
    wait_total: int = 0
    serving_ticks: int = 0
    ticks_elapsed: int = 0


def service_time(params: RetailParams, staff: StaffMember) -> int:
    """Ticks needed for one service: ceil(T0 * band / (1 + speedup * skill))."""
    band = params.age_service_multiplier.get(staff.age_band, 1.0)
    return max(1, math.ceil(params.base_service_time * band / (1.0 + params.skill_speedup * staff.skill)))


def purchase_probability(params: RetailParams, staff: StaffMember, mode: str) -> float:
    """Linear-then-clamp purchase model."""
    p = params.base_purchase_prob + params.attitude_weight * staff.attitude
    if mode == GOAL_DIRECTED:
        p += params.goal_bonus
    return min(1.0, max(0.0, p))


def spawn_arrivals(tick: int, rng: RngStream, params: RetailParams, n_departments: int,
                   start_id: int = 0) -> list[Customer]:
    """Draw this tick's arrivals: Poisson count, then mode and patience."""
    out = []
    n = rng.poisson(params.arrival_rate)
    for i in range(n):
        if rng.next_uniform() < params.browser_fraction:
            mode, target = BROWSER, None
        else:
            mode, target = GOAL_DIRECTED, rng.randbelow(n_departments)
        patience = rng.randint(params.patience_min, params.patience_max)
        out.append(Customer(
            id=start_id + i, mode=mode, target=target, department=0,
            state=ENTERING, patience=patience, entered_tick=tick,
        ))
    return out


class RetailFloor:
    """Model wiring for the engine. State lives in a StoreState record."""

    name = "retail"

    def __init__(self, n_departments: int, staff: list[tuple[int, float, float, str]], params: RetailParams):
        if n_departments < 1:
            raise RangeError("need at least one department")
        for dept, skill, attitude, band in staff:
            if not 0 <= dept < n_departments:
                raise ConfigError(f"staff department {dept} out of range")
            if not (0.0 <= skill <= 1.0 and 0.0 <= attitude <= 1.0):
                raise RangeError("skill and attitude must be in [0, 1]")
            if band not in AGE_BANDS:
                raise ConfigError(f"unknown age band {band!r}")
        self.n_departments = n_departments
        self.staff_spec = list(staff)
        self.params = params

    # Agent id layout: staff occupy 0..S-1, the manager is S, customers S+1+k.
    def build(self, ctx: TickContext) -> StoreState:
        staff = {
            i: StaffMember(id=i, department=dept, age_band=band, skill=skill, attitude=attitude)
            for i, (dept, skill, attitude, band) in enumerate(self.staff_spec)
        }
        manager = Manager(
            id=len(staff), department=0,
            review_period=self.params.review_period,
            min_staff_floor=self.params.min_staff_floor,
        )
        return StoreState(
            params=self.params,
            n_departments=self.n_departments,
            staff=staff,
            manager=manager,
            queues=[[] for _ in range(self.n_departments)],
            next_customer_id=manager.id + 1,
        )

    # -- engine phases ----------------------------------------------------

    def begin_tick(self, st: StoreState, ctx: TickContext) -> None:
        st.ticks_elapsed = ctx.tick
        arrivals = spawn_arrivals(ctx.tick, ctx.env_stream(), st.params,
                                  st.n_departments, st.next_customer_id)
        for cust in arrivals:
            st.customers[cust.id] = cust
            st.next_customer_id = cust.id + 1
            st.entered += 1
            ctx.emit("arrival", None, customer=cust.id, mode=cust.mode,
                     target=-1 if cust.target is None else cust.target)

    def agent_ids(self, st: StoreState) -> list[int]:
        ids = list(st.staff.keys())
        ids.append(st.manager.id)
        ids.extend(st.customers.keys())
        return ids

    def agent_tick(self, st: StoreState, agent_id: int, ctx: TickContext) -> None:
        if agent_id in st.staff:
            self._staff_tick(st, st.staff[agent_id], ctx)
        elif agent_id == st.manager.id:
            self._manager_tick(st, ctx)
        else:
            cust = st.customers.get(agent_id)
            if cust is not None:  # may have exited earlier this tick
                self._customer_tick(st, cust, ctx)

    def end_tick(self, st: StoreState, ctx: TickContext) -> None:
        pass

    # -- customers ----------------------------------------------------------

    def _customer_tick(self, st: StoreState, cust: Customer, ctx: TickContext) -> None:
        if cust.state == ENTERING:
            cust.state = BROWSING if cust.mode == BROWSER else TRAVELING
        if cust.state == BROWSING:
            self._browse(st, cust, ctx)
        elif cust.state == TRAVELING:
            self._travel(st, cust, ctx)
        elif cust.state == WAITING:
            cust.patience -= 1
            if cust.patience <= 0:
                self._renege(st, cust, ctx)
        # IN_SERVICE customers are driven by their staff member.

    def _browse(self, st: StoreState, cust: Customer, ctx: TickContext) -> None:
        rng = ctx.agent_stream(cust.id)
        if st.params.impulse_prob > 0 and rng.next_uniform() < st.params.impulse_prob:
            self._join_queue(st, cust, ctx)
            return
        if st.n_departments > 1:
            if cust.department == 0:
                cust.department = 1
            elif cust.department == st.n_departments - 1:
                cust.department -= 1
            else:
                cust.department += 1 if rng.next_uniform() < 0.5 else -1

    def _travel(self, st: StoreState, cust: Customer, ctx: TickContext) -> None:
        if cust.department != cust.target:
            cust.department += 1 if cust.target > cust.department else -1
        if cust.department == cust.target:
            self._join_queue(st, cust, ctx)

    def _join_queue(self, st: StoreState, cust: Customer, ctx: TickContext) -> None:
        cust.state = WAITING
        cust.queue_join_tick = ctx.tick
        st.queues[cust.department].append(cust.id)
        ctx.emit("queue_join", cust.id, department=cust.department)

    def _renege(self, st: StoreState, cust: Customer, ctx: TickContext) -> None:
        st.queues[cust.department].remove(cust.id)
        st.reneges += 1
        ctx.emit("renege", cust.id, department=cust.department)
        self._exit(st, cust, ctx, purchased=False)

    def _exit(self, st: StoreState, cust: Customer, ctx: TickContext, purchased: bool) -> None:
        if purchased:
            st.exited_purchased += 1
        else:
            st.exited_unpurchased += 1
        ctx.emit("exit", cust.id, purchased=purchased)
        del st.customers[cust.id]

    # -- staff ----------------------------------------------------------------

    def _staff_tick(self, st: StoreState, staff: StaffMember, ctx: TickContext) -> None:
        if staff.state == SERVING:
            st.serving_ticks += 1
            staff.remaining -= 1
            if staff.remaining <= 0:
                self._complete_service(st, staff, ctx)
        elif staff.state == IDLE:
            queue = st.queues[staff.department]
            if queue:
                self._begin_service(st, staff, st.customers[queue[0]], ctx)

    def _begin_service(self, st: StoreState, staff: StaffMember, cust: Customer, ctx: TickContext) -> None:
        st.queues[staff.department].pop(0)
        duration = service_time(st.params, staff)
        staff.state = SERVING
        staff.customer = cust.id
        staff.remaining = duration
        cust.state = IN_SERVICE
        st.served += 1
        st.wait_total += ctx.tick - cust.queue_join_tick
        ctx.emit("service_start", staff.id, customer=cust.id,
                 department=staff.department, duration=duration)

    def _complete_service(self, st: StoreState, staff: StaffMember, ctx: TickContext) -> None:
        cust = st.customers[staff.customer]
        p = purchase_probability(st.params, staff, cust.mode)
        purchased = ctx.agent_stream(staff.id).next_uniform() < p
        ctx.emit("service_complete", staff.id, customer=cust.id, purchased=purchased)
        self._exit(st, cust, ctx, purchased=purchased)
        staff.state = IDLE
        staff.customer = None

    # -- manager -----------------------------------------------------------------

    def _manager_tick(self, st: StoreState, ctx: TickContext) -> None:
        mgr = st.manager
        if ctx.tick % mgr.review_period != 0:
            return
        lengths = [len(q) for q in st.queues]
        longest = max(range(st.n_departments), key=lambda d: (lengths[d], -d))
        shortest = min(range(st.n_departments), key=lambda d: (lengths[d], d))
        if lengths[longest] - lengths[shortest] < 2 or longest == shortest:
            return
        donor_staff = [s for s in st.staff.values() if s.department == shortest]
        idle = [s for s in donor_staff if s.state == IDLE]
        if not idle or len(donor_staff) - 1 < mgr.min_staff_floor:
            return
        mover = min(idle, key=lambda s: s.id)
        mover.department = longest
        ctx.emit("staff_move", mgr.id, staff=mover.id, src=shortest, dst=longest)

    # -- metrics and audits ---------------------------------------------------

    def metrics(self, st: StoreState) -> dict[str, float]:
        capacity = len(st.staff) * st.ticks_elapsed
        return {
            "customers_entered": float(st.entered),
            "customers_exited": float(st.exited_purchased + st.exited_unpurchased),
            "conversions": float(st.exited_purchased),
            "reneges": float(st.reneges),
            "served": float(st.served),
            "mean_wait": st.wait_total / st.served if st.served else 0.0,
            "staff_utilization": st.serving_ticks / capacity if capacity else 0.0,
        }

    def final_metrics(self, st: StoreState) -> dict[str, float]:
        return self.metrics(st)

    def check_invariants(self, st: StoreState) -> None:
        inside = len(st.customers)
        if st.entered != st.exited_purchased + st.exited_unpurchased + inside:
            raise AssertionError(
                f"customer accounting violated: {st.entered} != "
                f"{st.exited_purchased} + {st.exited_unpurchased} + {inside}"
            )
        seen: set[int] = set()
        for dept, queue in enumerate(st.queues):
            for cid in queue:
                if cid in seen:
                    raise AssertionError(f"customer {cid} in two queues")
                seen.add(cid)
                cust = st.customers.get(cid)
                if cust is None or cust.state != WAITING or cust.department != dept:
                    raise AssertionError(f"queue {dept} holds non-waiting customer {cid}")
        serving = [s.customer for s in st.staff.values() if s.state == SERVING]
        if len(serving) != len(set(serving)):
            raise AssertionError("customer served by two staff members")

    def state_dict(self, st: StoreState) -> dict:
        return {
            "entered": st.entered,
            "exited_purchased": st.exited_purchased,
            "exited_unpurchased": st.exited_unpurchased,
            "reneges": st.reneges,
            "served": st.served,
            "wait_total": st.wait_total,
            "serving_ticks": st.serving_ticks,
            "queues": [list(q) for q in st.queues],
            "staff": [
                [s.id, s.department, s.state, s.customer if s.customer is not None else -1, s.remaining]
                for s in sorted(st.staff.values(), key=lambda s: s.id)
            ],
            "customers": [
                [c.id, c.mode, c.target if c.target is not None else -1, c.department,
                 c.state, c.patience, c.entered_tick]
                for c in sorted(st.customers.values(), key=lambda c: c.id)
            ],
        }


def retail_metrics(result: RunResult) -> dict:
    """Summary record for a completed retail run."""
    fm = result.final_metrics
    return {
        "conversions": int(fm["conversions"]),
        "reneges": int(fm["reneges"]),
        "mean_wait": fm["mean_wait"],
        "staff_utilization": fm["staff_utilization"],
        "customers_entered": int(fm["customers_entered"]),
        "customers_exited": int(fm["customers_exited"]),
    }
