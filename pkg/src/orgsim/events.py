"""Event log records and metric samples.

Events are the audit trail of a run: every metric a model reports must be
recomputable from the event log plus the initial state. Payload values are
restricted to scalars so logs stay serialisable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Scalar = Union[int, float, str, bool]


@dataclass(frozen=True)
class EventRecord:
    tick: int
    agent_id: Optional[int]  # None for system events
    kind: str
    payload: dict[str, Scalar] = field(default_factory=dict)


@dataclass(frozen=True)
class MetricSample:
    tick: int
    name: str
    value: float


def _format_scalar(v: Scalar) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return "%.6g" % v
    return str(v)


def events_to_csv(events: list[EventRecord]) -> str:
    """Render an event log as CSV, one row per payload entry.

    Header is ``tick,agent_id,kind,key,value``; system events have an empty
    agent_id column. Events with an empty payload produce a single row with
    empty key and value so they still appear in the export. Payload keys are
    emitted in sorted order.
    """
    lines = ["tick,agent_id,kind,key,value"]
    for ev in events:
        agent = "" if ev.agent_id is None else str(ev.agent_id)
        if not ev.payload:
            lines.append(f"{ev.tick},{agent},{ev.kind},,")
            continue
        for key in sorted(ev.payload):
            lines.append(f"{ev.tick},{agent},{ev.kind},{key},{_format_scalar(ev.payload[key])}")
    return "\n".join(lines) + "\n"
