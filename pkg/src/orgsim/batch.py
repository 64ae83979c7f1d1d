"""Replicated scenario batches and CSV export.

Replication r runs with seed ``scenario.seed + r``; every replication is
independent, so results are identical however the replications are
executed, and results are always aggregated in replication order.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import engine
from .events import MetricSample
from .scenario import Scenario, build_model


@dataclass
class BatchResult:
    scenario: str
    model: str
    seed: int
    replications: int
    final_metrics: list[dict[str, float]]     # one map per replication
    series: list[list[MetricSample]]          # one sample list per replication


def run_batch(scenario: Scenario) -> BatchResult:
    finals = []
    series = []
    for r in range(scenario.replications):
        model = build_model(scenario)
        result = engine.run(
            model,
            seed=scenario.seed + r,
            ticks=scenario.ticks,
            metric_interval=scenario.metric_interval,
        )
        finals.append(result.final_metrics)
        series.append(result.samples)
    return BatchResult(
        scenario=scenario.name,
        model=scenario.model,
        seed=scenario.seed,
        replications=scenario.replications,
        final_metrics=finals,
        series=series,
    )


def metric_values(batch: BatchResult, metric: str, default: float = None) -> list[float]:
    """Per-replication final values of one metric, in replication order.

    Metrics absent from a replication (a foraging run that never depleted
    has no time_to_depletion) take ``default``; with no default this raises
    KeyError naming the replication.
    """
    out = []
    for r, finals in enumerate(batch.final_metrics):
        if metric in finals:
            out.append(finals[metric])
        elif default is not None:
            out.append(default)
        else:
            raise KeyError(f"metric '{metric}' missing from replication {r}")
    return out


def batch_means(batch: BatchResult) -> dict[str, float]:
    """Mean of each final metric over the replications that report it."""
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for finals in batch.final_metrics:
        for name, value in finals.items():
            sums[name] = sums.get(name, 0.0) + value
            counts[name] = counts.get(name, 0) + 1
    return {name: sums[name] / counts[name] for name in sums}


def export_csv(batch: BatchResult) -> str:
    """Render the metric series as CSV.

    Header is ``scenario,replication,metric,tick,value``; rows are sorted
    by (replication, metric, tick); reals carry 6 significant digits; the
    line terminator is a bare newline. The output is a pure function of
    the batch, so reruns of the same scenario export identical bytes.
    """
    lines = ["scenario,replication,metric,tick,value"]
    for r, samples in enumerate(batch.series):
        for sample in sorted(samples, key=lambda s: (s.name, s.tick)):
            lines.append(
                f"{batch.scenario},{r},{sample.name},{sample.tick},{sample.value:.6g}"
            )
    return "\n".join(lines) + "\n"
