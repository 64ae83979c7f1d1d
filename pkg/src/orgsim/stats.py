"""Statistical comparison and baseline validation for batches.

Scenario contrasts use Welch's t (unpooled variances) with the
Welch-Satterthwaite degrees of freedom and a normal-approximation 95%
confidence interval for the mean difference, which is adequate at the
replication counts the harness ships with. The Mann-Whitney U test is
included for rank-based one-sided contrasts between run distributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .batch import BatchResult, batch_means, metric_values
from .errors import ConfigError, InsufficientReplicationsError

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class Comparison:
    metric: str
    mean_a: float
    mean_b: float
    mean_diff: float
    welch_t: float
    degrees_of_freedom: float
    ci95_low: float
    ci95_high: float
    n_a: int
    n_b: int

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "mean_a": self.mean_a,
            "mean_b": self.mean_b,
            "mean_diff": self.mean_diff,
            "welch_t": self.welch_t,
            "degrees_of_freedom": self.degrees_of_freedom,
            "ci95_low": self.ci95_low,
            "ci95_high": self.ci95_high,
            "n_a": self.n_a,
            "n_b": self.n_b,
        }


@dataclass(frozen=True)
class ValidationReport:
    metrics: dict[str, dict]
    overall_pass: bool

    def to_dict(self) -> dict:
        return {"metrics": self.metrics, "overall_pass": self.overall_pass}


def _mean(xs: list[float]) -> float:
    return sum(xs) / len(xs)


def _sample_var(xs: list[float], mean: float) -> float:
    return sum((x - mean) ** 2 for x in xs) / (len(xs) - 1)


def welch(a: list[float], b: list[float]) -> tuple[float, float, float]:
    """Welch's t statistic, Welch-Satterthwaite dof, and the standard error.

    Two identical samples give (0, n_a + n_b - 2, 0) so that comparing a
    batch against itself reports a zero statistic rather than 0/0.
    """
    if len(a) < 2 or len(b) < 2:
        raise InsufficientReplicationsError(
            f"Welch's t needs >= 2 values per side, got {len(a)} and {len(b)}"
        )
    ma, mb = _mean(a), _mean(b)
    va, vb = _sample_var(a, ma), _sample_var(b, mb)
    se2 = va / len(a) + vb / len(b)
    diff = ma - mb
    if se2 == 0.0:
        t = 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
        return t, float(len(a) + len(b) - 2), 0.0
    se = math.sqrt(se2)
    dof = se2 ** 2 / (
        (va / len(a)) ** 2 / (len(a) - 1) + (vb / len(b)) ** 2 / (len(b) - 1)
    )
    return diff / se, dof, se


def compare_values(a: list[float], b: list[float], metric: str) -> Comparison:
    t, dof, se = welch(a, b)
    ma, mb = _mean(a), _mean(b)
    diff = ma - mb
    return Comparison(
        metric=metric,
        mean_a=ma,
        mean_b=mb,
        mean_diff=diff,
        welch_t=t,
        degrees_of_freedom=dof,
        ci95_low=diff - _Z95 * se,
        ci95_high=diff + _Z95 * se,
        n_a=len(a),
        n_b=len(b),
    )


def compare(batch_a: BatchResult, batch_b: BatchResult, metric: str) -> Comparison:
    """Contrast one final metric between two batches (a minus b)."""
    if batch_a.replications < 2 or batch_b.replications < 2:
        raise InsufficientReplicationsError(
            "compare needs >= 2 replications per batch, got "
            f"{batch_a.replications} and {batch_b.replications}"
        )
    try:
        a = metric_values(batch_a, metric)
        b = metric_values(batch_b, metric)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    return compare_values(a, b, metric)


def validate_baseline(batch: BatchResult, reference: dict[str, tuple[float, float]]) -> ValidationReport:
    """Check batch means against reference values within tolerances.

    ``reference`` maps metric name to (value, tolerance); a metric passes
    when |batch mean - value| <= tolerance. Referencing a metric the batch
    does not report is a ConfigError.
    """
    means = batch_means(batch)
    per_metric: dict[str, dict] = {}
    overall = True
    for name in sorted(reference):
        value, tolerance = reference[name]
        if name not in means:
            raise ConfigError(f"reference names unknown metric '{name}'")
        simulated = means[name]
        ok = abs(simulated - value) <= tolerance
        overall = overall and ok
        per_metric[name] = {
            "simulated_mean": simulated,
            "reference_value": value,
            "tolerance": tolerance,
            "pass": ok,
        }
    return ValidationReport(metrics=per_metric, overall_pass=overall)


def mann_whitney_u(a: list[float], b: list[float], alternative: str = "less") -> tuple[float, float]:
    """One-sided Mann-Whitney U via the normal approximation with tie correction.

    Returns (U of sample a, p-value). ``alternative='less'`` tests whether
    values in ``a`` tend to be smaller than values in ``b``; ``'greater'``
    the reverse.
    """
    if alternative not in ("less", "greater"):
        raise ValueError("alternative must be 'less' or 'greater'")
    if not a or not b:
        raise InsufficientReplicationsError("Mann-Whitney needs non-empty samples")
    n1, n2 = len(a), len(b)
    pooled = sorted((v, 0) for v in a) + sorted((v, 1) for v in b)
    pooled.sort(key=lambda p: p[0])
    # Midranks with tie groups.
    ranks: list[float] = [0.0] * (n1 + n2)
    tie_term = 0.0
    i = 0
    while i < len(pooled):
        j = i
        while j < len(pooled) and pooled[j][0] == pooled[i][0]:
            j += 1
        midrank = (i + j + 1) / 2  # ranks are 1-based
        for k in range(i, j):
            ranks[k] = midrank
        t = j - i
        tie_term += t ** 3 - t
        i = j
    r1 = sum(rank for rank, (_, who) in zip(ranks, pooled) if who == 0)
    u1 = r1 - n1 * (n1 + 1) / 2
    mu = n1 * n2 / 2
    n = n1 + n2
    var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if var == 0:
        return u1, 1.0
    if alternative == "less":
        z = (u1 - mu + 0.5) / math.sqrt(var)
        p = _norm_cdf(z)
    else:
        z = (u1 - mu - 0.5) / math.sqrt(var)
        p = 1.0 - _norm_cdf(z)
    return u1, p


def _norm_cdf(z: float) -> float:
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))
