"""Accuracy and revenue-comparison metrics, plus nearest-date selection."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .domain import DemandScenario


class MetricError(ValueError):
    """Undefined metric for the given inputs."""


@dataclass(frozen=True)
class WapeResult:
    """Weighted absolute percentage error: sum|a - f| / sum a."""

    value: float
    numerator: float
    denominator: float


def wape(actuals: Sequence[float], forecasts: Sequence[float]) -> WapeResult:
    a = np.asarray(actuals, dtype=float)
    f = np.asarray(forecasts, dtype=float)
    if a.shape != f.shape or a.ndim != 1:
        raise MetricError("actuals and forecasts must be equal-length series")
    denominator = float(a.sum())
    if denominator <= 0.0:
        raise MetricError("WAPE is undefined when actuals sum to zero")
    numerator = float(np.abs(a - f).sum())
    return WapeResult(value=numerator / denominator,
                      numerator=numerator, denominator=denominator)


def revenue_percent_change(actual_revenue: float, optimal_revenue: float) -> float:
    """Percent change of the optimal expected revenue over the realized one."""
    if actual_revenue <= 0:
        raise MetricError("percent change requires positive actual revenue")
    return 100.0 * (optimal_revenue - actual_revenue) / actual_revenue


def select_input_dates(
    target: DemandScenario,
    candidates: Sequence[DemandScenario],
    k: int = 15,
    window: tuple[int, int] = (1, 72),
) -> tuple[list[DemandScenario], dict]:
    """Pick the k candidates whose warm-up revenue curve is closest in WAPE.

    Candidates must share the target's day of week and lie strictly before
    it. Closeness compares per-day booked revenue over the warm-up window;
    ties break toward the earlier date. Returns (selected, wape_by_date).
    """
    if k < 1:
        raise MetricError("k must be at least 1")
    lo, hi = window
    target_series = target.revenue_by_day()[lo - 1 : hi]
    if target_series.sum() <= 0:
        raise MetricError("target has no booked revenue in the warm-up window")
    for c in candidates:
        if c.checkin_date >= target.checkin_date:
            raise MetricError(
                f"candidate {c.checkin_date} is not strictly before the target"
            )
        if c.checkin_date.weekday() != target.checkin_date.weekday():
            raise MetricError(
                f"candidate {c.checkin_date} is a different day of week"
            )
    scored = []
    for c in candidates:
        series = c.revenue_by_day()[lo - 1 : hi]
        scored.append((wape(target_series, series).value, c.checkin_date, c))
    scored.sort(key=lambda item: (item[0], item[1]))
    if len(scored) < k:
        warnings.warn(
            f"only {len(scored)} candidates available, fewer than k={k}",
            stacklevel=2,
        )
    chosen = scored[:k]
    return [c for _, _, c in chosen], {date: value for value, date, _ in chosen}
