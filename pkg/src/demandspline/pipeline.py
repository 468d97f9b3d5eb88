"""End-to-end backtest: nearest-date selection, fitting, pricing, scoring.

For each target check-in date, the closest historical dates (same weekday,
strictly earlier, ranked by warm-up revenue WAPE) are fitted over the final
forecast window, the dynamic program prices that window with the target's
realized booking count as capacity, and the optimal expected revenue is
compared against the target's actual revenue.
"""

from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dp, metrics, spline
from .domain import DemandScenario, cumulate_choice_sets
from .store import PropertyConfig, ScenarioStore

WEEKDAY_NAMES = (
    "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday",
)


class BacktestError(ValueError):
    """Invalid backtest configuration or inputs."""


@dataclass(frozen=True)
class BacktestConfig:
    horizon_days: int = 100
    warmup_end: int = 72
    input_dates: int = 15
    g_low: float = 0.4
    g_high: float = 0.7
    transform: bool = False
    subdivisions_per_day: int = 8
    min_distinct_days: int = 3

    def __post_init__(self) -> None:
        if not 0 <= self.g_low <= self.g_high <= 1.0:
            raise BacktestError("need 0 <= g_low <= g_high <= 1")
        if not 3 <= self.warmup_end < self.horizon_days:
            raise BacktestError("warm-up window must end inside the horizon")
        if self.input_dates < 1:
            raise BacktestError("at least one input date required")

    @property
    def forecast_days(self) -> int:
        return self.horizon_days - self.warmup_end

    @property
    def forecast_window(self) -> tuple[int, int]:
        return (self.warmup_end + 1, self.horizon_days)


def interpolate_smoothing(
    rates: Sequence[int], g_low: float, g_high: float
) -> dict[int, float]:
    """Linear smoothing per rate from g_low (cheapest) to g_high (priciest)."""
    if not 0 <= g_low <= 1 and 0 <= g_high <= 1:
        raise BacktestError("smoothing anchors must lie in [0, 1]")
    ordered = sorted(rates)
    if not ordered:
        raise BacktestError("no rates to interpolate over")
    if len(ordered) == 1:
        return {ordered[0]: g_low}
    step = (g_high - g_low) / (len(ordered) - 1)
    return {rate: g_low + i * step for i, rate in enumerate(ordered)}


@dataclass
class TargetResult:
    target_date: dt.date
    selected_dates: list[dt.date]
    selection_wape: dict[str, float]
    excluded_rates: list[int]
    capacity: int
    expected_revenue: float | None
    actual_revenue: int
    percent_change: float | None
    fit_wape_by_rate: dict[int, float | None]
    diagnostics: dict | None
    skipped_reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "target_date": self.target_date.isoformat(),
            "day_of_week": WEEKDAY_NAMES[self.target_date.weekday()],
            "selected_dates": [d.isoformat() for d in self.selected_dates],
            "selection_wape": self.selection_wape,
            "excluded_rates": self.excluded_rates,
            "capacity": self.capacity,
            "expected_revenue": self.expected_revenue,
            "actual_revenue": self.actual_revenue,
            "percent_change": self.percent_change,
            "fit_wape_by_rate": {str(k): v for k, v in self.fit_wape_by_rate.items()},
            "diagnostics": self.diagnostics,
            "skipped_reason": self.skipped_reason,
        }


@dataclass
class BacktestReport:
    config: BacktestConfig
    property_name: str
    rows: list[TargetResult]

    def scored_rows(self) -> list[TargetResult]:
        return [r for r in self.rows if r.percent_change is not None]

    def aggregates_by_day_of_week(self) -> dict[str, dict]:
        """Mean and standard deviation of percent change per weekday + overall."""
        groups: dict[str, list[float]] = {}
        for row in self.scored_rows():
            day = WEEKDAY_NAMES[row.target_date.weekday()]
            groups.setdefault(day, []).append(row.percent_change)
        out: dict[str, dict] = {}
        ordered = [d for d in WEEKDAY_NAMES if d in groups]
        for day in ordered:
            values = np.asarray(groups[day])
            out[day] = {
                "mean": float(values.mean()),
                "sd": float(values.std(ddof=1)) if values.size > 1 else None,
                "n": int(values.size),
            }
        everything = np.asarray([r.percent_change for r in self.scored_rows()])
        if everything.size:
            out["Overall"] = {
                "mean": float(everything.mean()),
                "sd": float(everything.std(ddof=1)) if everything.size > 1 else None,
                "n": int(everything.size),
            }
        return out

    def wape_by_rate_and_day(self) -> dict[int, dict[str, float | None]]:
        """Mean fit WAPE per rate per weekday; None marks no fittable data."""
        rates: set[int] = set()
        for row in self.rows:
            rates.update(int(r) for r in row.fit_wape_by_rate)
            rates.update(row.excluded_rates)
        table: dict[int, dict[str, float | None]] = {}
        for rate in sorted(rates):
            per_day: dict[str, float | None] = {}
            for day_index, day in enumerate(WEEKDAY_NAMES):
                values = [
                    row.fit_wape_by_rate.get(rate)
                    for row in self.rows
                    if row.target_date.weekday() == day_index
                    and row.fit_wape_by_rate.get(rate) is not None
                ]
                per_day[day] = float(np.mean(values)) if values else None
            table[rate] = per_day
        return table

    def to_json(self) -> str:
        return json.dumps({
            "property": self.property_name,
            "config": {
                "horizon_days": self.config.horizon_days,
                "warmup_end": self.config.warmup_end,
                "forecast_days": self.config.forecast_days,
                "input_dates": self.config.input_dates,
                "g_low": self.config.g_low,
                "g_high": self.config.g_high,
                "transform": self.config.transform,
            },
            "rows": [row.to_dict() for row in self.rows],
            "percent_change_by_day_of_week": self.aggregates_by_day_of_week(),
            "wape_by_rate_and_day": {
                str(rate): per_day
                for rate, per_day in self.wape_by_rate_and_day().items()
            },
        }, sort_keys=True)

    def to_percent_change_csv(self) -> str:
        """Day-of-week rows of mean/SD percent change."""
        lines = ["day_of_week,mean,sd,n"]
        for day, stats in self.aggregates_by_day_of_week().items():
            sd = "" if stats["sd"] is None else f"{stats['sd']:.2f}"
            lines.append(f"{day},{stats['mean']:.2f},{sd},{stats['n']}")
        return "\n".join(lines) + "\n"

    def to_wape_csv(self) -> str:
        """Rate rows by weekday columns of mean fit WAPE; '-' when no data."""
        lines = ["rate," + ",".join(WEEKDAY_NAMES)]
        for rate, per_day in self.wape_by_rate_and_day().items():
            cells = [
                "-" if per_day[day] is None else f"{per_day[day]:.2f}"
                for day in WEEKDAY_NAMES
            ]
            lines.append(f"{rate}," + ",".join(cells))
        return "\n".join(lines) + "\n"


def _distinct_positive_days(
    scenarios: Sequence[DemandScenario], rate_index: int, window: tuple[int, int]
) -> int:
    lo, hi = window
    days = set()
    for s in scenarios:
        rows = s.counts
        raw = rows[rate_index] - (rows[rate_index + 1] if rate_index + 1 < rows.shape[0] else 0)
        for t in range(lo, hi + 1):
            if raw[t - 1] > 0:
                days.add(t)
    return len(days)


def run_backtest(
    targets: Sequence[dt.date],
    store: ScenarioStore,
    config: BacktestConfig | None = None,
) -> BacktestReport:
    """Backtest every target date against the store's earlier history."""
    config = config or BacktestConfig()
    prop = store.property_config()
    if prop.horizon_days != config.horizon_days:
        raise BacktestError(
            f"store horizon {prop.horizon_days} != config horizon {config.horizon_days}"
        )
    history = store.load_all()
    rows: list[TargetResult] = []
    for target_date in sorted(targets):
        target = store.load(target_date)
        candidates = [
            s for s in history
            if s.checkin_date < target_date
            and s.checkin_date.weekday() == target_date.weekday()
        ]
        # Temporal hygiene: nothing at or after the target may enter the fit.
        assert all(c.checkin_date < target_date for c in candidates)
        row = _run_single_target(target, candidates, config)
        rows.append(row)
    return BacktestReport(config=config, property_name=prop.name, rows=rows)


def _run_single_target(
    target: DemandScenario,
    candidates: list[DemandScenario],
    config: BacktestConfig,
) -> TargetResult:
    window = config.forecast_window
    lo, hi = window
    actual_revenue = int(
        (np.asarray(target.rates) @ target.window(lo, hi)).sum()
    )
    capacity = int(target.window(lo, hi).sum())

    def skipped(reason: str) -> TargetResult:
        return TargetResult(
            target_date=target.checkin_date,
            selected_dates=[], selection_wape={}, excluded_rates=[],
            capacity=capacity, expected_revenue=None,
            actual_revenue=actual_revenue, percent_change=None,
            fit_wape_by_rate={}, diagnostics=None, skipped_reason=reason,
        )

    if not candidates:
        return skipped("no earlier same-weekday history")
    try:
        selected, scores = metrics.select_input_dates(
            target, candidates, k=config.input_dates, window=(1, config.warmup_end)
        )
    except metrics.MetricError as exc:
        return skipped(f"date selection failed: {exc}")
    assert all(s.checkin_date < target.checkin_date for s in selected)

    cumulated = [cumulate_choice_sets(s) for s in selected]
    all_rates = list(target.rates)
    surviving, excluded = [], []
    for i, rate in enumerate(all_rates):
        distinct = _distinct_positive_days(cumulated, i, window)
        (surviving if distinct >= config.min_distinct_days else excluded).append(rate)
    if not surviving:
        return skipped("no rate class has enough observation days")

    smoothing = interpolate_smoothing(surviving, config.g_low, config.g_high)
    try:
        obs = spline.FitObservations.from_scenarios(
            cumulated,
            transform=config.transform,
            window=window,
            include_zero_cells=False,
            rates=surviving,
            min_distinct=config.min_distinct_days,
        )
        curves, diagnostics = spline.fit(
            obs, smoothing=smoothing, transform=config.transform
        )
    except spline.SplineError as exc:
        return skipped(f"fit failed: {exc}")

    grid = dp.refine_time_grid(curves, config.subdivisions_per_day)
    expected = dp.solve_dp(grid, capacity)[0].expected_revenue

    percent = None
    if actual_revenue > 0:
        percent = metrics.revenue_percent_change(actual_revenue, expected)

    target_cum = cumulate_choice_sets(target)
    fit_wape: dict[int, float | None] = {}
    for rate in surviving:
        idx = target_cum.rates.index(rate)
        actuals = target_cum.window(lo, hi)[idx].astype(float)
        span = curves.day_span()
        xs = [float(t - lo + 1) for t in range(lo, hi + 1)]
        forecasts = [
            curves.value(rate, x) if span[0] <= x <= span[1] else 0.0 for x in xs
        ]
        try:
            fit_wape[rate] = 100.0 * metrics.wape(actuals, forecasts).value
        except metrics.MetricError:
            fit_wape[rate] = None

    return TargetResult(
        target_date=target.checkin_date,
        selected_dates=[s.checkin_date for s in selected],
        selection_wape={d.isoformat(): v for d, v in scores.items()},
        excluded_rates=excluded,
        capacity=capacity,
        expected_revenue=expected,
        actual_revenue=actual_revenue,
        percent_change=percent,
        fit_wape_by_rate=fit_wape,
        diagnostics=diagnostics.to_dict(),
    )


def build_synthetic_store(
    root,
    n_dates: int = 70,
    seed: int = 0,
    horizon_days: int = 100,
    capacity: int = 120,
    posted_rates: tuple[int, ...] | None = None,
) -> ScenarioStore:
    """A store generated under a fixed, deliberately suboptimal rate policy.

    Three willingness-to-pay bands book over the horizon; every date posts
    the same rotating schedule over `posted_rates` (default: all three, by
    day), so bookings land at the posted rate whenever the band accepts it.
    Useful for backtests: the policy ignores demand, leaving headroom an
    optimal policy should recover. Restricting `posted_rates` leaves the
    remaining rate classes without a single observation.
    """
    rng = np.random.default_rng(seed)
    rates = (10000, 12000, 14000)
    schedule = posted_rates or rates
    if any(p not in rates for p in schedule):
        raise BacktestError("posted_rates must be drawn from the ladder")
    bands = {10000: 1.1, 12000: 0.75, 14000: 0.45}  # arrivals/day at full pace

    def band_rate(price: int, t: int) -> float:
        ramp = 0.25 + 0.75 * (t / horizon_days) ** 2
        return bands[price] * ramp

    scenarios = []
    start = dt.date(2017, 1, 5)  # a Thursday
    for k in range(n_dates):
        date = start + dt.timedelta(weeks=k)
        counts = np.zeros((3, horizon_days), dtype=np.int64)
        for t in range(1, horizon_days + 1):
            price = schedule[(t - 1) % len(schedule)]
            lam = sum(band_rate(p, t) for p in rates if p >= price)
            counts[rates.index(price), t - 1] = rng.poisson(lam)
        scenarios.append(DemandScenario(checkin_date=date, rates=rates, counts=counts))

    config = PropertyConfig(
        name="synthetic",
        capacity=capacity,
        rate_minimum=10000,
        rate_maximum=14000,
        rate_step=2000,
        horizon_days=horizon_days,
    )
    return ScenarioStore.create(root, config, scenarios)
