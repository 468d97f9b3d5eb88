"""Controlled simulation environment: known demand curves, Poisson arrivals,
accuracy studies and the scenario-count sensitivity sweep.

Three guest segments with known arrival-rate curves over a 28-day horizon
generate booking scenarios: each day one rate class is open and bookings
arrive Poisson-distributed at that class's choice-set demand. Studies fit
spline curves back to the simulated data, compare in/out-of-sample WAPE
against the generating curves, and price both with the dynamic program.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import dp, metrics, spline
from .domain import DemandScenario

_FORMS = ("sin_hump", "sin_literal", "linear", "exponential", "constant")


class SimError(ValueError):
    """Invalid simulation configuration."""


@dataclass(frozen=True)
class RateClassSpec:
    """One segment's arrival-rate curve: a named form with parameters."""

    price: float
    form: str
    amplitude: float = 0.0
    slope: float = 0.0
    growth: float = 0.0

    def __post_init__(self) -> None:
        if self.form not in _FORMS:
            raise SimError(f"unknown curve form {self.form!r}")

    def rate_at(self, t: float, horizon: int) -> float:
        if self.form == "sin_hump":
            return self.amplitude * math.sin(math.pi * t / horizon)
        if self.form == "sin_literal":
            return self.amplitude * math.sin(t)
        if self.form == "linear":
            return self.slope * t
        if self.form == "exponential":
            return self.amplitude * math.exp(self.growth * t)
        return self.amplitude


@dataclass(frozen=True)
class TrueCurveSpec:
    """The generating curves: one spec per rate class, prices ascending."""

    classes: tuple[RateClassSpec, ...]
    horizon: int = 28

    def __post_init__(self) -> None:
        prices = [c.price for c in self.classes]
        if sorted(prices) != prices or len(set(prices)) != len(prices):
            raise SimError("rate class prices must be strictly ascending")
        if self.horizon < 3:
            raise SimError("horizon must cover at least 3 days")


def default_simulation_curves(curve_form: str = "sin_hump") -> TrueCurveSpec:
    """Budget / steady / last-minute-business segments at 100, 200, 300.

    The budget segment's printed form oscillates through negative values when
    read with t in days; the default replaces it with a single nonnegative
    hump that peaks mid-horizon and dies at check-in, matching the narrative.
    Pass curve_form="sin_literal" for the printed form clamped at zero.
    """
    if curve_form not in ("sin_hump", "sin_literal"):
        raise SimError("curve_form must be sin_hump or sin_literal")
    return TrueCurveSpec(classes=(
        RateClassSpec(price=100.0, form=curve_form, amplitude=0.43),
        RateClassSpec(price=200.0, form="linear", slope=0.16),
        RateClassSpec(price=300.0, form="exponential", amplitude=0.02, growth=0.18),
    ))


class TrueCurves:
    """Evaluator over the generating curves, individual and choice-set form."""

    def __init__(self, spec: TrueCurveSpec):
        self.spec = spec
        self.horizon = spec.horizon
        self.rates = tuple(int(c.price) for c in spec.classes)
        self.clamped_evaluations = 0

    def individual(self, price: float, t: float) -> float:
        """One segment's arrival rate, clamped at zero."""
        for c in self.spec.classes:
            if c.price == price:
                value = c.rate_at(t, self.horizon)
                if value < 0.0:
                    self.clamped_evaluations += 1
                    return 0.0
                return value
        raise SimError(f"no rate class at price {price}")

    def demand(self, price: float, t: float) -> float:
        """Choice-set demand at a posted price: all segments paying at least it."""
        return sum(
            self.individual(c.price, t)
            for c in self.spec.classes
            if c.price >= price
        )

    def choice_set_curve(self, size: int, t: float) -> float:
        """Demand pool of the choice set with `size` classes in it.

        Size 1 is the top-price pool; the largest set sums every individual
        curve (the cheapest price's pool).
        """
        if not 1 <= size <= len(self.rates):
            raise SimError(f"choice-set size {size} out of range")
        price = sorted(self.rates, reverse=True)[size - 1]
        return self.demand(price, t)

    def day_span(self) -> tuple[float, float]:
        return 1.0, float(self.horizon)


def generate_true_curves(spec: TrueCurveSpec) -> TrueCurves:
    return TrueCurves(spec)


@dataclass(frozen=True)
class SimConfig:
    """Knobs for a simulation study; every random draw flows from `seed`."""

    scenario_count: int = 50
    seed: int = 0
    open_rate_weights: tuple[float, ...] | None = None
    smoothing_sets: tuple[tuple[float, ...], ...] = ((0.1, 0.2, 0.3), (0.7, 0.8, 0.9))
    capacity: int = 100
    curve_form: str = "sin_hump"
    out_of_sample_count: int = 100
    subdivisions_per_day: int = 8

    def __post_init__(self) -> None:
        if self.scenario_count < 1:
            raise SimError("scenario_count must be at least 1")
        if self.open_rate_weights is not None:
            total = sum(self.open_rate_weights)
            if abs(total - 1.0) > 1e-9:
                raise SimError("open-rate weights must sum to 1")
            if any(w < 0 for w in self.open_rate_weights):
                raise SimError("open-rate weights cannot be negative")

    def weights_for(self, n_classes: int) -> np.ndarray:
        if self.open_rate_weights is None:
            return np.full(n_classes, 1.0 / n_classes)
        if len(self.open_rate_weights) != n_classes:
            raise SimError("one open-rate weight per rate class required")
        return np.asarray(self.open_rate_weights)


_EPOCH = dt.date(2018, 1, 4)  # a Thursday; synthetic check-in dates step weekly


def _simulate(
    curves: TrueCurves,
    n_scenarios: int,
    rng: np.random.Generator,
    weights: np.ndarray,
    start_index: int = 0,
) -> tuple[list[DemandScenario], np.ndarray]:
    """Draw scenarios plus the open-rate class index per (scenario, day)."""
    T = curves.horizon
    rates = curves.rates
    opens = rng.choice(len(rates), size=(n_scenarios, T), p=weights)
    scenarios = []
    for s in range(n_scenarios):
        counts = np.zeros((len(rates), T), dtype=np.int64)
        for t in range(1, T + 1):
            j = int(opens[s, t - 1])
            lam = curves.demand(rates[j], float(t))
            counts[j, t - 1] = rng.poisson(lam)
        scenarios.append(DemandScenario(
            checkin_date=_EPOCH + dt.timedelta(weeks=start_index + s),
            rates=rates,
            counts=counts,
        ))
    return scenarios, opens


def simulate_scenarios(curves: TrueCurves, config: SimConfig) -> list[DemandScenario]:
    """Sample booking scenarios: one open rate per day, Poisson arrivals."""
    rng = np.random.default_rng(config.seed)
    weights = config.weights_for(len(curves.rates))
    scenarios, _ = _simulate(curves, config.scenario_count, rng, weights)
    return scenarios


def open_day_observations(
    scenarios: Sequence[DemandScenario], opens: np.ndarray
) -> dict[int, dict[float, list[float]]]:
    """Observation sets per rate class from days that class was open.

    Includes zero-arrival days (the class was open, nobody came), which keeps
    the per-day samples unbiased for the class's demand level.
    """
    rates = scenarios[0].rates
    samples: dict[int, dict[float, list[float]]] = {r: {} for r in rates}
    for s, scenario in enumerate(scenarios):
        for t in range(1, scenario.horizon_length + 1):
            j = int(opens[s, t - 1])
            samples[rates[j]].setdefault(float(t), []).append(
                float(scenario.counts[j, t - 1])
            )
    return samples


def _fit_open_day_curves(
    scenarios: Sequence[DemandScenario],
    opens: np.ndarray,
    smoothing_set: Sequence[float],
    knots: Sequence[float],
):
    samples = open_day_observations(scenarios, opens)
    obs = spline.FitObservations.from_mapping(samples, knots=knots)
    rates = scenarios[0].rates
    smoothing = {r: g for r, g in zip(rates, smoothing_set)}
    return spline.fit(obs, smoothing=smoothing)


def sample_arrival_stream(
    rates: dp.ArrivalRates, rng: np.random.Generator
) -> list[float | None]:
    """One willingness-to-pay per interval (or None), consistent with `rates`.

    The booking probabilities are nested by price, so a single uniform draw
    per interval yields an arrival whose acceptance probability at any posted
    price r_j equals lam_j.
    """
    lam = np.maximum.accumulate(rates.lam, axis=0)  # enforce nesting
    draws = rng.random(rates.n_intervals)
    stream: list[float | None] = []
    for i, u in enumerate(draws):
        wtp = None
        for j, price in enumerate(rates.prices):
            if u < lam[j, i]:
                wtp = price
                break
        stream.append(wtp)
    return stream


def _wape_percent(actuals, forecasts) -> float | None:
    try:
        return 100.0 * metrics.wape(actuals, forecasts).value
    except metrics.MetricError:
        return None


def _distribution(values: list[float]) -> dict | None:
    if not values:
        return None
    arr = np.asarray(values)
    return {
        "mean": float(arr.mean()),
        "median": float(np.median(arr)),
        "q1": float(np.quantile(arr, 0.25)),
        "q3": float(np.quantile(arr, 0.75)),
        "n": int(arr.size),
    }


@dataclass
class SmoothingSetResult:
    smoothing_set: tuple[float, ...]
    in_sample_wape_pct: dict[int, float]
    expected_revenue: float
    curves_json: str
    oos_wape_fitted: dict[int, dict | None]
    oos_wape_true: dict[int, dict | None]
    oos_pooled_fitted: dict | None
    oos_pooled_true: dict | None


@dataclass
class SimulationStudyReport:
    config: SimConfig
    curve_form: str
    expected_revenue_true_curves: float
    results: list[SmoothingSetResult]
    clamped_curve_evaluations: int

    def to_json(self) -> str:
        return json.dumps({
            "curve_form": self.curve_form,
            "seed": self.config.seed,
            "scenario_count": self.config.scenario_count,
            "capacity": self.config.capacity,
            "expected_revenue_true_curves": self.expected_revenue_true_curves,
            "clamped_curve_evaluations": self.clamped_curve_evaluations,
            "smoothing_sets": [
                {
                    "smoothing": list(r.smoothing_set),
                    "in_sample_wape_pct": {str(k): v for k, v in r.in_sample_wape_pct.items()},
                    "expected_revenue": r.expected_revenue,
                    "out_of_sample_wape_fitted": {str(k): v for k, v in r.oos_wape_fitted.items()},
                    "out_of_sample_wape_true": {str(k): v for k, v in r.oos_wape_true.items()},
                    "out_of_sample_pooled_fitted": r.oos_pooled_fitted,
                    "out_of_sample_pooled_true": r.oos_pooled_true,
                    "curves": json.loads(r.curves_json),
                }
                for r in self.results
            ],
        }, sort_keys=True)


def run_simulation_study(
    config: SimConfig, spec: TrueCurveSpec | None = None
) -> SimulationStudyReport:
    """Fit simulated scenarios per smoothing set and score the results."""
    spec = spec or default_simulation_curves(config.curve_form)
    curves_true = generate_true_curves(spec)
    seeds = np.random.SeedSequence(config.seed).spawn(2)
    weights = config.weights_for(len(curves_true.rates))

    scenarios, opens = _simulate(
        curves_true, config.scenario_count, np.random.default_rng(seeds[0]), weights
    )
    fresh, fresh_opens = _simulate(
        curves_true, config.out_of_sample_count,
        np.random.default_rng(seeds[1]), weights,
        start_index=config.scenario_count,
    )

    grid_true = dp.refine_time_grid(curves_true, config.subdivisions_per_day)
    revenue_true = dp.solve_dp(grid_true, config.capacity)[0].expected_revenue

    knots = [float(t) for t in range(1, curves_true.horizon + 1)]
    fit_observations = spline.FitObservations.from_mapping(
        open_day_observations(scenarios, opens), knots=knots
    )
    results = []
    for smoothing_set in config.smoothing_sets:
        fitted, diagnostics = _fit_open_day_curves(scenarios, opens, smoothing_set, knots)

        in_sample = {}
        for rate in fitted.rates:
            obs = fit_observations.by_rate[rate]
            fitted_at = [fitted.value(rate, x) for x in obs.xs]
            in_sample[rate] = _wape_percent(obs.means, fitted_at)

        grid_fitted = dp.refine_time_grid(fitted, config.subdivisions_per_day)
        revenue_fitted = dp.solve_dp(grid_fitted, config.capacity)[0].expected_revenue

        per_class_fitted: dict[int, list[float]] = {r: [] for r in fitted.rates}
        per_class_true: dict[int, list[float]] = {r: [] for r in fitted.rates}
        pooled_fitted: list[float] = []
        pooled_true: list[float] = []
        for s, scenario in enumerate(fresh):
            for j, rate in enumerate(scenario.rates):
                days = [t for t in range(1, scenario.horizon_length + 1)
                        if fresh_opens[s, t - 1] == j]
                if not days:
                    continue
                actuals = [float(scenario.counts[j, t - 1]) for t in days]
                w_fit = _wape_percent(actuals, [fitted.value(rate, float(t)) for t in days])
                w_true = _wape_percent(actuals, [curves_true.demand(rate, float(t)) for t in days])
                if w_fit is not None and w_true is not None:
                    per_class_fitted[rate].append(w_fit)
                    per_class_true[rate].append(w_true)
                    pooled_fitted.append(w_fit)
                    pooled_true.append(w_true)

        results.append(SmoothingSetResult(
            smoothing_set=tuple(smoothing_set),
            in_sample_wape_pct={r: v for r, v in in_sample.items()},
            expected_revenue=revenue_fitted,
            curves_json=fitted.to_json(diagnostics),
            oos_wape_fitted={r: _distribution(v) for r, v in per_class_fitted.items()},
            oos_wape_true={r: _distribution(v) for r, v in per_class_true.items()},
            oos_pooled_fitted=_distribution(pooled_fitted),
            oos_pooled_true=_distribution(pooled_true),
        ))

    return SimulationStudyReport(
        config=config,
        curve_form=config.curve_form,
        expected_revenue_true_curves=revenue_true,
        results=results,
        clamped_curve_evaluations=curves_true.clamped_evaluations,
    )


def _sensitivity_cell(args) -> tuple[int, int, list[float]]:
    """One sweep cell: scenario count x repetition -> revenue per smoothing set."""
    config_dict, curve_form, count, rep = args
    config = SimConfig(**config_dict)
    spec = default_simulation_curves(curve_form)
    curves_true = generate_true_curves(spec)
    weights = config.weights_for(len(curves_true.rates))
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, count, rep)))
    scenarios, opens = _simulate(curves_true, count, rng, weights)
    knots = [float(t) for t in range(1, curves_true.horizon + 1)]
    revenues = []
    for smoothing_set in config.smoothing_sets:
        fitted, _ = _fit_open_day_curves(scenarios, opens, smoothing_set, knots)
        grid = dp.refine_time_grid(fitted, config.subdivisions_per_day)
        revenues.append(dp.solve_dp(grid, config.capacity)[0].expected_revenue)
    return count, rep, revenues


@dataclass
class SensitivityReport:
    config: SimConfig
    counts: tuple[int, ...]
    repetitions: int
    # revenue[set_index][count] -> list of revenues over repetitions
    revenue: dict[int, dict[int, list[float]]]

    @property
    def runs_per_set(self) -> int:
        return sum(len(v) for v in self.revenue[0].values())

    def cell_summary(self, set_index: int, count: int) -> dict:
        values = np.asarray(self.revenue[set_index][count])
        summary = {
            "mean": float(values.mean()),
            "sd": float(values.std(ddof=1)) if values.size > 1 else None,
            "n": int(values.size),
        }
        if values.size > 1:
            half = 1.96 * summary["sd"] / math.sqrt(values.size)
            summary["ci95"] = [summary["mean"] - half, summary["mean"] + half]
        else:
            summary["ci95"] = None
        return summary

    def mean_stability(self, set_index: int) -> tuple[float, float]:
        """(spread of per-count means, typical within-count dispersion)."""
        means = [np.mean(self.revenue[set_index][c]) for c in self.counts]
        sds = [np.std(self.revenue[set_index][c], ddof=1)
               for c in self.counts if len(self.revenue[set_index][c]) > 1]
        return float(np.std(means)), float(np.mean(sds)) if sds else float("nan")

    def to_json(self) -> str:
        return json.dumps({
            "counts": list(self.counts),
            "repetitions": self.repetitions,
            "smoothing_sets": [list(s) for s in self.config.smoothing_sets],
            "cells": [
                {
                    "set_index": si,
                    "count": count,
                    **self.cell_summary(si, count),
                    "revenues": self.revenue[si][count],
                }
                for si in sorted(self.revenue)
                for count in self.counts
            ],
        }, sort_keys=True)


def run_sensitivity(
    config: SimConfig,
    counts: Sequence[int] = tuple(range(10, 51)),
    repetitions: int = 10,
    processes: int | None = None,
) -> SensitivityReport:
    """Sweep the scenario count, re-fitting `repetitions` times per count."""
    counts = tuple(counts)
    if not counts or repetitions < 1:
        raise SimError("sweep needs at least one count and one repetition")
    config_dict = {
        "scenario_count": config.scenario_count,
        "seed": config.seed,
        "open_rate_weights": config.open_rate_weights,
        "smoothing_sets": config.smoothing_sets,
        "capacity": config.capacity,
        "curve_form": config.curve_form,
        "out_of_sample_count": config.out_of_sample_count,
        "subdivisions_per_day": config.subdivisions_per_day,
    }
    jobs = [(config_dict, config.curve_form, count, rep)
            for count in counts for rep in range(repetitions)]
    revenue: dict[int, dict[int, list[float]]] = {
        si: {c: [] for c in counts} for si in range(len(config.smoothing_sets))
    }
    if processes and processes > 1:
        with ProcessPoolExecutor(max_workers=processes) as pool:
            outcomes = list(pool.map(_sensitivity_cell, jobs, chunksize=4))
    else:
        outcomes = [_sensitivity_cell(job) for job in jobs]
    for count, rep, revenues in outcomes:
        for si, value in enumerate(revenues):
            revenue[si][count].append(value)
    return SensitivityReport(
        config=config, counts=counts, repetitions=repetitions, revenue=revenue
    )
