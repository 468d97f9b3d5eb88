"""HTTP facade over the store, fitting, pricing and backtesting.

All payloads are JSON: money in integer minor units, dates ISO-8601. Fit and
optimization results are pure functions of the store contents and request
body, cached under a hash of both so repeated requests are cheap.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field, field_validator

from . import dp, pipeline, spline
from .domain import cumulate_choice_sets
from .store import ScenarioStore


class FitRequest(BaseModel):
    dates: list[dt.date] = Field(min_length=1)
    g_low: float = 0.4
    g_high: float = 0.7
    transform: bool = False

    @field_validator("g_low", "g_high")
    @classmethod
    def _unit_interval(cls, value: float, info):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{info.field_name} must lie in [0, 1]")
        return value


class OptimizeRequest(BaseModel):
    fit_id: str
    capacity: int = Field(ge=0)


class WhatifRequest(BaseModel):
    fit_id: str
    capacity: int = Field(ge=0)
    overrides: dict[int, int] = Field(default_factory=dict)  # horizon day -> rate


class BacktestRequest(BaseModel):
    start: dt.date
    end: dt.date
    input_dates: int = 15
    g_low: float = 0.4
    g_high: float = 0.7
    transform: bool = False

    @field_validator("g_low", "g_high")
    @classmethod
    def _unit_interval(cls, value: float, info):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{info.field_name} must lie in [0, 1]")
        return value


@dataclass
class _FitEntry:
    curves: spline.RateCurveSet
    diagnostics: spline.FitDiagnostics
    window: tuple[int, int]
    response: dict


def _request_hash(kind: str, payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, default=str)
    return hashlib.sha256(f"{kind}:{canonical}".encode()).hexdigest()[:16]


def create_app(store: ScenarioStore) -> FastAPI:
    store.validate()
    app = FastAPI(title="demandspline", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"],
    )
    fits: dict[str, _FitEntry] = {}
    optimize_cache: dict[str, dict] = {}

    @app.get("/properties")
    def properties() -> dict:
        manifest = store.manifest()
        return {
            "properties": [{
                **manifest["property"],
                "dates": manifest["dates"],
            }]
        }

    @app.get("/scenarios/{date}")
    def scenario(date: str) -> dict:
        try:
            parsed = dt.date.fromisoformat(date)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        try:
            loaded = store.load(parsed)
        except KeyError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        from .store import scenario_to_document

        return scenario_to_document(loaded)

    @app.post("/fit")
    def fit(request: FitRequest) -> dict:
        if request.g_low > request.g_high:
            raise HTTPException(
                status_code=422, detail="g_low must not exceed g_high"
            )
        fit_id = _request_hash("fit", request.model_dump())
        if fit_id in fits:
            return fits[fit_id].response
        config = store.property_config()
        horizon = config.horizon_days
        window = (max(1, horizon - 27), horizon)
        scenarios = []
        for date in request.dates:
            try:
                scenarios.append(store.load(date))
            except KeyError as exc:
                raise HTTPException(status_code=404, detail=str(exc)) from exc
        cumulated = [cumulate_choice_sets(s) for s in scenarios]
        rates = sorted(cumulated[0].rates)
        surviving = [
            rate for i, rate in enumerate(rates)
            if pipeline._distinct_positive_days(cumulated, i, window) >= 3
        ]
        if not surviving:
            raise HTTPException(
                status_code=422, detail="no rate class has enough observed days"
            )
        smoothing = pipeline.interpolate_smoothing(
            surviving, request.g_low, request.g_high
        )
        try:
            obs = spline.FitObservations.from_scenarios(
                cumulated, transform=request.transform, window=window,
                include_zero_cells=False, rates=surviving,
            )
            curves, diagnostics = spline.fit(
                obs, smoothing=smoothing, transform=request.transform
            )
        except spline.SplineError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        response = {
            "fit_id": fit_id,
            "window": {"first_day": window[0], "last_day": window[1]},
            "excluded_rates": [r for r in rates if r not in surviving],
            "curves": json.loads(curves.to_json(diagnostics)),
        }
        fits[fit_id] = _FitEntry(
            curves=curves, diagnostics=diagnostics, window=window, response=response
        )
        return response

    def _get_fit(fit_id: str) -> _FitEntry:
        if fit_id not in fits:
            raise HTTPException(status_code=404, detail=f"unknown fit {fit_id!r}")
        return fits[fit_id]

    @app.post("/optimize")
    def optimize(request: OptimizeRequest) -> dict:
        key = _request_hash("optimize", request.model_dump())
        if key in optimize_cache:
            return optimize_cache[key]
        entry = _get_fit(request.fit_id)
        grid = dp.refine_time_grid(entry.curves)
        table, policy = dp.solve_dp(grid, request.capacity)
        day_zero = entry.window[0] - 1
        response = {
            "fit_id": request.fit_id,
            "capacity": request.capacity,
            "expected_revenue": table.expected_revenue,
            "intervals_per_day": grid.intervals_per_day,
            "first_day": day_zero + grid.day_offset,
            "prices": list(policy.prices),
            "policy": policy.choice[:-1].tolist(),
            "value_table": table.values.tolist(),
            "tie_rule": policy.tie_rule,
        }
        optimize_cache[key] = response
        return response

    @app.post("/whatif")
    def whatif(request: WhatifRequest) -> dict:
        entry = _get_fit(request.fit_id)
        grid = dp.refine_time_grid(entry.curves)
        table, policy = dp.solve_dp(grid, request.capacity)
        day_zero = entry.window[0] - 1
        overrides = {}
        for day, rate in request.overrides.items():
            grid_day = day - day_zero
            if float(rate) not in grid.prices:
                raise HTTPException(
                    status_code=422,
                    detail=f"override rate {rate} is not a fitted rate class",
                )
            overrides[grid_day] = float(rate)
        try:
            value = dp.evaluate_fixed_policy(
                grid, request.capacity, policy, overrides=overrides
            )
        except dp.PricingError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc
        optimal = table.expected_revenue
        gap = 100.0 * (value - optimal) / optimal if optimal > 0 else 0.0
        return {
            "fit_id": request.fit_id,
            "capacity": request.capacity,
            "expected_revenue": value,
            "optimal_expected_revenue": optimal,
            "percent_gap": gap,
        }

    @app.post("/backtest")
    def backtest(request: BacktestRequest) -> dict:
        if request.start > request.end:
            raise HTTPException(status_code=422, detail="start must precede end")
        config = store.property_config()
        targets = [d for d in store.dates() if request.start <= d <= request.end]
        if not targets:
            raise HTTPException(
                status_code=404, detail="no stored dates inside the range"
            )
        bt_config = pipeline.BacktestConfig(
            horizon_days=config.horizon_days,
            warmup_end=config.horizon_days - 28,
            input_dates=request.input_dates,
            g_low=request.g_low,
            g_high=request.g_high,
            transform=request.transform,
        )
        report = pipeline.run_backtest(targets, store, bt_config)
        return json.loads(report.to_json())

    return app
