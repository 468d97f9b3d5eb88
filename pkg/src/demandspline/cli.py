"""Command-line entry points mirroring the HTTP endpoints.

Subcommands: ingest, simulate, sensitivity, backtest, fit, optimize, whatif,
serve. Results are written as JSON (or CSV for backtest tables).
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import os
import sys
from pathlib import Path

from . import dp, pipeline, sim, spline
from .domain import cumulate_choice_sets
from .ingestion import (
    build_demand_scenarios,
    explode_stay_nights,
    load_night_rates_csv,
    load_reservations_csv,
)
from .store import PropertyConfig, ScenarioStore


def _cmd_ingest(args) -> int:
    config = PropertyConfig.from_json_file(args.property)
    reservations, report = load_reservations_csv(args.reservations)
    nights = explode_stay_nights(reservations, load_night_rates_csv(args.rates))
    stay_dates = [n.stay_date for n in nights]
    period = (min(stay_dates), max(stay_dates)) if stay_dates else None
    if args.start and args.end:
        period = (dt.date.fromisoformat(args.start), dt.date.fromisoformat(args.end))
    if period is None:
        print("no stay nights found and no explicit period given", file=sys.stderr)
        return 2
    scenarios, build_report = build_demand_scenarios(
        nights, config.ladder, config.horizon_days, period,
        day_of_week=args.day_of_week,
    )
    ScenarioStore.create(args.out, config, scenarios)
    summary = {
        "reservations": len(reservations),
        "zero_rate_dropped": report.dropped_count,
        "row_errors": [
            {"row": e.row_index, "message": e.message} for e in report.row_errors
        ],
        "stay_nights": len(nights),
        "scenarios": len(scenarios),
        "early_bookings_clamped": build_report.early_bookings_clamped,
        "rates_clamped": build_report.rates_clamped,
        "store": str(args.out),
    }
    print(json.dumps(summary, indent=2))
    return 0


def _cmd_simulate(args) -> int:
    config_doc = {}
    if args.config:
        config_doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if args.seed is not None:
        config_doc["seed"] = args.seed
    config = sim.SimConfig(**config_doc)
    report = sim.run_simulation_study(config)
    Path(args.out).write_text(report.to_json(), encoding="utf-8")
    brief = {
        "expected_revenue_true_curves": report.expected_revenue_true_curves,
        "fitted_revenues": [r.expected_revenue for r in report.results],
        "out": str(args.out),
    }
    print(json.dumps(brief, indent=2))
    return 0


def _cmd_sensitivity(args) -> int:
    config_doc = {}
    if args.config:
        config_doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
    if args.seed is not None:
        config_doc["seed"] = args.seed
    config = sim.SimConfig(**config_doc)
    report = sim.run_sensitivity(
        config,
        counts=range(args.min_count, args.max_count + 1),
        repetitions=args.repetitions,
        processes=args.processes,
    )
    Path(args.out).write_text(report.to_json(), encoding="utf-8")
    print(json.dumps({"runs_per_set": report.runs_per_set, "out": str(args.out)}))
    return 0


def _parse_date_range(text: str) -> tuple[dt.date, dt.date]:
    try:
        start_text, end_text = text.split(":")
        return dt.date.fromisoformat(start_text), dt.date.fromisoformat(end_text)
    except ValueError as exc:
        raise SystemExit(f"bad date range {text!r}; expected YYYY-MM-DD:YYYY-MM-DD") from exc


def _cmd_backtest(args) -> int:
    store = ScenarioStore(args.store)
    store.validate()
    start, end = _parse_date_range(args.targets)
    targets = [d for d in store.dates() if start <= d <= end]
    if not targets:
        print("no stored dates in the target range", file=sys.stderr)
        return 2
    config = pipeline.BacktestConfig()
    if args.config:
        doc = json.loads(Path(args.config).read_text(encoding="utf-8"))
        config = pipeline.BacktestConfig(**doc)
    report = pipeline.run_backtest(targets, store, config)
    out = Path(args.out)
    if out.suffix == ".csv":
        out.write_text(report.to_percent_change_csv(), encoding="utf-8")
        wape_path = out.with_name(out.stem + "_wape.csv")
        wape_path.write_text(report.to_wape_csv(), encoding="utf-8")
        print(json.dumps({"out": str(out), "wape_table": str(wape_path)}))
    else:
        out.write_text(report.to_json(), encoding="utf-8")
        print(json.dumps({
            "targets": len(targets),
            "aggregates": report.aggregates_by_day_of_week(),
            "out": str(out),
        }, indent=2))
    return 0


def _load_fit(args) -> tuple[ScenarioStore, spline.RateCurveSet, tuple[int, int]]:
    store = ScenarioStore(args.store)
    store.validate()
    config = store.property_config()
    window = (max(1, config.horizon_days - 27), config.horizon_days)
    dates = [dt.date.fromisoformat(d) for d in args.dates.split(",")]
    cumulated = [cumulate_choice_sets(store.load(d)) for d in dates]
    rates = sorted(cumulated[0].rates)
    surviving = [
        rate for i, rate in enumerate(rates)
        if pipeline._distinct_positive_days(cumulated, i, window) >= 3
    ]
    smoothing = pipeline.interpolate_smoothing(surviving, args.g_low, args.g_high)
    obs = spline.FitObservations.from_scenarios(
        cumulated, window=window, include_zero_cells=False, rates=surviving,
    )
    curves, _ = spline.fit(obs, smoothing=smoothing)
    return store, curves, window


def _cmd_fit(args) -> int:
    _, curves, window = _load_fit(args)
    doc = json.loads(curves.to_json())
    doc["window"] = {"first_day": window[0], "last_day": window[1]}
    Path(args.out).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")
    print(json.dumps({"rates": list(curves.rates), "out": str(args.out)}))
    return 0


def _cmd_optimize(args) -> int:
    curves = spline.RateCurveSet.from_json(Path(args.curves).read_text(encoding="utf-8"))
    grid = dp.refine_time_grid(curves)
    table, policy = dp.solve_dp(grid, args.capacity)
    doc = {
        "capacity": args.capacity,
        "expected_revenue": table.expected_revenue,
        "intervals_per_day": grid.intervals_per_day,
        "prices": list(policy.prices),
        "policy": policy.choice[:-1].tolist(),
    }
    Path(args.out).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")
    print(json.dumps({"expected_revenue": table.expected_revenue, "out": str(args.out)}))
    return 0


def _cmd_whatif(args) -> int:
    text = Path(args.curves).read_text(encoding="utf-8")
    curves = spline.RateCurveSet.from_json(text)
    # Override keys are horizon days; curves fitted on a window are stored in
    # window coordinates, so shift by the window start when it is recorded.
    doc = json.loads(text)
    day_zero = doc.get("window", {}).get("first_day", 1) - 1
    grid = dp.refine_time_grid(curves)
    table, policy = dp.solve_dp(grid, args.capacity)
    overrides = {
        int(day) - day_zero: float(rate)
        for day, rate in (json.loads(args.overrides) or {}).items()
    }
    value = dp.evaluate_fixed_policy(grid, args.capacity, policy, overrides=overrides)
    optimal = table.expected_revenue
    print(json.dumps({
        "expected_revenue": value,
        "optimal_expected_revenue": optimal,
        "percent_gap": 100.0 * (value - optimal) / optimal if optimal else 0.0,
    }, indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    bind = args.bind or os.environ.get("DEMANDSPLINE_BIND", "127.0.0.1:8000")
    host, _, port = bind.partition(":")
    app = create_app(ScenarioStore(args.store))
    uvicorn.run(app, host=host, port=int(port or 8000))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="demandspline",
        description="Demand-curve fitting and dynamic pricing toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse PMS CSVs into a scenario store")
    p.add_argument("--reservations", required=True)
    p.add_argument("--rates", required=True)
    p.add_argument("--property", required=True, help="property config JSON")
    p.add_argument("--out", required=True, help="scenario store directory")
    p.add_argument("--start", help="first check-in date (ISO)")
    p.add_argument("--end", help="last check-in date (ISO)")
    p.add_argument("--day-of-week", type=int, default=None,
                   help="0=Monday .. 6=Sunday; default keeps all days")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("simulate", help="run the controlled simulation study")
    p.add_argument("--config", help="SimConfig JSON file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sensitivity", help="scenario-count sensitivity sweep")
    p.add_argument("--config", help="SimConfig JSON file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--min-count", type=int, default=10)
    p.add_argument("--max-count", type=int, default=50)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--processes", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sensitivity)

    p = sub.add_parser("backtest", help="historical backtest over a store")
    p.add_argument("--store", required=True)
    p.add_argument("--targets", required=True, help="YYYY-MM-DD:YYYY-MM-DD")
    p.add_argument("--config", help="BacktestConfig JSON file")
    p.add_argument("--out", required=True, help=".json or .csv output")
    p.set_defaults(func=_cmd_backtest)

    p = sub.add_parser("fit", help="fit curves for stored dates")
    p.add_argument("--store", required=True)
    p.add_argument("--dates", required=True, help="comma-separated ISO dates")
    p.add_argument("--g-low", type=float, default=0.4)
    p.add_argument("--g-high", type=float, default=0.7)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("optimize", help="price a fitted curve set")
    p.add_argument("--curves", required=True, help="curves JSON from fit")
    p.add_argument("--capacity", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("whatif", help="expected revenue of rate overrides")
    p.add_argument("--curves", required=True)
    p.add_argument("--capacity", type=int, required=True)
    p.add_argument("--overrides", default="{}",
                   help='JSON like {"74": 12000}')
    p.set_defaults(func=_cmd_whatif)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--store", required=True)
    p.add_argument("--bind", default=None, help="host:port; or env DEMANDSPLINE_BIND")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
