"""From raw PMS exports to a scenario store, with property KPIs on the way.

Synthesizes a reservations CSV and its per-night rates CSV, runs the
cleaning and explosion steps, prints ADR / RevPAR / occupancy by day of
week, and materializes the demand-scenario store the other tools consume.
"""

import csv
import datetime as dt
import tempfile
from pathlib import Path

import numpy as np

from demandspline import ingestion
from demandspline.domain import RateLadder
from demandspline.store import PropertyConfig, ScenarioStore


def synthesize_pms_files(folder: Path, weeks: int = 40, seed: int = 3):
    rng = np.random.default_rng(seed)
    res_rows, rate_rows = [], []
    rid = 0
    start = dt.date(2018, 1, 1)
    for day_offset in range(weeks * 7):
        checkin = start + dt.timedelta(days=day_offset)
        busy = checkin.weekday() in (4, 5)  # weekend leisure bump
        demand = rng.poisson(9 if busy else 6)
        for _ in range(demand):
            rid += 1
            nights = int(rng.integers(1, 4))
            lead = int(rng.integers(0, 120))
            status = rng.choice(
                ["stay", "cancellation", "no_show"], p=[0.74, 0.23, 0.03]
            )
            rates = [int(rng.integers(70, 171)) for _ in range(nights)]
            res_rows.append({
                "reservation_id": f"r{rid}",
                "arrival_date": checkin.isoformat(),
                "departure_date": (checkin + dt.timedelta(days=nights)).isoformat(),
                "length_of_stay": nights,
                "booking_date": (checkin - dt.timedelta(days=lead)).isoformat(),
                "status": status,
                "rate_total": f"{sum(rates)}.00",
                "group": "false",
                "source": "web", "sub_source": "direct", "market_code": "LE",
            })
            for k, rate in enumerate(rates):
                rate_rows.append({
                    "reservation_id": f"r{rid}",
                    "stay_date": (checkin + dt.timedelta(days=k)).isoformat(),
                    "night_rate": f"{rate}.00",
                })
    # A couple of complimentary stays that the cleaner must drop.
    for _ in range(3):
        rid += 1
        res_rows.append(dict(res_rows[-1], reservation_id=f"r{rid}", rate_total="0.00"))

    for name, rows in (("reservations.csv", res_rows), ("night_rates.csv", rate_rows)):
        with open(folder / name, "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    return folder / "reservations.csv", folder / "night_rates.csv"


def main():
    with tempfile.TemporaryDirectory() as tmp:
        folder = Path(tmp)
        res_csv, rates_csv = synthesize_pms_files(folder)

        reservations, report = ingestion.load_reservations_csv(res_csv)
        print(f"Parsed {len(reservations)} reservations; dropped "
              f"{report.dropped_count} zero-rate complimentary stays; "
              f"{len(report.row_errors)} row errors.")

        nights = ingestion.explode_stay_nights(
            reservations, ingestion.load_night_rates_csv(rates_csv)
        )
        print(f"Exploded into {len(nights)} stay nights.\n")

        print("KPIs by day of week (capacity 12):")
        print("  day        |    ADR | RevPAR |   Occ")
        for row in ingestion.compute_kpis(nights, capacity=12, grouping="day_of_week"):
            adr = f"{row.adr / 100:6.1f}" if row.adr else "   n/a"
            print(f"  {row.group_key:<10} | {adr} | {row.revpar / 100:6.1f} "
                  f"| {row.occupancy:5.1%}")

        ladder = RateLadder.from_bounds(7000, 17000, 1000)
        stay_dates = [n.stay_date for n in nights]
        scenarios, build_report = ingestion.build_demand_scenarios(
            nights, ladder, horizon_days=100,
            period=(min(stay_dates), max(stay_dates)), day_of_week=3,
        )
        print(f"\nBuilt {len(scenarios)} Thursday demand scenarios "
              f"({build_report.early_bookings_clamped} early bookings clamped "
              f"to the horizon start).")

        config = PropertyConfig(
            name="demo-house", capacity=12, rate_minimum=7000,
            rate_maximum=17000, rate_step=1000, horizon_days=100,
        )
        store = ScenarioStore.create(folder / "store", config, scenarios)
        store.validate()
        print(f"Scenario store written with {len(store.dates())} documents; "
              "ready for fitting and backtesting.")


if __name__ == "__main__":
    main()
