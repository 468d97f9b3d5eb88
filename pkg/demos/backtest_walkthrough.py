"""End-to-end backtest against a synthetic booking history.

Builds a store whose every date was priced by the same rotating rate
schedule, then asks the engine to do better: select the nearest warm-up
dates, fit the forecast window, price it with the realized booking count as
capacity, and compare expected versus actual revenue.
"""

import tempfile

from demandspline import pipeline


def main():
    with tempfile.TemporaryDirectory() as tmp:
        store = pipeline.build_synthetic_store(f"{tmp}/store", n_dates=60, seed=11)
        targets = store.dates()[-8:]
        print(f"Store holds {len(store.dates())} weekly check-in dates; "
              f"backtesting the last {len(targets)}.\n")

        report = pipeline.run_backtest(targets, store)

        print("Per-target results:")
        for row in report.rows:
            if row.skipped_reason:
                print(f"  {row.target_date}: skipped ({row.skipped_reason})")
                continue
            print(f"  {row.target_date}: capacity {row.capacity:>3}  "
                  f"actual {row.actual_revenue / 100:>8,.0f}  "
                  f"expected {row.expected_revenue / 100:>8,.0f}  "
                  f"change {row.percent_change:+6.2f}%")

        print("\nPercent change by day of week (mean, SD):")
        print("  " + report.to_percent_change_csv().replace("\n", "\n  "))

        print("Fit WAPE by rate class and day of week ('-' = no data):")
        print("  " + report.to_wape_csv().replace("\n", "\n  "))

        print("A fixed schedule leaves money on the table whenever demand has")
        print("structure; the positive mean is that recovered headroom.")


if __name__ == "__main__":
    main()
