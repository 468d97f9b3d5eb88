import datetime as dt

import numpy as np
import pytest

from demandspline.domain import RateLadder
from demandspline.ingestion import (
    IntegrityError,
    Reservation,
    SchemaError,
    StayNight,
    build_demand_scenarios,
    compute_kpis,
    explode_stay_nights,
    parse_and_clean,
    parse_money,
)


def row(**overrides):
    base = {
        "reservation_id": "r1",
        "arrival_date": "2018-06-07",
        "departure_date": "2018-06-08",
        "length_of_stay": "1",
        "booking_date": "2018-05-10",
        "status": "stay",
        "rate_total": "100.00",
        "group": "false",
        "source": "web",
        "sub_source": "direct",
        "market_code": "LE",
    }
    base.update(overrides)
    return base


class TestParseAndClean:
    def test_zero_rate_dropped_and_counted(self):
        rows = [row(), row(reservation_id="r2", rate_total="0.00")]
        reservations, report = parse_and_clean(rows)
        assert [r.reservation_id for r in reservations] == ["r1"]
        assert report.zero_rate_dropped == ["r2"]

    def test_empty_input(self):
        reservations, report = parse_and_clean([])
        assert reservations == [] and report.dropped_count == 0
        assert report.row_errors == []

    def test_bad_date_reported_with_row_index(self):
        rows = [
            row(),
            row(reservation_id="r2"),
            row(reservation_id="r3"),
            row(reservation_id="r4", arrival_date="June 7th"),
        ]
        reservations, report = parse_and_clean(rows)
        assert len(reservations) == 3
        assert len(report.row_errors) == 1
        assert report.row_errors[0].row_index == 3

    def test_missing_column_names_it(self):
        bad = row()
        del bad["market_code"]
        with pytest.raises(SchemaError, match="market_code"):
            parse_and_clean([bad])

    def test_length_of_stay_mismatch_is_row_error(self):
        rows = [row(length_of_stay="3")]
        reservations, report = parse_and_clean(rows)
        assert reservations == []
        assert "length_of_stay" in report.row_errors[0].message

    def test_money_parsing(self):
        assert parse_money("70.00") == 7000
        assert parse_money("123.45") == 12345
        with pytest.raises(ValueError):
            parse_money("1.234")


def reservation(res_id="r1", arrival="2018-06-04", nights=1, status="stay"):
    a = dt.date.fromisoformat(arrival)
    return Reservation(
        reservation_id=res_id,
        arrival_date=a,
        departure_date=a + dt.timedelta(days=nights),
        booking_date=a - dt.timedelta(days=20),
        status=status,
        rate_total=nights * 10000,
        group=False,
        source="web", sub_source="direct", market_code="LE",
    )


class TestExplode:
    def test_two_night_stay(self):
        res = reservation(nights=2)
        rates = {"r1": [
            (dt.date(2018, 6, 4), 10000),
            (dt.date(2018, 6, 5), 11000),
        ]}
        nights = explode_stay_nights([res], rates)
        assert [(n.stay_date.day, n.night_rate) for n in nights] == [(4, 10000), (5, 11000)]

    def test_single_night(self):
        res = reservation(nights=1)
        nights = explode_stay_nights([res], {"r1": [(dt.date(2018, 6, 4), 10000)]})
        assert len(nights) == 1

    def test_short_rate_list_is_integrity_error(self):
        res = reservation(nights=2)
        with pytest.raises(IntegrityError, match="r1"):
            explode_stay_nights([res], {"r1": [(dt.date(2018, 6, 4), 10000)]})

    def test_totals_preserved(self):
        rng = np.random.default_rng(2)
        reservations, rate_table = [], {}
        for i in range(20):
            nights = int(rng.integers(1, 5))
            res = reservation(res_id=f"r{i}", nights=nights)
            rates = [
                (res.arrival_date + dt.timedelta(days=k), int(rng.integers(80, 140)) * 100)
                for k in range(nights)
            ]
            reservations.append(res)
            rate_table[res.reservation_id] = rates
        exploded = explode_stay_nights(reservations, rate_table)
        total = sum(n.night_rate for n in exploded)
        assert total == sum(r for rates in rate_table.values() for _, r in rates)


def night(day, rate, status="stay"):
    return StayNight(
        reservation_id="x", stay_date=day, night_rate=rate,
        booking_date=day - dt.timedelta(days=5), status=status,
    )


class TestKpis:
    day = dt.date(2018, 6, 4)

    def test_direct_formulas(self):
        nights = [night(self.day, 10000), night(self.day, 12000)]
        (report,) = compute_kpis(nights, capacity=4, period=(self.day, self.day))
        assert report.adr == pytest.approx(11000)
        assert report.revpar == pytest.approx(5500)
        assert report.occupancy == pytest.approx(0.5)

    def test_no_stays_has_absent_adr(self):
        (report,) = compute_kpis([], capacity=3, period=(self.day, self.day))
        assert report.adr is None
        assert report.revpar == 0.0 and report.occupancy == 0.0

    def test_full_house_of_one(self):
        (report,) = compute_kpis([night(self.day, 9900)], capacity=1,
                                 period=(self.day, self.day))
        assert report.adr == report.revpar == pytest.approx(9900)
        assert report.occupancy == 1.0

    def test_cancellations_do_not_count(self):
        nights = [night(self.day, 10000), night(self.day, 30000, status="cancellation")]
        (report,) = compute_kpis(nights, capacity=2, period=(self.day, self.day))
        assert report.adr == pytest.approx(10000)
        assert report.occupancy == pytest.approx(0.5)

    def test_revpar_is_adr_times_occupancy(self):
        rng = np.random.default_rng(6)
        nights = [
            night(self.day + dt.timedelta(days=int(rng.integers(0, 14))),
                  int(rng.integers(80, 150)) * 100)
            for _ in range(60)
        ]
        for report in compute_kpis(nights, capacity=10, grouping="day_of_week",
                                   period=(self.day, self.day + dt.timedelta(days=13))):
            if report.adr is not None:
                assert report.revpar == pytest.approx(report.adr * report.occupancy)

    def test_grouped_adr_matches_flat_average(self):
        rng = np.random.default_rng(16)
        nights = [
            night(self.day + dt.timedelta(days=int(rng.integers(0, 28))),
                  int(rng.integers(80, 150)) * 100)
            for _ in range(100)
        ]
        reports = compute_kpis(nights, capacity=10, grouping="day_of_week",
                               period=(self.day, self.day + dt.timedelta(days=27)))
        pooled = sum(r.adr * r.occupied_nights for r in reports if r.adr) / 100
        assert pooled == pytest.approx(np.mean([n.night_rate for n in nights]))


class TestScenarios:
    ladder = RateLadder.from_bounds(7000, 17000, 1000)

    def test_single_booking_lands_in_right_cell(self):
        checkin = dt.date(2018, 6, 7)
        nights = [StayNight("r1", checkin, 7000,
                            checkin - dt.timedelta(days=28), "stay")]
        scenarios, report = build_demand_scenarios(
            nights, self.ladder, horizon_days=100, period=(checkin, checkin)
        )
        (scenario,) = scenarios
        assert scenario.counts[self.ladder.index(7000), 72 - 1] == 1
        assert report.early_bookings_clamped == 0

    def test_empty_dates_keep_zero_scenarios(self):
        start = dt.date(2018, 6, 4)
        scenarios, _ = build_demand_scenarios(
            [], self.ladder, horizon_days=100,
            period=(start, start + dt.timedelta(days=13)), day_of_week=3,
        )
        assert len(scenarios) == 2
        assert all(s.total_bookings() == 0 for s in scenarios)

    def test_year_of_thursdays(self):
        scenarios, _ = build_demand_scenarios(
            [], self.ladder, horizon_days=100,
            period=(dt.date(2018, 1, 1), dt.date(2018, 12, 31)), day_of_week=3,
        )
        assert len(scenarios) == 52

    def test_early_booking_clamped_to_first_day(self):
        checkin = dt.date(2018, 6, 7)
        nights = [StayNight("r1", checkin, 7000,
                            checkin - dt.timedelta(days=200), "stay")]
        scenarios, report = build_demand_scenarios(
            nights, self.ladder, horizon_days=100, period=(checkin, checkin)
        )
        assert scenarios[0].counts[self.ladder.index(7000), 0] == 1
        assert report.early_bookings_clamped == 1

    def test_off_ladder_rate_clamped_and_warned(self):
        checkin = dt.date(2018, 6, 7)
        nights = [StayNight("r1", checkin, 25000,
                            checkin - dt.timedelta(days=3), "stay")]
        scenarios, report = build_demand_scenarios(
            nights, self.ladder, horizon_days=100, period=(checkin, checkin)
        )
        assert scenarios[0].counts[self.ladder.index(17000), 97 - 1] == 1
        assert report.rates_clamped == 1

    def test_counts_conserved(self):
        rng = np.random.default_rng(10)
        checkin = dt.date(2018, 6, 7)
        nights = [
            StayNight(f"r{i}", checkin, int(rng.integers(70, 171)) * 100,
                      checkin - dt.timedelta(days=int(rng.integers(0, 100))), "stay")
            for i in range(200)
        ]
        scenarios, _ = build_demand_scenarios(
            nights, self.ladder, horizon_days=100, period=(checkin, checkin)
        )
        assert scenarios[0].total_bookings() == 200

    def test_all_statuses_count_as_demand(self):
        checkin = dt.date(2018, 6, 7)
        nights = [
            StayNight("r1", checkin, 7000, checkin - dt.timedelta(days=5), "stay"),
            StayNight("r2", checkin, 7000, checkin - dt.timedelta(days=5), "cancellation"),
            StayNight("r3", checkin, 7000, checkin - dt.timedelta(days=5), "no_show"),
        ]
        scenarios, _ = build_demand_scenarios(
            nights, self.ladder, horizon_days=100, period=(checkin, checkin)
        )
        assert scenarios[0].total_bookings() == 3
