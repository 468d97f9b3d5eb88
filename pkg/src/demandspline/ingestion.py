"""Reservation parsing, stay-night explosion, KPIs and demand scenarios.

Input is a PMS-style export: one CSV of reservations joined one-to-many to a
CSV of per-night rates keyed by reservation id. Money is parsed into integer
minor units; dates are ISO-8601. Zero-rate reservations (complimentary stays)
are dropped and counted, malformed rows are collected as row errors rather
than silently skipped.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .domain import DemandScenario, RateLadder, to_booking_horizon

RESERVATION_COLUMNS = (
    "reservation_id", "arrival_date", "departure_date", "length_of_stay",
    "booking_date", "status", "rate_total", "group", "source", "sub_source",
    "market_code",
)
RATE_COLUMNS = ("reservation_id", "stay_date", "night_rate")
STATUSES = ("stay", "cancellation", "no_show")


class SchemaError(ValueError):
    """The input file is missing a required column."""


class IntegrityError(ValueError):
    """Joined night rates disagree with the reservation they belong to."""


@dataclass(frozen=True)
class Reservation:
    reservation_id: str
    arrival_date: dt.date
    departure_date: dt.date
    booking_date: dt.date
    status: str
    rate_total: int  # minor units
    group: bool
    source: str
    sub_source: str
    market_code: str

    @property
    def length_of_stay(self) -> int:
        return (self.departure_date - self.arrival_date).days


@dataclass(frozen=True)
class StayNight:
    reservation_id: str
    stay_date: dt.date
    night_rate: int  # minor units
    booking_date: dt.date
    status: str


@dataclass(frozen=True)
class RowError:
    row_index: int
    message: str


@dataclass
class CleaningReport:
    zero_rate_dropped: list[str] = field(default_factory=list)
    row_errors: list[RowError] = field(default_factory=list)

    @property
    def dropped_count(self) -> int:
        return len(self.zero_rate_dropped)


def parse_money(text: str) -> int:
    value = Decimal(text)
    cents = int((value * 100).to_integral_value())
    if Decimal(cents) != value * 100:
        raise ValueError(f"money value {text!r} has sub-cent precision")
    return cents


def _parse_date(text: str) -> dt.date:
    return dt.date.fromisoformat(text.strip())


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("true", "1", "yes", "y"):
        return True
    if lowered in ("false", "0", "no", "n", ""):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _normalize_status(text: str) -> str:
    status = text.strip().lower().replace("-", "_").replace(" ", "_")
    if status == "cancelled" or status == "canceled":
        status = "cancellation"
    if status not in STATUSES:
        raise ValueError(f"unknown status {text!r}")
    return status


def _check_columns(fieldnames, required, path):
    missing = [c for c in required if c not in (fieldnames or ())]
    if missing:
        raise SchemaError(f"{path}: missing column {missing[0]!r}")


def parse_and_clean(
    reservation_rows: Iterable[dict],
    source_name: str = "<rows>",
) -> tuple[list[Reservation], CleaningReport]:
    """Parse raw reservation dicts, dropping zero-rate rows with a report."""
    report = CleaningReport()
    reservations: list[Reservation] = []
    first = True
    for index, row in enumerate(reservation_rows):
        if first:
            _check_columns(tuple(row.keys()), RESERVATION_COLUMNS, source_name)
            first = False
        try:
            arrival = _parse_date(row["arrival_date"])
            departure = _parse_date(row["departure_date"])
            booking = _parse_date(row["booking_date"])
            rate_total = parse_money(row["rate_total"])
            status = _normalize_status(row["status"])
            group = _parse_bool(row["group"])
            if departure <= arrival:
                raise ValueError("departure must be after arrival")
            if rate_total < 0:
                raise ValueError("negative total rate")
            stated_los = int(row["length_of_stay"])
            if stated_los != (departure - arrival).days:
                raise ValueError(
                    f"length_of_stay {stated_los} != departure - arrival"
                )
            if booking > arrival:
                raise ValueError("booked after arrival")
        except (ValueError, InvalidOperation, KeyError) as exc:
            report.row_errors.append(RowError(index, str(exc)))
            continue
        if rate_total == 0:
            report.zero_rate_dropped.append(row["reservation_id"])
            continue
        reservations.append(Reservation(
            reservation_id=row["reservation_id"],
            arrival_date=arrival,
            departure_date=departure,
            booking_date=booking,
            status=status,
            rate_total=rate_total,
            group=group,
            source=row["source"],
            sub_source=row["sub_source"],
            market_code=row["market_code"],
        ))
    return reservations, report


def load_reservations_csv(path: str | Path) -> tuple[list[Reservation], CleaningReport]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        _check_columns(reader.fieldnames, RESERVATION_COLUMNS, path)
        return parse_and_clean(reader, source_name=str(path))


def load_night_rates_csv(path: str | Path) -> dict[str, list[tuple[dt.date, int]]]:
    """Per-night rates keyed by reservation id, sorted by stay date."""
    nights: dict[str, list[tuple[dt.date, int]]] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        _check_columns(reader.fieldnames, RATE_COLUMNS, path)
        for index, row in enumerate(reader):
            try:
                parsed = (_parse_date(row["stay_date"]), parse_money(row["night_rate"]))
            except (ValueError, InvalidOperation) as exc:
                raise ValueError(f"{path}: rates row {index}: {exc}") from exc
            nights.setdefault(row["reservation_id"], []).append(parsed)
    for values in nights.values():
        values.sort()
    return nights


def explode_stay_nights(
    reservations: Sequence[Reservation],
    night_rates: dict[str, list[tuple[dt.date, int]]],
) -> list[StayNight]:
    """One StayNight per night in [arrival, departure), rates from the join."""
    stay_nights: list[StayNight] = []
    for reservation in reservations:
        joined = night_rates.get(reservation.reservation_id)
        if joined is None:
            raise IntegrityError(
                f"reservation {reservation.reservation_id}: no night rates joined"
            )
        expected = [
            reservation.arrival_date + dt.timedelta(days=i)
            for i in range(reservation.length_of_stay)
        ]
        if [d for d, _ in joined] != expected:
            raise IntegrityError(
                f"reservation {reservation.reservation_id}: joined nights do not "
                f"cover the stay ({len(joined)} rates for "
                f"{reservation.length_of_stay} nights)"
            )
        for stay_date, night_rate in joined:
            if night_rate <= 0:
                raise IntegrityError(
                    f"reservation {reservation.reservation_id}: nonpositive "
                    f"night rate on {stay_date}"
                )
            stay_nights.append(StayNight(
                reservation_id=reservation.reservation_id,
                stay_date=stay_date,
                night_rate=night_rate,
                booking_date=reservation.booking_date,
                status=reservation.status,
            ))
    return stay_nights


@dataclass(frozen=True)
class KpiReport:
    group_key: str
    adr: float | None       # minor units per occupied night; None when no stays
    revpar: float           # minor units per available room-night
    occupancy: float        # fraction of capacity occupied
    occupied_nights: int
    available_nights: int


def _group_key(date: dt.date, grouping: str) -> str:
    if grouping == "month":
        return date.strftime("%b")
    if grouping == "day_of_week":
        return date.strftime("%A")
    if grouping == "year":
        return str(date.year)
    if grouping == "total":
        return "total"
    raise ValueError(f"unknown grouping {grouping!r}")


def compute_kpis(
    stay_nights: Sequence[StayNight],
    capacity: int,
    grouping: str = "total",
    period: tuple[dt.date, dt.date] | None = None,
) -> list[KpiReport]:
    """ADR, RevPAR and occupancy per group over status=stay nights.

    RevPAR and occupancy divide by the property's full capacity over every
    calendar day of the period, including days without a single stay.
    """
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    stays = [n for n in stay_nights if n.status == "stay"]
    if period is None:
        if not stays:
            raise ValueError("cannot infer a period from zero stay nights")
        period = (min(n.stay_date for n in stays), max(n.stay_date for n in stays))
    start, end = period
    if end < start:
        raise ValueError("period end precedes start")

    day_count: dict[str, int] = {}
    day = start
    while day <= end:
        key = _group_key(day, grouping)
        day_count[key] = day_count.get(key, 0) + 1
        day += dt.timedelta(days=1)

    revenue: dict[str, int] = {key: 0 for key in day_count}
    occupied: dict[str, int] = {key: 0 for key in day_count}
    for night in stays:
        if not start <= night.stay_date <= end:
            continue
        key = _group_key(night.stay_date, grouping)
        revenue[key] += night.night_rate
        occupied[key] += 1

    reports = []
    for key in sorted(day_count):
        available = capacity * day_count[key]
        rooms = occupied[key]
        reports.append(KpiReport(
            group_key=key,
            adr=revenue[key] / rooms if rooms else None,
            revpar=revenue[key] / available,
            occupancy=rooms / available,
            occupied_nights=rooms,
            available_nights=available,
        ))
    return reports


@dataclass
class ScenarioBuildReport:
    early_bookings_clamped: int = 0
    rates_clamped: int = 0


def build_demand_scenarios(
    stay_nights: Sequence[StayNight],
    ladder: RateLadder,
    horizon_days: int,
    period: tuple[dt.date, dt.date],
    day_of_week: int | None = None,
) -> tuple[list[DemandScenario], ScenarioBuildReport]:
    """Raw demand scenarios per check-in date in the period.

    Every booking made counts, whatever its final status: the curves forecast
    demand requests, and cancellation behavior is out of model scope. A
    stay-night lands in cell (binned rate, t = horizon - lead time); bookings
    earlier than the horizon start are clamped to the first day and counted.
    Dates without any booking still produce an all-zero scenario.
    """
    report = ScenarioBuildReport()
    start, end = period
    dates: list[dt.date] = []
    day = start
    while day <= end:
        if day_of_week is None or day.weekday() == day_of_week:
            dates.append(day)
        day += dt.timedelta(days=1)

    by_date: dict[dt.date, np.ndarray] = {
        d: np.zeros((len(ladder), horizon_days), dtype=np.int64) for d in dates
    }
    rate_index = {rate: i for i, rate in enumerate(ladder.rates)}
    for night in stay_nights:
        counts = by_date.get(night.stay_date)
        if counts is None:
            continue
        lead = (night.stay_date - night.booking_date).days
        if lead > horizon_days:
            t = 1
            report.early_bookings_clamped += 1
        else:
            t = to_booking_horizon(lead, horizon_days)
            if t == 0:  # booked exactly one horizon length ahead
                t = 1
                report.early_bookings_clamped += 1
        rung, clamped = ladder.bin(night.night_rate)  # both in minor units
        if clamped:
            report.rates_clamped += 1
        counts[rate_index[rung], t - 1] += 1

    scenarios = [
        DemandScenario(checkin_date=d, rates=ladder.rates, counts=by_date[d])
        for d in dates
    ]
    return scenarios, report
