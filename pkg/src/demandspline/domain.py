"""Core vocabulary: rate ladders, booking horizons, demand scenarios, choice sets."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """A domain invariant was violated."""


@dataclass(frozen=True)
class RateLadder:
    """Evenly spaced nightly rates in minor currency units, ascending."""

    rates: tuple[int, ...]
    step: int

    def __post_init__(self) -> None:
        if len(self.rates) < 1:
            raise DomainError("rate ladder must contain at least one rate")
        if self.step <= 0:
            raise DomainError("rate step must be positive")
        diffs = {b - a for a, b in zip(self.rates, self.rates[1:])}
        if any(d <= 0 for d in diffs):
            raise DomainError("rates must be strictly increasing")
        if diffs and diffs != {self.step}:
            raise DomainError(f"rates must be evenly spaced by {self.step}")

    @classmethod
    def from_bounds(cls, minimum: int, maximum: int, step: int) -> "RateLadder":
        if step <= 0:
            raise DomainError("rate step must be positive")
        if minimum <= 0 or maximum < minimum:
            raise DomainError("rate bounds must satisfy 0 < minimum <= maximum")
        if (maximum - minimum) % step != 0:
            raise DomainError("maximum must be reachable from minimum in whole steps")
        return cls(tuple(range(minimum, maximum + step, step)), step)

    @property
    def minimum(self) -> int:
        return self.rates[0]

    @property
    def maximum(self) -> int:
        return self.rates[-1]

    def __len__(self) -> int:
        return len(self.rates)

    def __iter__(self):
        return iter(self.rates)

    def index(self, rate: int) -> int:
        return self.rates.index(rate)

    def bin(self, rate: float) -> tuple[int, bool]:
        """Round a rate down to its ladder rung.

        Returns (rung, clamped); clamped is True when the rate fell outside
        [minimum, maximum] even after rounding down.
        """
        if rate < self.minimum:
            return self.minimum, True
        rung = self.minimum + int((rate - self.minimum) // self.step) * self.step
        if rung > self.maximum:
            return self.maximum, True
        return rung, False


@dataclass(frozen=True)
class BookingHorizon:
    """Days from first bookable day (t=1) to check-in day (t=length)."""

    length: int

    def __post_init__(self) -> None:
        # Three distinct days is the floor for second differences downstream.
        if self.length < 3:
            raise DomainError("booking horizon must span at least 3 days")


def to_booking_horizon(lead_time: int, horizon_length: int) -> int:
    """Map a lead time (days before check-in) to the horizon index t = T - lead.

    Lead time 0 is the check-in day itself and maps to t = T; lead time T maps
    to t = 0, one slot before the earliest modelled day.
    """
    if lead_time < 0:
        raise DomainError("lead time cannot be negative")
    if lead_time > horizon_length:
        raise DomainError(
            f"lead time {lead_time} exceeds horizon length {horizon_length}"
        )
    return horizon_length - lead_time


@dataclass(frozen=True)
class ChoiceSet:
    """The raw rates whose bookings count toward demand at `rate`.

    A guest booking at some rate would also have booked any cheaper rate, so
    the demand pool at `rate` collects bookings made at `rate` or above.
    """

    rate: int
    members: tuple[int, ...]


def choice_sets(ladder: RateLadder) -> list[ChoiceSet]:
    """Nested choice sets for a ladder, one per rate, cheapest set largest."""
    sets = [
        ChoiceSet(rate=r, members=tuple(m for m in ladder.rates if m >= r))
        for r in ladder.rates
    ]
    for lower, higher in zip(sets, sets[1:]):
        if not set(higher.members) < set(lower.members):
            raise DomainError("choice sets must be strictly nested by price")
    return sets


@dataclass(frozen=True, eq=False)
class DemandScenario:
    """Per check-in date booking counts over (rate class, horizon day).

    `counts[i, j]` is the number of bookings at `rates[i]` made on horizon day
    t = j + 1. Rates are ascending. `cumulated` marks the choice-set form,
    where each cell already includes bookings at all higher rates.
    """

    checkin_date: dt.date
    rates: tuple[int, ...]
    counts: np.ndarray
    cumulated: bool = False

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.int64)
        object.__setattr__(self, "counts", counts)
        if counts.ndim != 2 or counts.shape[0] != len(self.rates):
            raise DomainError("counts must be a (rates x horizon days) matrix")
        if counts.shape[1] < 3:
            raise DomainError("scenario must cover at least 3 horizon days")
        if sorted(self.rates) != list(self.rates) or len(set(self.rates)) != len(self.rates):
            raise DomainError("rates must be strictly ascending")
        if (counts < 0).any():
            raise DomainError("booking counts cannot be negative")
        if self.cumulated and (np.diff(counts, axis=0) > 0).any():
            raise DomainError(
                "cumulated counts must be nonincreasing from the lowest rate up"
            )

    @property
    def horizon_length(self) -> int:
        return int(self.counts.shape[1])

    def total_bookings(self) -> int:
        return int(self.counts.sum())

    def revenue_by_day(self) -> np.ndarray:
        """Booked revenue per horizon day, from raw counts."""
        if self.cumulated:
            raise DomainError("revenue is defined on raw counts, not choice sets")
        rates = np.asarray(self.rates, dtype=np.int64)
        return rates @ self.counts

    def window(self, first_day: int, last_day: int) -> np.ndarray:
        """Counts restricted to horizon days first_day..last_day inclusive."""
        if not 1 <= first_day <= last_day <= self.horizon_length:
            raise DomainError("window out of horizon range")
        return self.counts[:, first_day - 1 : last_day]


def cumulate_choice_sets(scenario: DemandScenario) -> DemandScenario:
    """Convert raw per-rate counts to choice-set demand.

    Demand at a rate is the sum of raw bookings at that rate and every higher
    rate; the top rate is unchanged.
    """
    if scenario.cumulated:
        raise DomainError("scenario is already cumulated")
    cumulated = np.cumsum(scenario.counts[::-1], axis=0)[::-1]
    return DemandScenario(
        checkin_date=scenario.checkin_date,
        rates=scenario.rates,
        counts=cumulated,
        cumulated=True,
    )
