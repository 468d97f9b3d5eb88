"""Finite-horizon dynamic pricing over remaining capacity.

Demand curves give a per-day booking rate for each price; days are divided
into intervals small enough that at most one booking arrives per interval,
and a backward recursion fills the expected-revenue table

    V_t(x) = max_j  lam_j(t) * (r_j + V_{t+1}(x-1)) + (1 - lam_j(t)) * V_{t+1}(x)

with V(0 capacity) = 0 and V(final interval) = 0. The recursion as printed in
the source material adds the capacity-down term unconditionally
(lam*r + V_{t+1}(x-1) + (1-lam)*V_{t+1}(x)); that form contradicts its own
boundary conditions and is treated as a typo for the standard expectation
implemented here.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np


class PricingError(ValueError):
    """Invalid pricing input."""


@dataclass(frozen=True)
class ArrivalRates:
    """Per-interval booking probabilities by rate class.

    `prices` are strictly descending (index 0 is the most expensive class);
    `lam[j, i]` is the probability of a booking at `prices[j]` in interval i.
    `day_offset` records which horizon day the first interval belongs to so
    policies can be reported against calendar horizon days.
    """

    prices: tuple[float, ...]
    lam: np.ndarray
    intervals_per_day: int
    day_offset: int = 1

    def __post_init__(self) -> None:
        lam = np.asarray(self.lam, dtype=float)
        object.__setattr__(self, "lam", lam)
        if lam.ndim != 2 or lam.shape[0] != len(self.prices):
            raise PricingError("lam must be a (rate class x interval) matrix")
        if any(b >= a for a, b in zip(self.prices, self.prices[1:])):
            raise PricingError("prices must be strictly descending")
        if (lam < 0).any():
            raise PricingError("booking probabilities cannot be negative")
        if (lam >= 1.0).any():
            raise PricingError("booking probabilities must stay below one")
        if self.intervals_per_day < 1:
            raise PricingError("intervals_per_day must be at least 1")

    @property
    def n_intervals(self) -> int:
        return int(self.lam.shape[1])

    def day_of_interval(self, interval: int) -> int:
        """Horizon day owning a 0-based interval index."""
        return self.day_offset + interval // self.intervals_per_day


def refine_time_grid(curves, subdivisions_per_day: int = 8) -> ArrivalRates:
    """Slice horizon days into intervals with booking probability < 1.

    Each interval inside a day carries that day's curve value divided by the
    number of subdivisions; the subdivision count doubles until every entry
    drops below one. Prices are reindexed descending for the recursion.
    """
    if subdivisions_per_day < 1:
        raise PricingError("subdivisions_per_day must be at least 1")
    first, last = curves.day_span()
    days = list(range(int(np.ceil(first)), int(np.floor(last)) + 1))
    if not days:
        raise PricingError("curve range contains no whole horizon day")
    prices = tuple(sorted(curves.rates, reverse=True))
    daily = np.array([[curves.demand(p, float(d)) for d in days] for p in prices])
    if (daily < 0).any():
        raise RuntimeError("demand curves returned a negative value after clamping")

    subdivisions = subdivisions_per_day
    while (daily / subdivisions >= 1.0).any():
        subdivisions *= 2
    lam = np.repeat(daily / subdivisions, subdivisions, axis=1)
    return ArrivalRates(
        prices=prices,
        lam=lam,
        intervals_per_day=subdivisions,
        day_offset=days[0],
    )


@dataclass(frozen=True)
class ValueTable:
    """Expected revenue V[t, x] over intervals 1..T' and capacities 0..X.

    Row T'-1 (the final interval) and column 0 are the zero boundaries.
    """

    values: np.ndarray

    @property
    def expected_revenue(self) -> float:
        return float(self.values[0, -1])

    def value(self, interval: int, capacity: int) -> float:
        return float(self.values[interval, capacity])


@dataclass(frozen=True)
class RatePolicy:
    """Argmax rate class per (interval, remaining capacity).

    `choice[t, x]` indexes into `prices`; ties resolve to the highest price,
    recorded in `tie_rule`. Entries at x = 0 are -1 (nothing to sell).
    """

    choice: np.ndarray
    prices: tuple[float, ...]
    intervals_per_day: int
    day_offset: int = 1
    tie_rule: str = "highest-price"

    def posted_rate(self, interval: int, capacity: int) -> float:
        j = int(self.choice[interval, capacity])
        if j < 0:
            raise PricingError("no rate is posted once capacity is exhausted")
        return self.prices[j]


def solve_dp(rates: ArrivalRates, capacity: int) -> tuple[ValueTable, RatePolicy]:
    """Backward induction over the refined grid; V_1(X) is the total value."""
    if capacity < 0:
        raise PricingError("capacity cannot be negative")
    n = rates.n_intervals
    lam = rates.lam
    prices = np.asarray(rates.prices)
    V = np.zeros((n + 1, capacity + 1))
    choice = np.full((n + 1, capacity + 1), -1, dtype=np.int64)
    for t in range(n - 1, -1, -1):
        nxt = V[t + 1]
        shifted = np.concatenate(([0.0], nxt[:-1]))  # V_{t+1}(x-1)
        lam_t = lam[:, t][:, None]
        candidates = lam_t * (prices[:, None] + shifted[None, :]) \
            + (1.0 - lam_t) * nxt[None, :]
        # argmax over classes; prices are descending so the first maximal
        # index is the highest price, matching the recorded tie rule.
        best = np.argmax(candidates, axis=0)
        V[t] = candidates[best, np.arange(capacity + 1)]
        V[t, 0] = 0.0
        choice[t, 1:] = best[1:]
    table = ValueTable(values=V)
    policy = RatePolicy(
        choice=choice,
        prices=rates.prices,
        intervals_per_day=rates.intervals_per_day,
        day_offset=rates.day_offset,
    )
    return table, policy


def evaluate_fixed_policy(
    rates: ArrivalRates,
    capacity: int,
    policy: RatePolicy,
    overrides: dict[int, float] | None = None,
) -> float:
    """Expected revenue of a given policy, optionally overridden per day.

    Same recursion as solve_dp with the max removed: on overridden days the
    posted rate is pinned for every capacity level, elsewhere the policy's
    choice applies. Override keys are horizon days, values are prices.
    """
    overrides = overrides or {}
    price_index = {p: j for j, p in enumerate(rates.prices)}
    for day, price in overrides.items():
        if price not in price_index:
            raise PricingError(f"override price {price} is not a rate class")
        last_day = rates.day_offset + (rates.n_intervals // rates.intervals_per_day) - 1
        if not rates.day_offset <= day <= last_day:
            raise PricingError(f"override day {day} outside the pricing window")
    n = rates.n_intervals
    lam = rates.lam
    V = np.zeros((n + 1, capacity + 1))
    for t in range(n - 1, -1, -1):
        day = rates.day_of_interval(t)
        nxt = V[t + 1]
        shifted = np.concatenate(([0.0], nxt[:-1]))
        forced = overrides.get(day)
        for x in range(1, capacity + 1):
            if forced is not None:
                j = price_index[forced]
            else:
                j = int(policy.choice[t, x])
                if j < 0:
                    j = 0
            p = lam[j, t]
            V[t, x] = p * (rates.prices[j] + shifted[x]) + (1.0 - p) * nxt[x]
    return float(V[0, capacity])


def policy_revenue_on_scenario(
    policy: RatePolicy,
    arrivals: Sequence[float | None],
    capacity: int,
) -> float:
    """Replay one arrival stream under a policy and return realized revenue.

    `arrivals[i]` is the willingness-to-pay of the interval's arrival, or
    None when nobody showed up. A booking happens when the willingness-to-pay
    covers the posted rate and capacity remains.
    """
    if len(arrivals) != policy.choice.shape[0] - 1:
        raise PricingError(
            f"arrival stream has {len(arrivals)} intervals, policy expects "
            f"{policy.choice.shape[0] - 1}"
        )
    revenue = 0.0
    x = capacity
    for t, wtp in enumerate(arrivals):
        if x == 0:
            break
        if wtp is None:
            continue
        posted = policy.posted_rate(t, x)
        if wtp >= posted:
            revenue += posted
            x -= 1
    return revenue
