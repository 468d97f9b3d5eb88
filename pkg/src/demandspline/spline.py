"""Cubic smoothing splines as linear programs.

Each rate class gets a piecewise-cubic demand curve over a shared knot grid.
The fit trades a weighted L1 data error against the L1 norm of second
differences of knot values, with C0/C1/C2 continuity at interior knots, zero
first derivatives at both ends, nonnegative knot values, and choice-set
ordering between adjacent rate curves. Every quantity in the program (piece
coefficients, error terms, curvature terms) is modelled as a pair of
nonnegative variables, which is where the (4(n-1) + n + (n-2)) * 2 * R
decision-variable count comes from.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import lp
from .domain import DemandScenario


class SplineError(ValueError):
    """Invalid fitting input."""


class DegenerateRateError(SplineError):
    """A rate class has too few distinct observation days to be fitted."""

    def __init__(self, rate: int, distinct: int):
        self.rate = rate
        self.distinct = distinct
        super().__init__(
            f"rate {rate} has {distinct} distinct observation day(s); at least 3 required"
        )


class CurveRangeError(SplineError):
    """Evaluation outside the fitted knot range; extrapolation is refused."""


def anscombe(values) -> np.ndarray:
    """Square-root transform that stabilizes the spread of Poisson counts."""
    arr = np.asarray(values, dtype=float)
    if (arr < 0).any():
        raise SplineError("square-root transform requires nonnegative values")
    return np.sqrt(arr)


def count_decision_vars(n_knots: int, n_rates: int = 1) -> int:
    """Decision variables in the fit program: (4(n-1) + n + (n-2)) * 2 * R."""
    if n_knots < 3:
        raise SplineError("at least 3 distinct x-values are required")
    if n_rates < 1:
        raise SplineError("at least one rate class is required")
    return (4 * (n_knots - 1) + n_knots + (n_knots - 2)) * 2 * n_rates


@dataclass(frozen=True)
class CubicPiece:
    """One cubic a + b*x + c*x^2 + d*x^3 on [x_lo, x_hi]."""

    a: float
    b: float
    c: float
    d: float
    x_lo: float
    x_hi: float

    def __post_init__(self) -> None:
        if not self.x_lo < self.x_hi:
            raise SplineError("piece interval must be nonempty")

    def value(self, x: float) -> float:
        return self.a + x * (self.b + x * (self.c + x * self.d))

    def deriv1(self, x: float) -> float:
        return self.b + x * (2.0 * self.c + x * 3.0 * self.d)

    def deriv2(self, x: float) -> float:
        return 2.0 * self.c + 6.0 * self.d * x


@dataclass(frozen=True)
class RateObservations:
    """Aggregated observations for one rate: mean y and weight per knot."""

    xs: tuple[float, ...]
    means: tuple[float, ...]
    counts: tuple[int, ...]
    weights: tuple[float, ...]


@dataclass(frozen=True)
class FitObservations:
    """Per-rate observation sets over a shared knot grid.

    Multiple y values at the same x are aggregated to their mean; the knot's
    weight is proportional to 1 / (number of y values there), normalized to
    sum to one per rate.
    """

    knots: tuple[float, ...]
    rates: tuple[int, ...]
    by_rate: dict[int, RateObservations]
    transform: bool = False

    @classmethod
    def from_mapping(
        cls,
        samples: Mapping[int, Mapping[float, Sequence[float]]],
        transform: bool = False,
        knots: Iterable[float] | None = None,
    ) -> "FitObservations":
        """Build from {rate: {x: [y, ...]}} raw samples."""
        rates = tuple(sorted(samples))
        if not rates:
            raise SplineError("no rate classes supplied")
        knot_set = set() if knots is None else {float(x) for x in knots}
        if knots is None:
            for per_x in samples.values():
                knot_set.update(float(x) for x in per_x)
        grid = tuple(sorted(knot_set))
        if len(grid) < 3:
            raise SplineError("at least 3 distinct x-values are required")
        by_rate: dict[int, RateObservations] = {}
        for rate in rates:
            per_x = samples[rate]
            xs = tuple(sorted(float(x) for x in per_x))
            missing = [x for x in xs if x not in knot_set]
            if missing:
                raise SplineError(f"observation day {missing[0]} not on the knot grid")
            means = []
            counts = []
            for x in xs:
                ys = np.asarray(per_x[x], dtype=float)
                if ys.size == 0:
                    raise SplineError(f"empty observation list at x={x}")
                if (ys < 0).any():
                    raise SplineError("demand observations must be nonnegative")
                if transform:
                    ys = anscombe(ys)
                means.append(float(ys.mean()))
                counts.append(int(ys.size))
            inverse = np.array([1.0 / c for c in counts])
            weights = inverse / inverse.sum()
            by_rate[rate] = RateObservations(
                xs=xs,
                means=tuple(means),
                counts=tuple(counts),
                weights=tuple(float(w) for w in weights),
            )
        return cls(knots=grid, rates=rates, by_rate=by_rate, transform=transform)

    @classmethod
    def from_scenarios(
        cls,
        scenarios: Sequence[DemandScenario],
        transform: bool = False,
        window: tuple[int, int] | None = None,
        include_zero_cells: bool = True,
        rates: Sequence[int] | None = None,
        min_distinct: int = 3,
    ) -> "FitObservations":
        """Collect observations from cumulated demand scenarios.

        With include_zero_cells=True every (rate, day) cell is an observation.
        With False, a cell counts only when the underlying raw scenario had a
        booking at that exact rate and day (recovered from the cumulated
        matrix); days a rate was never sold on are treated as censored, not as
        zero demand.
        """
        if not scenarios:
            raise SplineError("no scenarios supplied")
        for s in scenarios:
            if not s.cumulated:
                raise SplineError("scenarios must be in cumulated choice-set form")
        rates_all = scenarios[0].rates
        if any(s.rates != rates_all for s in scenarios):
            raise SplineError("scenarios must share one rate ladder")
        wanted = tuple(sorted(rates if rates is not None else rates_all))
        horizon = scenarios[0].horizon_length
        lo, hi = window if window is not None else (1, horizon)
        if not 1 <= lo < hi <= horizon:
            raise SplineError("fit window out of horizon range")

        samples: dict[int, dict[float, list[float]]] = {r: {} for r in wanted}
        for s in scenarios:
            counts = s.counts
            for i, rate in enumerate(rates_all):
                if rate not in samples:
                    continue
                raw_row = counts[i] - (counts[i + 1] if i + 1 < len(rates_all) else 0)
                for t in range(lo, hi + 1):
                    value = float(counts[i, t - 1])
                    if include_zero_cells or raw_row[t - 1] > 0:
                        x = float(t - lo + 1)
                        samples[rate].setdefault(x, []).append(value)
        for rate in wanted:
            if len(samples[rate]) < min_distinct:
                raise DegenerateRateError(rate, len(samples[rate]))
        return cls.from_mapping(samples, transform=transform)


@dataclass(frozen=True)
class VariableMap:
    """Names of the paired LP variables per rate class."""

    knots: tuple[float, ...]
    rates: tuple[int, ...]
    coefficients: dict[int, list[dict[str, tuple[str, str]]]]
    errors: dict[int, dict[float, tuple[str, str]]]
    curvatures: dict[int, dict[int, tuple[str, str]]]


@dataclass
class FitProgram:
    """A built fit: the LP, its variable map, and the inputs that shaped it."""

    observations: FitObservations
    smoothing: dict[int, float]
    problem: lp.LpProblem
    variables: VariableMap


@dataclass(frozen=True)
class FitDiagnostics:
    objective: float
    objective_recomputed: float
    error_by_rate: dict[int, float]
    curvature_by_rate: dict[int, float]
    n_variables: int
    n_constraints: int
    solve_path: str
    iterations: int
    ordering_violation: float
    min_knot_value: float

    def to_dict(self) -> dict:
        return {
            "objective": self.objective,
            "objective_recomputed": self.objective_recomputed,
            "error_by_rate": {str(r): v for r, v in self.error_by_rate.items()},
            "curvature_by_rate": {str(r): v for r, v in self.curvature_by_rate.items()},
            "n_variables": self.n_variables,
            "n_constraints": self.n_constraints,
            "solve_path": self.solve_path,
            "iterations": self.iterations,
            "ordering_violation": self.ordering_violation,
            "min_knot_value": self.min_knot_value,
        }


class RateCurveSet:
    """Fitted piecewise-cubic demand curves, one per rate class."""

    def __init__(
        self,
        rates: Sequence[int],
        knots: Sequence[float],
        pieces: Mapping[int, Sequence[CubicPiece]],
        smoothing: Mapping[int, float],
        transform: bool = False,
    ):
        self.rates = tuple(sorted(rates))
        self.knots = np.asarray(list(knots), dtype=float)
        if self.knots.size < 3 or (np.diff(self.knots) <= 0).any():
            raise SplineError("knots must be at least 3 strictly increasing values")
        self.pieces = {r: tuple(pieces[r]) for r in self.rates}
        for r in self.rates:
            if len(self.pieces[r]) != self.knots.size - 1:
                raise SplineError("each rate needs one piece per knot interval")
        self.smoothing = {r: float(smoothing[r]) for r in self.rates}
        self.transform = bool(transform)

    def _piece_index(self, x: float) -> int:
        if x < self.knots[0] or x > self.knots[-1]:
            raise CurveRangeError(
                f"x={x} outside fitted range [{self.knots[0]}, {self.knots[-1]}]"
            )
        idx = int(np.searchsorted(self.knots, x, side="right")) - 1
        return min(max(idx, 0), self.knots.size - 2)

    def raw_value(self, rate: int, x: float) -> float:
        """Fitted value before nonnegativity clamping or back-transform."""
        return self.pieces[rate][self._piece_index(x)].value(x)

    def value(self, rate: int, x: float) -> float:
        """Demand at x; clamped at zero, squared back if fitted on sqrt scale."""
        v = max(0.0, self.raw_value(rate, x))
        return v * v if self.transform else v

    def knot_values(self, rate: int) -> np.ndarray:
        return np.array([self.raw_value(rate, float(x)) for x in self.knots])

    # Demand-curve protocol used by the pricing grid builder.
    def demand(self, rate: int, day: float) -> float:
        return self.value(rate, day)

    def day_span(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def ordering_violation(self, points_per_interval: int = 9) -> float:
        """Largest between-knot violation of the rate ordering, 0 when none."""
        if len(self.rates) < 2:
            return 0.0
        xs = np.concatenate([
            np.linspace(lo, hi, points_per_interval)
            for lo, hi in zip(self.knots[:-1], self.knots[1:])
        ])
        worst = 0.0
        for lower, upper in zip(self.rates, self.rates[1:]):
            for x in xs:
                gap = self.raw_value(lower, float(x)) - self.raw_value(upper, float(x))
                worst = max(worst, -gap)
        return worst

    def to_json(self, diagnostics: FitDiagnostics | None = None) -> str:
        doc = {
            "knots": [float(x) for x in self.knots],
            "transform": self.transform,
            "rates": [
                {
                    "rate": r,
                    "g": self.smoothing[r],
                    "pieces": [
                        {
                            "a": p.a, "b": p.b, "c": p.c, "d": p.d,
                            "x_lo": p.x_lo, "x_hi": p.x_hi,
                        }
                        for p in self.pieces[r]
                    ],
                    "knot_values": [float(v) for v in self.knot_values(r)],
                }
                for r in self.rates
            ],
        }
        if diagnostics is not None:
            doc["diagnostics"] = diagnostics.to_dict()
        return json.dumps(doc, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RateCurveSet":
        doc = json.loads(text)
        pieces = {
            entry["rate"]: [
                CubicPiece(p["a"], p["b"], p["c"], p["d"], p["x_lo"], p["x_hi"])
                for p in entry["pieces"]
            ]
            for entry in doc["rates"]
        }
        smoothing = {entry["rate"]: entry["g"] for entry in doc["rates"]}
        return cls(
            rates=list(pieces),
            knots=doc["knots"],
            pieces=pieces,
            smoothing=smoothing,
            transform=doc["transform"],
        )


def _normalize_smoothing(
    smoothing: float | Mapping[int, float] | Sequence[float], rates: tuple[int, ...]
) -> dict[int, float]:
    if isinstance(smoothing, Mapping):
        values = {r: float(smoothing[r]) for r in rates}
    elif isinstance(smoothing, (int, float)):
        values = {r: float(smoothing) for r in rates}
    else:
        seq = list(smoothing)
        if len(seq) != len(rates):
            raise SplineError("need one smoothing value per rate class")
        values = {r: float(g) for r, g in zip(rates, seq)}
    for r, g in values.items():
        if not 0.0 <= g <= 1.0:
            raise SplineError(f"smoothing for rate {r} must lie in [0, 1], got {g}")
    return values


def _spline_value_terms(
    coef: list[dict[str, tuple[str, str]]],
    knots: tuple[float, ...],
    piece: int,
    x: float,
    sign: float = 1.0,
) -> dict[str, float]:
    """Linear-expression terms of S(x) evaluated through a given piece.

    The LP works in piece-local coordinates xi = x - x_piece to keep the
    constraint matrix well conditioned; coefficients are mapped back to the
    global monomial basis after solving.
    """
    xi = x - knots[piece]
    terms: dict[str, float] = {}
    powers = (1.0, xi, xi * xi, xi * xi * xi)
    for key, power in zip("abcd", powers):
        plus, minus = coef[piece][key]
        terms[plus] = terms.get(plus, 0.0) + sign * power
        terms[minus] = terms.get(minus, 0.0) - sign * power
    return terms


def _deriv_terms(
    coef: list[dict[str, tuple[str, str]]],
    knots: tuple[float, ...],
    piece: int,
    x: float,
    order: int,
    sign: float = 1.0,
) -> dict[str, float]:
    xi = x - knots[piece]
    if order == 1:
        powers = {"b": 1.0, "c": 2.0 * xi, "d": 3.0 * xi * xi}
    else:
        powers = {"c": 2.0, "d": 6.0 * xi}
    terms: dict[str, float] = {}
    for key, power in powers.items():
        plus, minus = coef[piece][key]
        terms[plus] = terms.get(plus, 0.0) + sign * power
        terms[minus] = terms.get(minus, 0.0) - sign * power
    return terms


def _merge(*parts: dict[str, float]) -> dict[str, float]:
    out: dict[str, float] = {}
    for part in parts:
        for name, coefficient in part.items():
            out[name] = out.get(name, 0.0) + coefficient
    return {k: v for k, v in out.items() if v != 0.0}


def _knot_piece(k: int, n: int) -> int:
    """Piece whose polynomial evaluates S at knot index k (0-based)."""
    return min(k, n - 2)


def _add_rate_block(
    problem: lp.LpProblem,
    rate: int,
    tag: str,
    knots: tuple[float, ...],
    obs: RateObservations,
    g: float,
    objective: dict[str, float],
) -> tuple[list[dict[str, tuple[str, str]]], dict[float, tuple[str, str]], dict[int, tuple[str, str]]]:
    """Declare one rate's paired variables and constraints; extend the objective."""
    n = len(knots)
    coef: list[dict[str, tuple[str, str]]] = []
    for i in range(n - 1):
        per_piece = {}
        for key in "abcd":
            plus = problem.add_variable(f"{key}p_{tag}_{i}")
            minus = problem.add_variable(f"{key}m_{tag}_{i}")
            per_piece[key] = (plus, minus)
        coef.append(per_piece)

    errors: dict[float, tuple[str, str]] = {}
    for x in obs.xs:
        plus = problem.add_variable(f"ep_{tag}_x{x:g}")
        minus = problem.add_variable(f"em_{tag}_x{x:g}")
        errors[x] = (plus, minus)

    curvatures: dict[int, tuple[str, str]] = {}
    for k in range(2, n):  # 0-based knot index of the trailing knot
        plus = problem.add_variable(f"qp_{tag}_k{k}")
        minus = problem.add_variable(f"qm_{tag}_k{k}")
        curvatures[k] = (plus, minus)

    knot_index = {x: k for k, x in enumerate(knots)}

    # Error pairs: e >= S(x_k) - Y_k and e >= Y_k - S(x_k).
    for x, mean, weight in zip(obs.xs, obs.means, obs.weights):
        k = knot_index[x]
        piece = _knot_piece(k, n)
        e_plus, e_minus = errors[x]
        e_terms = {e_plus: 1.0, e_minus: -1.0}
        s_terms = _spline_value_terms(coef, knots, piece, x)
        problem.add_constraint(_merge(e_terms, {k_: -v for k_, v in s_terms.items()}), ">=", -mean)
        problem.add_constraint(_merge(e_terms, s_terms), ">=", mean)
        scale = (1.0 - g) * weight
        objective[e_plus] = objective.get(e_plus, 0.0) + scale
        objective[e_minus] = objective.get(e_minus, 0.0) - scale

    # Second-difference pairs on knot values, unit index spacing:
    # d2_k = S(x_{k-2}) - 2 S(x_{k-1}) + S(x_k).
    for k in range(2, n):
        q_plus, q_minus = curvatures[k]
        q_terms = {q_plus: 1.0, q_minus: -1.0}
        second = _merge(
            _spline_value_terms(coef, knots, _knot_piece(k - 2, n), knots[k - 2]),
            _spline_value_terms(coef, knots, _knot_piece(k - 1, n), knots[k - 1], sign=-2.0),
            _spline_value_terms(coef, knots, _knot_piece(k, n), knots[k]),
        )
        problem.add_constraint(_merge(q_terms, {k_: -v for k_, v in second.items()}), ">=", 0.0)
        problem.add_constraint(_merge(q_terms, second), ">=", 0.0)
        objective[q_plus] = objective.get(q_plus, 0.0) + g
        objective[q_minus] = objective.get(q_minus, 0.0) - g

    # C0/C1/C2 continuity at interior knots between adjacent pieces.
    for k in range(1, n - 1):
        x = knots[k]
        problem.add_constraint(
            _merge(
                _spline_value_terms(coef, knots, k - 1, x),
                _spline_value_terms(coef, knots, k, x, sign=-1.0),
            ),
            "==", 0.0,
        )
        for order in (1, 2):
            problem.add_constraint(
                _merge(
                    _deriv_terms(coef, knots, k - 1, x, order),
                    _deriv_terms(coef, knots, k, x, order, sign=-1.0),
                ),
                "==", 0.0,
            )

    # Natural-style boundary: zero slope at both ends of the horizon.
    problem.add_constraint(_deriv_terms(coef, knots, 0, knots[0], 1), "==", 0.0)
    problem.add_constraint(_deriv_terms(coef, knots, n - 2, knots[-1], 1), "==", 0.0)

    # Demand never drops below zero at the knots.
    for k in range(n):
        problem.add_constraint(
            _spline_value_terms(coef, knots, _knot_piece(k, n), knots[k]), ">=", 0.0
        )

    return coef, errors, curvatures


def build_fit_program(
    scenarios: Sequence[DemandScenario] | FitObservations,
    smoothing: float | Mapping[int, float] | Sequence[float],
    transform: bool = False,
    window: tuple[int, int] | None = None,
    include_zero_cells: bool = True,
    rates: Sequence[int] | None = None,
) -> FitProgram:
    """Assemble the fit LP for cumulated scenarios (or prebuilt observations)."""
    if isinstance(scenarios, FitObservations):
        obs = scenarios
        if obs.transform != transform:
            raise SplineError(
                "transform flag disagrees with the prebuilt observations; "
                "pass transform= to FitObservations.from_mapping instead"
            )
    else:
        obs = FitObservations.from_scenarios(
            scenarios,
            transform=transform,
            window=window,
            include_zero_cells=include_zero_cells,
            rates=rates,
        )
    for rate in obs.rates:
        distinct = len(obs.by_rate[rate].xs)
        if distinct < 3:
            raise DegenerateRateError(rate, distinct)
    g_by_rate = _normalize_smoothing(smoothing, obs.rates)
    problem = lp.LpProblem(name="rate-curve-fit")
    objective: dict[str, float] = {}
    coefficients: dict[int, list[dict[str, tuple[str, str]]]] = {}
    errors: dict[int, dict[float, tuple[str, str]]] = {}
    curvatures: dict[int, dict[int, tuple[str, str]]] = {}
    for rate in obs.rates:
        coef, errs, curv = _add_rate_block(
            problem, rate, f"r{rate}", obs.knots, obs.by_rate[rate], g_by_rate[rate], objective
        )
        coefficients[rate] = coef
        errors[rate] = errs
        curvatures[rate] = curv

    # Choice-set ordering: the cheaper rate's curve dominates at every knot.
    n = len(obs.knots)
    for lower, upper in zip(obs.rates, obs.rates[1:]):
        for k in range(n):
            x = obs.knots[k]
            piece = _knot_piece(k, n)
            problem.add_constraint(
                _merge(
                    _spline_value_terms(coefficients[lower], obs.knots, piece, x),
                    _spline_value_terms(coefficients[upper], obs.knots, piece, x, sign=-1.0),
                ),
                ">=", 0.0,
            )
    problem.set_objective(objective)
    var_map = VariableMap(
        knots=obs.knots, rates=obs.rates,
        coefficients=coefficients, errors=errors, curvatures=curvatures,
    )
    return FitProgram(observations=obs, smoothing=g_by_rate, problem=problem, variables=var_map)


def _extract_pieces(
    assignment: Mapping[str, float],
    coef: list[dict[str, tuple[str, str]]],
    knots: tuple[float, ...],
) -> list[CubicPiece]:
    pieces = []
    for i, per_piece in enumerate(coef):
        local = {}
        for key in "abcd":
            plus, minus = per_piece[key]
            local[key] = assignment[plus] - assignment[minus]
        # Expand a + b(x-s) + c(x-s)^2 + d(x-s)^3 into the monomial basis.
        s = knots[i]
        a, b, c, d = local["a"], local["b"], local["c"], local["d"]
        pieces.append(CubicPiece(
            a=a - b * s + c * s * s - d * s ** 3,
            b=b - 2.0 * c * s + 3.0 * d * s * s,
            c=c - 3.0 * d * s,
            d=d,
            x_lo=knots[i], x_hi=knots[i + 1],
        ))
    return pieces


def _recompute_objective(
    curves: RateCurveSet, obs: FitObservations, smoothing: Mapping[int, float]
) -> tuple[float, dict[int, float], dict[int, float]]:
    total = 0.0
    error_by_rate = {}
    curvature_by_rate = {}
    for rate in obs.rates:
        ro = obs.by_rate[rate]
        err = sum(
            w * abs(curves.raw_value(rate, x) - mean)
            for x, mean, w in zip(ro.xs, ro.means, ro.weights)
        )
        values = curves.knot_values(rate)
        second = values[:-2] - 2.0 * values[1:-1] + values[2:]
        curv = float(np.abs(second).sum())
        g = smoothing[rate]
        error_by_rate[rate] = float(err)
        curvature_by_rate[rate] = curv
        total += (1.0 - g) * err + g * curv
    return total, error_by_rate, curvature_by_rate


def _solve_rate_group(
    program: FitProgram, group: tuple[int, ...], tolerances
) -> lp.LpSolution:
    obs = program.observations
    if group == obs.rates:
        sub = program
    else:
        sub = build_fit_program(
            FitObservations(
                knots=obs.knots, rates=group,
                by_rate={r: obs.by_rate[r] for r in group},
                transform=obs.transform,
            ),
            smoothing={r: program.smoothing[r] for r in group},
            transform=obs.transform,
        )
    sol = lp.solve(sub.problem, tolerances)
    if sol.status != "optimal":
        raise lp.LpInternalError(
            f"fit for rates {group} reported {sol.status}; the zero curve is "
            "always feasible, so this is a solver bug"
        )
    return sol


def fit_curves(
    program: FitProgram, tolerances: lp.SolverTolerances | None = None
) -> tuple[RateCurveSet, FitDiagnostics]:
    """Solve the fit program and return evaluable curves with diagnostics.

    Rates are first fitted independently; whenever two adjacent blocks
    violate the knot-level ordering they are merged and re-solved jointly
    until no cross-block violation remains. A block solution set that
    satisfies the couplings is optimal for the full program (each block's
    objective lower-bounds any feasible joint assignment restricted to it),
    so this is exact, not a heuristic.
    """
    obs = program.observations
    rates = obs.rates

    groups: list[tuple[int, ...]] = [(r,) for r in rates]
    solutions: dict[tuple[int, ...], lp.LpSolution] = {
        g: _solve_rate_group(program, g, tolerances) for g in groups
    }
    while True:
        assignment = {n: v for g in groups for n, v in solutions[g].assignment.items()}
        candidate = _assemble(program, assignment)
        merge_at = _first_boundary_violation(candidate, groups)
        if merge_at is None:
            break
        merged = groups[merge_at] + groups[merge_at + 1]
        for old in (groups[merge_at], groups[merge_at + 1]):
            solutions.pop(old, None)
        groups[merge_at : merge_at + 2] = [merged]
        solutions[merged] = _solve_rate_group(program, merged, tolerances)

    if len(groups) == len(rates):
        solve_path = "per-rate"
    elif len(groups) == 1 and len(rates) > 1:
        solve_path = "joint"
    elif len(rates) == 1:
        solve_path = "per-rate"
    else:
        solve_path = "grouped"
    objective = float(sum(solutions[g].objective for g in groups))
    iterations = int(sum(solutions[g].iterations for g in groups))

    curves = _assemble(program, assignment)
    recomputed, error_by_rate, curvature_by_rate = _recompute_objective(
        curves, obs, program.smoothing
    )
    min_knot = min(float(curves.knot_values(r).min()) for r in rates)
    diagnostics = FitDiagnostics(
        objective=objective,
        objective_recomputed=recomputed,
        error_by_rate=error_by_rate,
        curvature_by_rate=curvature_by_rate,
        n_variables=program.problem.n_variables,
        n_constraints=program.problem.n_constraints,
        solve_path=solve_path,
        iterations=iterations,
        ordering_violation=curves.ordering_violation(),
        min_knot_value=min_knot,
    )
    return curves, diagnostics


def _assemble(program: FitProgram, assignment: Mapping[str, float]) -> RateCurveSet:
    obs = program.observations
    pieces = {
        rate: _extract_pieces(assignment, program.variables.coefficients[rate], obs.knots)
        for rate in obs.rates
    }
    return RateCurveSet(
        rates=obs.rates, knots=obs.knots, pieces=pieces,
        smoothing=program.smoothing, transform=obs.transform,
    )


def _first_boundary_violation(
    curves: RateCurveSet, groups: list[tuple[int, ...]]
) -> int | None:
    """Index of the first adjacent group pair violating knot ordering."""
    scale = max(1.0, max(float(np.abs(curves.knot_values(r)).max()) for r in curves.rates))
    for i in range(len(groups) - 1):
        lower = groups[i][-1]     # highest rate of the cheaper group
        upper = groups[i + 1][0]  # lowest rate of the pricier group
        gap = curves.knot_values(lower) - curves.knot_values(upper)
        if gap.min() < -1e-9 * scale:
            return i
    return None


def fit(
    scenarios: Sequence[DemandScenario] | FitObservations,
    smoothing: float | Mapping[int, float] | Sequence[float],
    transform: bool = False,
    window: tuple[int, int] | None = None,
    include_zero_cells: bool = True,
    rates: Sequence[int] | None = None,
    tolerances: lp.SolverTolerances | None = None,
) -> tuple[RateCurveSet, FitDiagnostics]:
    """Build and solve a fit in one step."""
    program = build_fit_program(
        scenarios, smoothing, transform=transform, window=window,
        include_zero_cells=include_zero_cells, rates=rates,
    )
    return fit_curves(program, tolerances)


def evaluate_curve(curves: RateCurveSet, rate: int, x: float) -> float:
    """Demand of one rate class at x; refuses extrapolation outside the knots."""
    return curves.value(rate, x)
