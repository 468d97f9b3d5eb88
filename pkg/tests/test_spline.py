import datetime as dt

import numpy as np
import pytest

from demandspline import spline
from demandspline.domain import DemandScenario, cumulate_choice_sets
from demandspline.spline import (
    CurveRangeError,
    DegenerateRateError,
    FitObservations,
    RateCurveSet,
    anscombe,
    build_fit_program,
    count_decision_vars,
    evaluate_curve,
    fit,
    fit_curves,
)


def single_rate_obs(ys, rate=100, x0=1.0):
    return FitObservations.from_mapping(
        {rate: {x0 + i: [float(y)] for i, y in enumerate(ys)}}
    )


def continuity_errors(curves: RateCurveSet, rate: int):
    """Max C0/C1/C2 mismatch between adjacent pieces at interior knots."""
    pieces = curves.pieces[rate]
    worst = [0.0, 0.0, 0.0]
    for k in range(1, len(curves.knots) - 1):
        x = float(curves.knots[k])
        left, right = pieces[k - 1], pieces[k]
        worst[0] = max(worst[0], abs(left.value(x) - right.value(x)))
        worst[1] = max(worst[1], abs(left.deriv1(x) - right.deriv1(x)))
        worst[2] = max(worst[2], abs(left.deriv2(x) - right.deriv2(x)))
    return worst


class TestCountDecisionVars:
    def test_paper_example_28_knots(self):
        assert count_decision_vars(28, 1) == 324

    def test_smallest_legal_grid(self):
        assert count_decision_vars(3, 1) == 24

    def test_scales_with_rate_classes(self):
        assert count_decision_vars(28, 3) == 972

    def test_too_few_knots_rejected(self):
        with pytest.raises(spline.SplineError):
            count_decision_vars(2, 1)


class TestBuildProgram:
    def test_built_problem_has_counted_variables(self):
        rng = np.random.default_rng(1)
        obs = single_rate_obs(rng.uniform(0, 5, size=28))
        program = build_fit_program(obs, smoothing=0.3)
        assert program.problem.n_variables == 324

    def test_all_zero_scenarios_fit_to_zero_curve(self):
        date = dt.date(2018, 6, 7)
        raw = DemandScenario(date, (100, 200), np.zeros((2, 6), dtype=int))
        scen = cumulate_choice_sets(raw)
        curves, diag = fit([scen, scen], smoothing=0.4)
        assert diag.objective == pytest.approx(0.0, abs=1e-9)
        for r in (100, 200):
            assert np.abs(curves.knot_values(r)).max() <= 1e-7

    def test_identical_data_rates_fit_identical_curves(self):
        rng = np.random.default_rng(5)
        ys = [float(v) for v in rng.uniform(0.5, 4.0, size=8)]
        obs = FitObservations.from_mapping({
            100: {1.0 + i: [y] for i, y in enumerate(ys)},
            200: {1.0 + i: [y] for i, y in enumerate(ys)},
        })
        curves, _ = fit(obs, smoothing=0.3)
        gap = np.abs(curves.knot_values(100) - curves.knot_values(200))
        assert gap.max() <= 1e-6

    def test_degenerate_rate_named_in_error(self):
        obs = FitObservations.from_mapping({
            100: {1.0: [1.0], 2.0: [1.0], 3.0: [1.0]},
            200: {1.0: [1.0], 2.0: [1.0]},
        })
        with pytest.raises(DegenerateRateError, match="200"):
            build_fit_program(obs, smoothing=0.3)

    def test_smoothing_outside_unit_interval_rejected(self):
        obs = single_rate_obs([1, 2, 3])
        with pytest.raises(spline.SplineError):
            build_fit_program(obs, smoothing=1.2)


class TestExactness:
    @pytest.mark.parametrize("n", [5, 10, 28])
    def test_interpolates_single_observations_at_zero_smoothing(self, n):
        rng = np.random.default_rng(n)
        ys = rng.uniform(0.0, 6.0, size=n)
        curves, diag = fit(single_rate_obs(ys), smoothing=0.0)
        residuals = np.abs(curves.knot_values(100) - ys)
        assert residuals.max() <= 1e-6
        assert diag.objective <= 1e-9

    def test_linear_data_gives_zero_objective(self):
        ys = [2 * x + 1 for x in range(1, 6)]
        curves, diag = fit(single_rate_obs(ys), smoothing=0.0)
        assert diag.objective == pytest.approx(0.0, abs=1e-9)
        assert np.abs(curves.knot_values(100) - np.array(ys)).max() <= 1e-6

    @pytest.mark.parametrize("n", [5, 10, 28])
    def test_full_smoothing_flattens_second_differences(self, n):
        rng = np.random.default_rng(100 + n)
        ys = rng.uniform(0.0, 6.0, size=n)
        curves, _ = fit(single_rate_obs(ys), smoothing=1.0)
        values = curves.knot_values(100)
        second = values[:-2] - 2 * values[1:-1] + values[2:]
        assert np.abs(second).max() <= 1e-6


def random_multirate_fit(rng):
    n_rates = int(rng.integers(2, 4))
    n_days = int(rng.integers(4, 9))
    rates = tuple(100 * (i + 1) for i in range(n_rates))
    counts = rng.poisson(3.0, size=(n_rates, n_days))
    scen = cumulate_choice_sets(
        DemandScenario(dt.date(2018, 1, 4), rates, counts)
    )
    smoothing = {r: float(rng.uniform(0.05, 0.95)) for r in rates}
    return fit([scen], smoothing=smoothing), rates, smoothing


class TestInvariants:
    def test_random_multirate_fits_satisfy_all_invariants(self):
        rng = np.random.default_rng(42)
        for _ in range(12):
            (curves, diag), rates, smoothing = random_multirate_fit(rng)
            for r in rates:
                c0, c1, c2 = continuity_errors(curves, r)
                assert c0 <= 1e-6 and c1 <= 1e-6 and c2 <= 1e-6
                first = curves.pieces[r][0]
                last = curves.pieces[r][-1]
                assert abs(first.deriv1(float(curves.knots[0]))) <= 1e-6
                assert abs(last.deriv1(float(curves.knots[-1]))) <= 1e-6
                assert curves.knot_values(r).min() >= -1e-7
            for lower, upper in zip(rates, rates[1:]):
                gap = curves.knot_values(lower) - curves.knot_values(upper)
                assert gap.min() >= -1e-7
            assert diag.objective_recomputed == pytest.approx(
                diag.objective, abs=1e-6
            )

    def test_ordering_enforced_when_data_is_inverted(self):
        # Higher rate carries more demand than the lower one; the joint
        # program must still return ordered curves.
        obs = FitObservations.from_mapping({
            100: {float(t): [1.0] for t in range(1, 8)},
            200: {float(t): [3.0] for t in range(1, 8)},
        })
        curves, diag = fit(obs, smoothing=0.2)
        assert diag.solve_path == "joint"
        gap = curves.knot_values(100) - curves.knot_values(200)
        assert gap.min() >= -1e-7

    def test_curvature_penalty_nonincreasing_in_smoothing(self):
        rng = np.random.default_rng(7)
        ys = rng.uniform(0.0, 5.0, size=10)
        totals = []
        for g in (0.1, 0.5, 0.9):
            _, diag = fit(single_rate_obs(ys), smoothing=g)
            totals.append(diag.curvature_by_rate[100])
        assert totals[0] >= totals[1] - 1e-9
        assert totals[1] >= totals[2] - 1e-9


class TestEvaluate:
    def test_constant_data_evaluates_constant(self):
        curves, _ = fit(single_rate_obs([1.0] * 6), smoothing=0.3)
        for x in np.linspace(1.0, 6.0, 23):
            assert evaluate_curve(curves, 100, float(x)) == pytest.approx(1.0, abs=1e-6)

    def test_adjacent_pieces_agree_at_knots(self):
        rng = np.random.default_rng(3)
        curves, _ = fit(single_rate_obs(rng.uniform(0, 4, size=7)), smoothing=0.2)
        pieces = curves.pieces[100]
        for k in range(1, 6):
            x = float(curves.knots[k])
            assert pieces[k - 1].value(x) == pytest.approx(pieces[k].value(x), abs=1e-6)

    def test_extrapolation_refused(self):
        curves, _ = fit(single_rate_obs([1, 2, 3]), smoothing=0.0)
        with pytest.raises(CurveRangeError):
            evaluate_curve(curves, 100, 0.5)
        with pytest.raises(CurveRangeError):
            evaluate_curve(curves, 100, 3.5)

    def test_last_knot_uses_final_piece(self):
        curves, _ = fit(single_rate_obs([1, 2, 3, 4]), smoothing=0.0)
        assert evaluate_curve(curves, 100, 4.0) == pytest.approx(4.0, abs=1e-6)

    def test_values_clamped_nonnegative(self):
        rng = np.random.default_rng(11)
        curves, _ = fit(single_rate_obs(rng.uniform(0, 3, size=8)), smoothing=0.1)
        xs = np.linspace(1.0, 8.0, 57)
        assert min(curves.value(100, float(x)) for x in xs) >= 0.0


class TestAnscombe:
    def test_transform_is_square_root(self):
        assert np.allclose(anscombe([0, 1, 4, 9]), [0, 1, 2, 3])

    def test_negative_input_rejected(self):
        with pytest.raises(spline.SplineError):
            anscombe([-1.0])

    def test_fit_on_sqrt_scale_squares_back(self):
        obs = FitObservations.from_mapping(
            {100: {1.0 + i: [4.0] for i in range(5)}}, transform=True
        )
        curves, _ = fit(obs, smoothing=0.2, transform=True)
        assert curves.raw_value(100, 2.0) == pytest.approx(2.0, abs=1e-6)
        assert curves.value(100, 2.0) == pytest.approx(4.0, abs=1e-6)

    def test_transform_mismatch_rejected(self):
        obs = FitObservations.from_mapping({100: {1.0: [1], 2.0: [2], 3.0: [3]}})
        with pytest.raises(spline.SplineError):
            build_fit_program(obs, smoothing=0.2, transform=True)

    def test_variance_stabilization_on_poisson_fits(self):
        # Residual spread on the sqrt scale should vary far less across
        # demand levels than it does on the raw scale.
        rng = np.random.default_rng(2024)
        raw_sds, transformed_sds = [], []
        for lam in (1.0, 4.0, 16.0):
            draws = {1.0 + t: [float(v) for v in rng.poisson(lam, size=40)]
                     for t in range(8)}
            for transform, out in ((False, raw_sds), (True, transformed_sds)):
                obs = FitObservations.from_mapping({100: dict(draws)}, transform=transform)
                curves, _ = fit(obs, smoothing=0.5, transform=transform)
                residuals = []
                for x, values in draws.items():
                    fitted = curves.raw_value(100, x)
                    scale = np.sqrt(np.asarray(values)) if transform else np.asarray(values)
                    residuals.extend(scale - fitted)
                out.append(np.std(residuals))
        raw_spread = max(raw_sds) / min(raw_sds)
        transformed_spread = max(transformed_sds) / min(transformed_sds)
        assert transformed_spread < raw_spread


class TestSerialization:
    def test_json_round_trip(self):
        rng = np.random.default_rng(9)
        (curves, diag), rates, _ = random_multirate_fit(rng)
        text = curves.to_json(diag)
        loaded = RateCurveSet.from_json(text)
        assert loaded.rates == curves.rates
        for r in rates:
            xs = np.linspace(curves.knots[0], curves.knots[-1], 17)
            for x in xs:
                assert loaded.value(r, float(x)) == pytest.approx(
                    curves.value(r, float(x)), abs=1e-12
                )

    def test_scenario_observation_rules(self):
        date = dt.date(2018, 3, 1)
        raw = DemandScenario(date, (100, 200), np.array([[2, 0, 1, 0], [0, 3, 0, 0]]))
        scen = cumulate_choice_sets(raw)
        dense = FitObservations.from_scenarios([scen], window=(1, 4))
        assert dense.by_rate[100].xs == (1.0, 2.0, 3.0, 4.0)
        sparse = FitObservations.from_scenarios(
            [scen], window=(1, 4), include_zero_cells=False, min_distinct=1
        )
        # Rate 100 was sold on days 1 and 3 only; rate 200 on day 2 only.
        assert sparse.by_rate[100].xs == (1.0, 3.0)
        assert sparse.by_rate[200].xs == (2.0,)
        # Cumulated value, not the raw one, is the observation.
        assert sparse.by_rate[100].means == (2.0, 1.0)
        assert sparse.by_rate[200].means == (3.0,)
