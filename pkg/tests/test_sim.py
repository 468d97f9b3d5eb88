import math

import numpy as np
import pytest

from demandspline import dp, sim
from demandspline.sim import (
    RateClassSpec,
    SimConfig,
    SimError,
    TrueCurveSpec,
    default_simulation_curves,
    generate_true_curves,
    run_sensitivity,
    run_simulation_study,
    sample_arrival_stream,
    simulate_scenarios,
)


class TestTrueCurves:
    def test_business_segment_at_checkin(self):
        curves = generate_true_curves(default_simulation_curves())
        assert curves.individual(300, 28.0) == pytest.approx(
            0.02 * math.exp(0.18 * 28), rel=1e-12
        )
        assert curves.individual(300, 28.0) == pytest.approx(3.089, abs=2e-3)

    def test_steady_segment_starts_at_zero(self):
        curves = generate_true_curves(default_simulation_curves())
        assert curves.individual(200, 0.0) == 0.0

    def test_largest_choice_set_sums_all_segments(self):
        curves = generate_true_curves(default_simulation_curves())
        for t in (1.0, 9.5, 28.0):
            total = sum(curves.individual(p, t) for p in (100, 200, 300))
            assert curves.choice_set_curve(3, t) == pytest.approx(total)
            assert curves.demand(100, t) == pytest.approx(total)

    def test_choice_sets_nested_increasing(self):
        curves = generate_true_curves(default_simulation_curves())
        for t in np.linspace(1, 28, 16):
            values = [curves.choice_set_curve(k, float(t)) for k in (1, 2, 3)]
            assert values[0] <= values[1] <= values[2]

    def test_literal_sin_clamps_negative_lobes(self):
        curves = generate_true_curves(default_simulation_curves("sin_literal"))
        assert curves.individual(100, 4.0) == 0.0  # sin(4) < 0
        assert curves.clamped_evaluations > 0

    def test_prices_must_ascend(self):
        with pytest.raises(SimError):
            TrueCurveSpec(classes=(
                RateClassSpec(price=200.0, form="constant", amplitude=1.0),
                RateClassSpec(price=100.0, form="constant", amplitude=1.0),
            ))


class TestSimulateScenarios:
    def test_zero_curves_give_zero_scenarios(self):
        spec = TrueCurveSpec(classes=(
            RateClassSpec(price=100.0, form="constant", amplitude=0.0),
            RateClassSpec(price=200.0, form="constant", amplitude=0.0),
            RateClassSpec(price=300.0, form="constant", amplitude=0.0),
        ), horizon=28)
        config = SimConfig(scenario_count=5, seed=1)
        scenarios = simulate_scenarios(generate_true_curves(spec), config)
        assert all(s.total_bookings() == 0 for s in scenarios)

    def test_fixed_seed_reproduces_scenarios(self):
        curves = generate_true_curves(default_simulation_curves())
        config = SimConfig(scenario_count=6, seed=99)
        a = simulate_scenarios(curves, config)
        b = simulate_scenarios(curves, config)
        assert all((x.counts == y.counts).all() for x, y in zip(a, b))

    def test_poisson_sample_mean_matches_rate(self):
        # ~10,000 day draws at a constant rate of 2.
        spec = TrueCurveSpec(classes=(
            RateClassSpec(price=100.0, form="constant", amplitude=2.0),
        ), horizon=28)
        config = SimConfig(scenario_count=358, seed=7)
        scenarios = simulate_scenarios(generate_true_curves(spec), config)
        counts = np.concatenate([s.counts[0] for s in scenarios])
        assert counts.size == 358 * 28
        assert 1.96 <= counts.mean() <= 2.04

    def test_one_open_rate_per_day(self):
        curves = generate_true_curves(default_simulation_curves())
        config = SimConfig(scenario_count=4, seed=3)
        for s in simulate_scenarios(curves, config):
            assert ((s.counts > 0).sum(axis=0) <= 1).all()

    def test_weights_must_sum_to_one(self):
        with pytest.raises(SimError):
            SimConfig(open_rate_weights=(0.5, 0.2, 0.2))


class TestArrivalStreams:
    def test_stream_statistics_match_rates(self):
        lam = np.array([[0.2] * 4000, [0.5] * 4000])
        rates = dp.ArrivalRates(prices=(300.0, 100.0), lam=lam, intervals_per_day=8)
        stream = sample_arrival_stream(rates, np.random.default_rng(5))
        high = sum(1 for w in stream if w == 300.0) / len(stream)
        any_arrival = sum(1 for w in stream if w is not None) / len(stream)
        assert high == pytest.approx(0.2, abs=0.02)
        assert any_arrival == pytest.approx(0.5, abs=0.02)

    def test_replay_mean_near_expected_value(self):
        curves = generate_true_curves(default_simulation_curves())
        grid = dp.refine_time_grid(curves, 8)
        table, policy = dp.solve_dp(grid, 100)
        rng = np.random.default_rng(11)
        revenues = [
            dp.policy_revenue_on_scenario(policy, sample_arrival_stream(grid, rng), 100)
            for _ in range(50)
        ]
        assert np.mean(revenues) == pytest.approx(table.expected_revenue, rel=0.05)


class TestStudy:
    def test_small_study_shapes_and_determinism(self):
        config = SimConfig(scenario_count=10, seed=5, out_of_sample_count=12)
        report = run_simulation_study(config)
        again = run_simulation_study(config)
        assert report.to_json() == again.to_json()
        assert len(report.results) == 2
        for result in report.results:
            assert set(result.in_sample_wape_pct) == {100, 200, 300}
            assert result.expected_revenue > 0
            assert result.oos_pooled_fitted is not None
            assert result.oos_pooled_true is not None

    def test_sensitivity_smoke(self):
        config = SimConfig(seed=8)
        report = run_sensitivity(config, counts=(10, 12), repetitions=2)
        assert report.runs_per_set == 4
        summary = report.cell_summary(0, 10)
        assert summary["n"] == 2 and summary["ci95"] is not None
        single = run_sensitivity(config, counts=(10,), repetitions=1)
        assert single.cell_summary(0, 10)["ci95"] is None
        assert single.cell_summary(0, 10)["sd"] is None
