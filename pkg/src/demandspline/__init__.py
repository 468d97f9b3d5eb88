"""Smooth demand curves for booking horizons, priced by dynamic programming.

The package fits nonnegative, choice-set-ordered piecewise-cubic demand
curves to per-rate booking counts by solving an L1 smoothing-spline linear
program, then computes optimal rate policies and expected revenue over
remaining capacity, with simulation and backtesting harnesses around both.
"""

from .domain import (
    BookingHorizon,
    ChoiceSet,
    DemandScenario,
    DomainError,
    RateLadder,
    choice_sets,
    cumulate_choice_sets,
    to_booking_horizon,
)
from .dp import (
    ArrivalRates,
    RatePolicy,
    ValueTable,
    evaluate_fixed_policy,
    policy_revenue_on_scenario,
    refine_time_grid,
    solve_dp,
)
from .lp import LpProblem, LpSolution, SolverTolerances, solve
from .metrics import WapeResult, revenue_percent_change, select_input_dates, wape
from .pipeline import (
    BacktestConfig,
    BacktestReport,
    build_synthetic_store,
    interpolate_smoothing,
    run_backtest,
)
from .sim import (
    SimConfig,
    TrueCurveSpec,
    default_simulation_curves,
    generate_true_curves,
    run_sensitivity,
    run_simulation_study,
    simulate_scenarios,
)
from .spline import (
    CubicPiece,
    FitDiagnostics,
    FitObservations,
    RateCurveSet,
    anscombe,
    build_fit_program,
    count_decision_vars,
    evaluate_curve,
    fit,
    fit_curves,
)
from .store import PropertyConfig, ScenarioStore

__version__ = "0.1.0"

__all__ = [
    "ArrivalRates", "BacktestConfig", "BacktestReport", "BookingHorizon",
    "ChoiceSet", "CubicPiece", "DemandScenario", "DomainError",
    "FitDiagnostics", "FitObservations", "LpProblem", "LpSolution",
    "PropertyConfig", "RateCurveSet", "RateLadder", "RatePolicy",
    "ScenarioStore", "SimConfig", "SolverTolerances", "TrueCurveSpec",
    "ValueTable", "WapeResult", "anscombe", "build_fit_program",
    "build_synthetic_store", "choice_sets", "count_decision_vars",
    "cumulate_choice_sets", "default_simulation_curves", "evaluate_curve",
    "evaluate_fixed_policy", "fit", "fit_curves", "generate_true_curves",
    "interpolate_smoothing", "policy_revenue_on_scenario", "refine_time_grid",
    "revenue_percent_change", "run_backtest", "run_sensitivity",
    "run_simulation_study", "select_input_dates", "simulate_scenarios",
    "solve", "solve_dp", "to_booking_horizon", "wape",
]
