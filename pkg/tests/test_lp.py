import numpy as np
import pytest

from demandspline import lp
from demandspline.lp import FREE, LpError, LpProblem, SolverTolerances

from oracles import vertex_enumeration_solve


def simple_problem():
    p = LpProblem()
    p.add_variable("x")
    p.set_objective({"x": 1.0})
    p.add_constraint({"x": 1.0}, ">=", 3.0)
    return p


def test_minimize_above_bound():
    sol = lp.solve(simple_problem())
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(3.0, abs=1e-9)
    assert sol.value("x") == pytest.approx(3.0, abs=1e-9)


def test_unbounded_reported_as_status():
    p = LpProblem()
    p.add_variable("x")
    p.set_objective({"x": -1.0})
    sol = lp.solve(p)
    assert sol.status == "unbounded"
    assert sol.objective is None


def test_infeasible_reported_as_status():
    p = LpProblem()
    p.add_variable("x")
    p.add_constraint({"x": 1.0}, ">=", 2.0)
    p.add_constraint({"x": 1.0}, "<=", 1.0)
    p.set_objective({"x": 1.0})
    sol = lp.solve(p)
    assert sol.status == "infeasible"


def test_absolute_value_encoding():
    # min e with e >= x-5, e >= 5-x and x pinned at 2 gives e = |2-5| = 3.
    p = LpProblem()
    p.add_variable("e")
    p.add_variable("x", FREE)
    p.set_objective({"e": 1.0})
    p.add_constraint({"e": 1.0, "x": -1.0}, ">=", -5.0)
    p.add_constraint({"e": 1.0, "x": 1.0}, ">=", 5.0)
    p.add_constraint({"x": 1.0}, "==", 2.0)
    sol = lp.solve(p)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(3.0, abs=1e-9)


def test_free_variable_can_go_negative():
    p = LpProblem()
    p.add_variable("x", FREE)
    p.set_objective({"x": 1.0})
    p.add_constraint({"x": 1.0}, ">=", -4.0)
    sol = lp.solve(p)
    assert sol.status == "optimal"
    assert sol.value("x") == pytest.approx(-4.0, abs=1e-9)


def test_degenerate_zero_objective_returns_feasible_point():
    p = LpProblem()
    p.add_variable("x")
    p.add_variable("y")
    p.set_objective({})
    p.add_constraint({"x": 1.0, "y": 1.0}, "==", 4.0)
    sol = lp.solve(p)
    assert sol.status == "optimal"
    assert sol.max_violation <= 1e-9
    assert sol.objective == pytest.approx(0.0)


def test_undeclared_variable_rejected():
    p = LpProblem()
    p.add_variable("x")
    with pytest.raises(LpError):
        p.add_constraint({"y": 1.0}, "<=", 1.0)


def test_lp_format_dump_mentions_parts():
    text = simple_problem().to_lp_format()
    assert "Minimize" in text and "Subject To" in text and text.endswith("End\n")


def random_problem(rng: np.random.Generator) -> LpProblem:
    """Random small LP with box bounds making the region bounded."""
    n = int(rng.integers(1, 5))
    m = int(rng.integers(1, 5))
    p = LpProblem()
    for i in range(n):
        p.add_variable(f"x{i}", FREE if rng.random() < 0.3 else "nonnegative")
    p.set_objective({f"x{i}": float(rng.normal()) for i in range(n)})
    for _ in range(m):
        coeffs = {f"x{i}": float(rng.normal()) for i in range(n)}
        rel = rng.choice(["<=", ">=", "=="], p=[0.45, 0.45, 0.1])
        p.add_constraint(coeffs, str(rel), float(rng.normal() * 2))
    for i in range(n):
        p.add_constraint({f"x{i}": 1.0}, "<=", float(rng.uniform(1, 6)))
        p.add_constraint({f"x{i}": 1.0}, ">=", float(-rng.uniform(1, 6)))
    return p


def test_matches_vertex_oracle_on_random_problems():
    rng = np.random.default_rng(20240511)
    checked = 0
    for _ in range(60):
        problem = random_problem(rng)
        expected_status, expected_obj = vertex_enumeration_solve(problem)
        sol = lp.solve(problem)
        assert sol.status == expected_status, problem.to_lp_format()
        if expected_status == "optimal":
            assert sol.objective == pytest.approx(expected_obj, abs=1e-6)
            assert sol.max_violation <= 1e-6
            checked += 1
    assert checked > 20


def test_unbounded_statuses_match_construction():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        p = LpProblem()
        for i in range(n):
            p.add_variable(f"x{i}")
        # x0 only ever appears with nonpositive coefficients, so pushing it up
        # can never break feasibility while the objective rewards it.
        obj = {f"x{i}": float(rng.normal()) for i in range(1, n)}
        obj["x0"] = -1.0
        p.set_objective(obj)
        for _ in range(int(rng.integers(1, 4))):
            coeffs = {f"x{i}": float(rng.normal()) for i in range(1, n)}
            coeffs["x0"] = -float(rng.uniform(0, 1))
            p.add_constraint(coeffs, "<=", float(rng.uniform(0.5, 3)))
        for i in range(1, n):
            p.add_constraint({f"x{i}": 1.0}, "<=", float(rng.uniform(1, 4)))
        sol = lp.solve(p)
        assert sol.status == "unbounded"


def test_weak_duality_spot_check():
    rng = np.random.default_rng(99)
    tried = 0
    for _ in range(30):
        problem = random_problem(rng)
        sol = lp.solve(problem)
        if sol.status != "optimal":
            continue
        tried += 1
        names = problem.variable_names
        for _ in range(40):
            candidate = {n: float(rng.uniform(-6, 6)) for n in names}
            if lp.constraint_violation(problem, candidate) <= 1e-9:
                value = sum(problem._objective.get(i, 0.0) * candidate[n]
                            for i, n in enumerate(names))
                assert value >= sol.objective - 1e-6
    assert tried > 10


def test_feasibility_reverified_independently():
    sol = lp.solve(simple_problem())
    assert sol.max_violation is not None and sol.max_violation <= 1e-9
    p = simple_problem()
    assert lp.constraint_violation(p, {"x": 3.0}) <= 1e-12
    assert lp.constraint_violation(p, {"x": 2.0}) == pytest.approx(1.0)
