"""Independent brute-force oracles shared by unit and acceptance tests.

These deliberately avoid the library's own solution paths: the LP oracle
enumerates polytope vertices, and the pricing oracle walks the full arrival
outcome tree recursively without value tables.
"""

from __future__ import annotations

import itertools

import numpy as np

from demandspline.lp import LpProblem

_BOX = 1e6  # artificial bound used to detect unboundedness


def _inequality_form(problem: LpProblem) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All constraints as G x <= h plus sign restrictions, plus objective c."""
    n = problem.n_variables
    rows: list[np.ndarray] = []
    rhs: list[float] = []
    for row, rel, b in zip(problem._rows, problem._relations, problem._rhs):
        a = np.zeros(n)
        for i, coef in row.items():
            a[i] = coef
        if rel in ("<=", "=="):
            rows.append(a)
            rhs.append(b)
        if rel in (">=", "=="):
            rows.append(-a)
            rhs.append(-b)
    for i, sign in enumerate(problem._var_signs):
        if sign == "nonnegative":
            a = np.zeros(n)
            a[i] = -1.0
            rows.append(a)
            rhs.append(0.0)
    c = np.zeros(n)
    for i, coef in problem._objective.items():
        c[i] = coef
    return np.array(rows), np.array(rhs), c


def vertex_enumeration_solve(problem: LpProblem, feas_tol: float = 1e-7):
    """Classify and solve a small LP by enumerating basic feasible points.

    Returns (status, objective). An artificial box |x_i| <= 1e6 is added; an
    optimum that needs the box is classified as unbounded. Only intended for
    problems with a handful of variables and O(10) constraints.
    """
    G, h, c = _inequality_form(problem)
    n = problem.n_variables
    box_rows = []
    for i in range(n):
        a = np.zeros(n)
        a[i] = 1.0
        box_rows.append((a, _BOX))
        box_rows.append((-a, _BOX))
    G_all = np.vstack([G] + [r for r, _ in box_rows])
    h_all = np.concatenate([h, [v for _, v in box_rows]])
    n_real = G.shape[0]

    best_real: float | None = None
    best_boxed: float | None = None
    m = G_all.shape[0]
    for subset in itertools.combinations(range(m), n):
        sub = G_all[list(subset)]
        if abs(np.linalg.det(sub)) < 1e-10:
            continue
        x = np.linalg.solve(sub, h_all[list(subset)])
        slack = G_all @ x - h_all
        if (slack > feas_tol * np.maximum(1.0, np.abs(h_all))).any():
            continue
        value = float(c @ x)
        uses_box = any(idx >= n_real for idx in subset)
        on_box = (np.abs(np.abs(x) - _BOX) < 1e-3).any()
        if uses_box and on_box:
            best_boxed = value if best_boxed is None else min(best_boxed, value)
        else:
            best_real = value if best_real is None else min(best_real, value)

    if best_real is None and best_boxed is None:
        return "infeasible", None
    if best_real is None or (best_boxed is not None and best_boxed < best_real - 1e-6):
        return "unbounded", None
    return "optimal", best_real


def expectimax_revenue(lam: np.ndarray, prices: np.ndarray, capacity: int) -> float:
    """Expected optimal revenue by exhaustive recursion over arrival outcomes.

    `lam[j, t]` is the per-interval probability of a booking at price
    `prices[j]`; at every interval the best rate is chosen and both outcomes
    (sale / no sale) are expanded. No memoization, no value tables.
    """
    n_intervals = lam.shape[1]

    def walk(t: int, x: int) -> float:
        if x == 0 or t == n_intervals:
            return 0.0
        best = -np.inf
        for j in range(len(prices)):
            p = float(lam[j, t])
            value = p * (float(prices[j]) + walk(t + 1, x - 1)) + (1.0 - p) * walk(t + 1, x)
            if value > best:
                best = value
        return best

    return walk(0, capacity)
