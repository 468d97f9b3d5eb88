"""Minimal dense linear-programming core.

Problems are stated as minimization over named variables with ``<=``, ``>=``
and ``==`` constraints. Free variables are split into nonnegative pairs
during standard-form conversion, and the solver is a two-phase tableau
simplex: Devex pricing with a Harris-style ratio test for speed and pivot
quality, falling back to Bland's rule after a degenerate stall so it cannot
cycle. Rows and columns are equilibrated to powers of two before solving and
the tableau is periodically rebuilt exactly from the original matrix;
unbounded directions are verified against that matrix before being reported,
and a solve that degrades numerically is retried once in a conservative
mode. Stated tolerances apply to the scaled problem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

NONNEGATIVE = "nonnegative"
FREE = "free"

_RELATIONS = ("<=", ">=", "==")


class LpError(ValueError):
    """Malformed problem construction."""


class LpInternalError(RuntimeError):
    """The solver violated its own contract; indicates a bug, not bad input."""


@dataclass(frozen=True)
class SolverTolerances:
    feasibility: float = 1e-7
    objective: float = 1e-6
    pivot: float = 1e-9


@dataclass
class LpProblem:
    """A linear program: minimize c.x subject to linear constraints."""

    name: str = ""
    _var_names: list[str] = field(default_factory=list)
    _var_signs: list[str] = field(default_factory=list)
    _var_index: dict[str, int] = field(default_factory=dict)
    _objective: dict[int, float] = field(default_factory=dict)
    _rows: list[dict[int, float]] = field(default_factory=list)
    _relations: list[str] = field(default_factory=list)
    _rhs: list[float] = field(default_factory=list)

    def add_variable(self, name: str, sign: str = NONNEGATIVE) -> str:
        if name in self._var_index:
            raise LpError(f"duplicate variable {name!r}")
        if sign not in (NONNEGATIVE, FREE):
            raise LpError(f"unknown sign restriction {sign!r}")
        self._var_index[name] = len(self._var_names)
        self._var_names.append(name)
        self._var_signs.append(sign)
        return name

    def set_objective(self, coefficients: dict[str, float]) -> None:
        self._objective = self._resolve(coefficients)

    def add_constraint(
        self, coefficients: dict[str, float], relation: str, rhs: float
    ) -> None:
        if relation not in _RELATIONS:
            raise LpError(f"unknown relation {relation!r}")
        if not math.isfinite(rhs):
            raise LpError("constraint constant must be finite")
        self._rows.append(self._resolve(coefficients))
        self._relations.append(relation)
        self._rhs.append(float(rhs))

    def _resolve(self, coefficients: dict[str, float]) -> dict[int, float]:
        resolved: dict[int, float] = {}
        for name, coef in coefficients.items():
            if name not in self._var_index:
                raise LpError(f"undeclared variable {name!r}")
            if not math.isfinite(coef):
                raise LpError(f"coefficient for {name!r} must be finite")
            if coef != 0.0:
                resolved[self._var_index[name]] = resolved.get(self._var_index[name], 0.0) + float(coef)
        return resolved

    @property
    def n_variables(self) -> int:
        return len(self._var_names)

    @property
    def n_constraints(self) -> int:
        return len(self._rows)

    @property
    def variable_names(self) -> tuple[str, ...]:
        return tuple(self._var_names)

    def to_lp_format(self) -> str:
        """Problem rendered in CPLEX-style LP text, for external cross-checks."""

        def term(idx: int, coef: float) -> str:
            return f"{'+' if coef >= 0 else '-'} {abs(coef):.12g} {self._var_names[idx]}"

        lines = ["Minimize", " obj: " + " ".join(
            term(i, c) for i, c in sorted(self._objective.items()) or [(0, 0.0)]
        ) if self._objective else " obj: 0 " + (self._var_names[0] if self._var_names else "x")]
        lines.append("Subject To")
        rel_text = {"<=": "<=", ">=": ">=", "==": "="}
        for r, (row, rel, rhs) in enumerate(zip(self._rows, self._relations, self._rhs)):
            body = " ".join(term(i, c) for i, c in sorted(row.items())) or "0"
            lines.append(f" c{r}: {body} {rel_text[rel]} {rhs:.12g}")
        free = [n for n, s in zip(self._var_names, self._var_signs) if s == FREE]
        if free:
            lines.append("Bounds")
            lines.extend(f" {name} free" for name in free)
        lines.append("End")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LpSolution:
    status: str  # optimal | infeasible | unbounded
    objective: float | None
    assignment: dict[str, float] | None
    max_violation: float | None = None
    iterations: int = 0

    def value(self, name: str) -> float:
        if self.assignment is None:
            raise LpError("no assignment on a non-optimal solution")
        return self.assignment[name]


def constraint_violation(problem: LpProblem, assignment: dict[str, float]) -> float:
    """Largest violation of the original constraints and sign restrictions.

    Deliberately independent of the solver: recomputed from the problem's own
    rows against a plain dict of values.
    """
    x = np.array([assignment[n] for n in problem.variable_names], dtype=float)
    worst = 0.0
    for row, rel, rhs in zip(problem._rows, problem._relations, problem._rhs):
        lhs = sum(c * x[i] for i, c in row.items())
        if rel == "<=":
            worst = max(worst, lhs - rhs)
        elif rel == ">=":
            worst = max(worst, rhs - lhs)
        else:
            worst = max(worst, abs(lhs - rhs))
    for i, sign in enumerate(problem._var_signs):
        if sign == NONNEGATIVE:
            worst = max(worst, -x[i])
    return float(worst)


def solve(problem: LpProblem, tolerances: SolverTolerances | None = None) -> LpSolution:
    """Solve the problem, reporting optimal/infeasible/unbounded."""
    tol = tolerances or SolverTolerances()
    if problem.n_variables == 0:
        raise LpError("problem has no variables")

    # Standard form: split free variables, one column per nonnegative part.
    n_orig = problem.n_variables
    col_of_plus = np.zeros(n_orig, dtype=int)
    col_of_minus = np.full(n_orig, -1, dtype=int)
    n_std = 0
    for i, sign in enumerate(problem._var_signs):
        col_of_plus[i] = n_std
        n_std += 1
        if sign == FREE:
            col_of_minus[i] = n_std
            n_std += 1

    m = problem.n_constraints
    A = np.zeros((m, n_std))
    b = np.array(problem._rhs, dtype=float)
    for r, row in enumerate(problem._rows):
        for i, coef in row.items():
            A[r, col_of_plus[i]] += coef
            if col_of_minus[i] >= 0:
                A[r, col_of_minus[i]] -= coef
    c = np.zeros(n_std)
    for i, coef in problem._objective.items():
        c[col_of_plus[i]] += coef
        if col_of_minus[i] >= 0:
            c[col_of_minus[i]] -= coef

    relations = list(problem._relations)

    if m == 0:
        # No constraints: bounded iff no improving direction exists.
        if (c < 0).any():
            return LpSolution(status="unbounded", objective=None, assignment=None)
        assignment = {n: 0.0 for n in problem.variable_names}
        return LpSolution(status="optimal", objective=0.0, assignment=assignment,
                          max_violation=0.0)

    total_iters = 0
    for safe_mode in (False, True):
        status, x_std, iters = _two_phase_simplex(A, b, c, relations, tol, safe=safe_mode)
        total_iters += iters
        if status == "corrupt":
            if safe_mode:
                raise LpInternalError(
                    "solver state degraded beyond recovery even in safe mode"
                )
            continue  # retry once with the slow, bulletproof pivot rule
        if status != "optimal":
            return LpSolution(status=status, objective=None, assignment=None,
                              iterations=total_iters)
        values = np.empty(n_orig)
        for i in range(n_orig):
            values[i] = x_std[col_of_plus[i]]
            if col_of_minus[i] >= 0:
                values[i] -= x_std[col_of_minus[i]]
        assignment = {n: float(v) for n, v in zip(problem.variable_names, values)}
        violation = constraint_violation(problem, assignment)
        scale = 1.0 + float(np.abs(b).max()) if b.size else 1.0
        if violation > 1e2 * tol.feasibility * scale and not safe_mode:
            continue  # numerically off; redo in safe mode
        objective = float(sum(coef * values[i] for i, coef in problem._objective.items()))
        return LpSolution(
            status="optimal",
            objective=objective,
            assignment=assignment,
            max_violation=violation,
            iterations=total_iters,
        )
    raise LpInternalError("safe-mode solve returned an infeasible optimum")


def _pow2_scale(values: np.ndarray) -> np.ndarray:
    """Per-entry power-of-two scale factors for max-norm equilibration."""
    scale = np.ones_like(values)
    positive = values > 0
    scale[positive] = np.exp2(np.round(np.log2(values[positive])))
    return scale


def _two_phase_simplex(
    A: np.ndarray,
    b: np.ndarray,
    c: np.ndarray,
    relations: list[str],
    tol: SolverTolerances,
    safe: bool = False,
) -> tuple[str, np.ndarray | None, int]:
    m, n = A.shape

    # Equilibrate: scale columns then rows by power-of-two max norms.
    col_scale = _pow2_scale(np.abs(A).max(axis=0))
    A = A / col_scale
    c_scaled = c / col_scale
    row_scale = _pow2_scale(np.maximum(np.abs(A).max(axis=1), np.abs(b)))
    A = A / row_scale[:, None]
    b = b / row_scale

    # Canonicalize every row to a*x <= rhs with rhs >= 0 where possible:
    # such rows take a slack variable that can seed the basis; only
    # equalities and rows infeasible at the origin need artificials.
    rows_catalog = []  # (coefficients, rhs, kind) with kind in slack|surplus|equality
    for r, rel in enumerate(relations):
        row, rhs = A[r], b[r]
        if rel == "==":
            if rhs < 0:
                row, rhs = -row, -rhs
            rows_catalog.append((row, rhs, "equality"))
            continue
        if rel == ">=":
            row, rhs = -row, -rhs
        if rhs >= 0:
            rows_catalog.append((row, rhs, "slack"))
        else:
            rows_catalog.append((-row, -rhs, "surplus"))

    n_slackish = sum(1 for _, _, kind in rows_catalog if kind != "equality")
    cols = n + n_slackish
    need_artificial = [i for i, (_, _, kind) in enumerate(rows_catalog)
                       if kind != "slack"]
    total = cols + len(need_artificial)

    full = np.zeros((m, total + 1))
    basis = np.full(m, -1, dtype=int)
    j = n
    k_art = cols
    for r, (row, rhs, kind) in enumerate(rows_catalog):
        full[r, :n] = row
        full[r, -1] = rhs
        if kind == "slack":
            full[r, j] = 1.0
            basis[r] = j
            j += 1
        elif kind == "surplus":
            full[r, j] = -1.0
            j += 1
            full[r, k_art] = 1.0
            basis[r] = k_art
            k_art += 1
        else:
            full[r, k_art] = 1.0
            basis[r] = k_art
            k_art += 1

    T = full.copy()
    iterations = 0
    if need_artificial:
        cost1 = np.zeros(total)
        cost1[cols:] = 1.0
        z = _reduced_costs(T, basis, cost1)
        status, iters = _iterate(T, basis, z, cost1, tol, full, phase1=True, safe=safe)
        iterations += iters
        if status == "corrupt":
            return "corrupt", None, iterations
        if status != "optimal":
            raise LpInternalError("phase 1 cannot be unbounded")
        phase1 = float(cost1[basis] @ T[:, -1])
        if phase1 > 1e2 * tol.feasibility:
            return "infeasible", None, iterations
        _expel_artificials(T, basis, cols, tol)
        keep = [r for r in range(m) if basis[r] < cols]
        if len(keep) < m:
            T = T[keep, :]
            full = full[keep, :]
            basis = basis[keep]
            m = len(keep)

    if need_artificial:
        # Artificials are out of the basis now; drop their columns entirely.
        T = np.concatenate([T[:, :cols], T[:, -1:]], axis=1)
        full = np.concatenate([full[:, :cols], full[:, -1:]], axis=1)
        total = cols

    cost2 = np.zeros(total)
    cost2[:n] = c_scaled
    z = _reduced_costs(T, basis, cost2)
    status, iters = _iterate(T, basis, z, cost2, tol, full, safe=safe)
    iterations += iters
    if status in ("unbounded", "corrupt"):
        return status, None, iterations

    x = np.zeros(total)
    x[basis] = T[:, -1]
    return "optimal", x[:n] / col_scale, iterations


def _reduced_costs(T: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> np.ndarray:
    z = cost.copy().astype(float)
    z = np.append(z, 0.0)
    for r, bc in enumerate(basis):
        if cost[bc] != 0.0:
            z -= cost[bc] * T[r]
    return z


def _expel_artificials(T: np.ndarray, basis: np.ndarray, n_real: int, tol: SolverTolerances) -> None:
    """Pivot zero-valued artificial variables out of the basis where possible."""
    for r in range(T.shape[0]):
        if basis[r] >= n_real:
            row = T[r, :n_real]
            candidates = np.nonzero(np.abs(row) > 1e3 * tol.pivot)[0]
            if candidates.size:
                _pivot(T, None, basis, r, int(candidates[0]))


def _pivot(T: np.ndarray, z: np.ndarray | None, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    if z is not None and z[col] != 0.0:
        z -= z[col] * T[row]
        z[col] = 0.0
    basis[row] = col


def _refactorize(T: np.ndarray, basis: np.ndarray, full: np.ndarray) -> bool:
    """Rebuild the tableau exactly from the original matrix for this basis."""
    try:
        T[:, :] = np.linalg.solve(full[:, basis], full)
    except np.linalg.LinAlgError:
        return False
    np.copyto(T[:, -1], np.where(np.abs(T[:, -1]) < 1e-12, 0.0, T[:, -1]))
    return True


def _ray_is_genuine(
    T: np.ndarray, basis: np.ndarray, full: np.ndarray, entering: int
) -> bool:
    """Check the claimed unbounded direction against the original matrix."""
    direction = np.zeros(full.shape[1] - 1)
    direction[entering] = 1.0
    direction[basis] -= T[:, entering]
    residual = full[:, :-1] @ direction
    scale = 1.0 + float(np.abs(full[:, :-1]).max())
    return bool(np.abs(residual).max() <= 1e-6 * scale)


def _iterate(
    T: np.ndarray,
    basis: np.ndarray,
    z: np.ndarray,
    cost: np.ndarray,
    tol: SolverTolerances,
    full: np.ndarray,
    phase1: bool = False,
    safe: bool = False,
) -> tuple[str, int]:
    m = T.shape[0]
    max_iterations = 200 * (m + T.shape[1]) + 20000
    element_tol = 1e-9    # smallest tableau entry treated as nonzero
    sound_pivot = 1e-6    # pivots below this trigger a defensive rebuild
    refresh_every = 25 if safe else 100  # bound round-off in degenerate runs
    stall = 0
    bland = False
    just_refreshed = False
    iterations = 0
    gamma = np.ones(T.shape[1] - 1)  # Devex reference weights
    objective = float(cost[basis] @ T[:, -1])
    while True:
        reduced = z[:-1]
        eligible = reduced < -tol.pivot
        if not eligible.any():
            return "optimal", iterations
        if bland:
            entering = int(np.nonzero(eligible)[0][0])
        else:
            # Devex pricing: best rate of improvement per reference weight.
            score = np.where(eligible, reduced * reduced / gamma, -np.inf)
            entering = int(np.argmax(score))

        column = T[:, entering]
        positive = column > element_tol
        if not positive.any():
            # Rebuild exactly before trusting an unbounded signal: stale
            # tableaus and reduced costs are the usual culprit.
            ok = _refactorize(T, basis, full)
            if ok:
                z[:] = _reduced_costs(T, basis, cost)
                column = T[:, entering]
                if z[entering] >= -tol.pivot or (column > element_tol).any():
                    continue
            if z[entering] < -1e-6:
                if not ok or phase1 or not _ray_is_genuine(T, basis, full, entering):
                    # A bounded program cannot do this; the basis degraded.
                    return "corrupt", iterations
                return "unbounded", iterations
            z[entering] = 0.0
            continue

        # Harris-style two-pass ratio test: bound the step with a small
        # feasibility slack, then take the best-conditioned pivot among the
        # rows that stay within it. Bland mode uses the exact test so its
        # anti-cycling guarantee stands.
        rhs = np.maximum(T[:, -1], 0.0)
        ratios = np.full(m, np.inf)
        ratios[positive] = rhs[positive] / column[positive]
        if bland:
            best = ratios.min()
            ties = np.nonzero(ratios <= best + 1e-9 * max(1.0, abs(best)))[0]
            leaving = int(ties[np.argmin(basis[ties])])
        else:
            relaxed = np.full(m, np.inf)
            relaxed[positive] = (rhs[positive] + tol.feasibility) / column[positive]
            theta = relaxed.min()
            admissible = np.nonzero(positive & (ratios <= theta))[0]
            leaving = int(admissible[np.argmax(column[admissible])])

        if column[leaving] < sound_pivot and not just_refreshed:
            # A near-zero pivot would wreck the basis conditioning; rebuild
            # first and only accept it if it survives exact arithmetic.
            if _refactorize(T, basis, full):
                z[:] = _reduced_costs(T, basis, cost)
                gamma[:] = 1.0
                just_refreshed = True
                continue

        pivot_element = float(column[leaving])
        gamma_entering = float(gamma[entering])
        _pivot(T, z, basis, leaving, entering)
        # Devex weight update from the normalized pivot row; reset the
        # reference framework once weights degrade.
        row = T[leaving, :-1]
        np.maximum(gamma, row * row * gamma_entering, out=gamma)
        gamma[entering] = max(gamma_entering / (pivot_element * pivot_element), 1.0)
        if not np.isfinite(gamma).all() or gamma.max() > 1e10:
            gamma[:] = 1.0
        just_refreshed = False
        iterations += 1
        new_objective = float(cost[basis] @ T[:, -1])
        if new_objective < objective - 1e-12 * (1 + abs(objective)):
            stall = 0
            bland = False
        else:
            stall += 1
            if stall > m + 20:
                bland = True
        objective = new_objective
        if iterations % refresh_every == 0:
            if not _refactorize(T, basis, full):
                return "corrupt", iterations
            z[:] = _reduced_costs(T, basis, cost)
        if iterations > max_iterations:
            raise LpInternalError("simplex iteration limit exceeded")
