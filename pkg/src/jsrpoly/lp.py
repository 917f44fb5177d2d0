"""Small dense linear programs: generic solve plus the absco membership test.

The membership test encodes x in absco(V) = co{V, -V} through the exact
l1 reformulation: split the coefficients c = c+ - c-, both nonnegative,
and minimize sum(c+ + c-) subject to V(c+ - c-) = x.  The optimum t* is
the Minkowski gauge of x in absco(V): x is inside iff t* <= 1, and it is
treated as *interior* only when t* <= 1 - delta_int.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

DEFAULT_FEAS_TOL = 1e-10
MEMBERSHIP_FEAS_TOL = 1e-9  # near-degenerate hulls exceed the solver's 1e-10 floor
DEFAULT_INTERIOR_MARGIN = 1e-8
# the solver's own defaults (1e-7) are far looser than the absorb decisions need
_HIGHS_OPTS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}

LEQ = "<="
EQ = "=="


class LpSolverError(RuntimeError):
    pass


@dataclass
class LpProblem:
    """maximize objective @ x subject to the listed constraints.

    constraints: (coefficients, relation, rhs) with relation "<=" or "==".
    bounds: per-variable (lo, hi), None meaning unbounded on that side.
    """

    objective: np.ndarray
    constraints: list = field(default_factory=list)
    bounds: list | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=float)
        n = self.objective.size
        for coeffs, rel, _rhs in self.constraints:
            if np.asarray(coeffs).size != n:
                raise ValueError("constraint length mismatch")
            if rel not in (LEQ, EQ):
                raise ValueError(f"unknown relation {rel!r}")


@dataclass
class LpSolution:
    status: str  # Optimal | Infeasible | Unbounded
    values: np.ndarray | None
    objective_value: float | None


def solve(problem: LpProblem, delta_feas: float = DEFAULT_FEAS_TOL) -> LpSolution:
    """Deterministic solve (HiGHS); Optimal solutions are re-checked to delta_feas."""
    n = problem.objective.size
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for coeffs, rel, rhs in problem.constraints:
        (a_ub if rel == LEQ else a_eq).append(np.asarray(coeffs, dtype=float))
        (b_ub if rel == LEQ else b_eq).append(float(rhs))
    bounds = problem.bounds if problem.bounds is not None else [(None, None)] * n
    res = linprog(
        -problem.objective,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=bounds,
        method="highs",
        options=_HIGHS_OPTS,
    )
    if res.status == 2:
        return LpSolution("Infeasible", None, None)
    if res.status == 3:
        return LpSolution("Unbounded", None, None)
    if res.status != 0:
        raise LpSolverError(f"linprog failed: status={res.status} {res.message}")
    x = np.asarray(res.x)
    _check_feasible(problem, x, delta_feas)
    return LpSolution("Optimal", x, float(problem.objective @ x))


def _check_feasible(problem: LpProblem, x: np.ndarray, delta_feas: float) -> None:
    scale = max(1.0, float(np.max(np.abs(x))))
    for coeffs, rel, rhs in problem.constraints:
        lhs = float(np.asarray(coeffs, dtype=float) @ x)
        gap = lhs - float(rhs)
        if rel == LEQ and gap > delta_feas * scale:
            raise LpSolverError(f"returned point violates <= constraint by {gap:.3e}")
        if rel == EQ and abs(gap) > delta_feas * scale:
            raise LpSolverError(f"returned point violates == constraint by {gap:.3e}")
    if problem.bounds is not None:
        for xi, (lo, hi) in zip(x, problem.bounds):
            if lo is not None and xi < lo - delta_feas * scale:
                raise LpSolverError("returned point violates a lower bound")
            if hi is not None and xi > hi + delta_feas * scale:
                raise LpSolverError("returned point violates an upper bound")


def absco_membership(
    vertices,
    x: np.ndarray,
    delta_feas: float = MEMBERSHIP_FEAS_TOL,
    delta_int: float = DEFAULT_INTERIOR_MARGIN,
) -> tuple[float, bool]:
    """Minkowski gauge of x in absco(vertices) and the strict-interior flag.

    Returns (t_star, interior): t_star = min sum|c_i| with sum c_i v_i = x
    (inf when x is off the span), interior = t_star <= 1 - delta_int.
    delta_feas stays an order below the delta_int decision margin, so the
    solver's equality residual cannot flip an absorb decision.
    """
    cols = np.column_stack([np.asarray(v, dtype=float) for v in vertices]) \
        if not isinstance(vertices, np.ndarray) else np.asarray(vertices, dtype=float)
    if cols.ndim != 2:
        cols = cols.reshape(len(x), -1)
    d, n = cols.shape
    x = np.asarray(x, dtype=float)
    if np.all(x == 0.0):
        return 0.0, True
    a_eq = np.hstack([cols, -cols])
    res = linprog(
        np.ones(2 * n),
        A_eq=a_eq,
        b_eq=x,
        bounds=(0, None),
        method="highs",
        options=_HIGHS_OPTS,
    )
    if res.status == 2:
        return float("inf"), False
    if res.status != 0:
        raise LpSolverError(f"membership LP failed: status={res.status} {res.message}")
    resid = np.max(np.abs(a_eq @ res.x - x))
    if resid > delta_feas * max(1.0, float(np.max(np.abs(x)))):
        raise LpSolverError(f"membership LP equality residual {resid:.3e}")
    t_star = float(res.fun)
    return t_star, t_star <= 1.0 - delta_int
