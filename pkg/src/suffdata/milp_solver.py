"""Mixed-integer LP solving for the complementary-slackness systems.

The search itself is delegated to HiGHS branch-and-bound through
``scipy.optimize.milp``, run with zero optimality gaps so returned
objectives are exact up to LP tolerances. Binary coordinates of the
returned point are rounded to exact 0/1 (they are integral within 1e-6
by the solver's own tolerance).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from .errors import DimensionMismatch, NodeLimitExceeded, NumericalFailure

NODE_LIMIT = 1_000_000
INTEGRALITY_TOL = 1e-6


@dataclass(frozen=True)
class MilpProblem:
    """min objective'v subject to eq/ineq rows, box bounds, and
    v_i in {0,1} for i in binary_indices."""

    objective: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray
    binary_indices: tuple[int, ...] = ()
    eq_lhs: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    eq_rhs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ineq_lhs: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    ineq_rhs: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        obj = np.asarray(self.objective, dtype=float).ravel()
        lo = np.asarray(self.var_lower, dtype=float).ravel()
        hi = np.asarray(self.var_upper, dtype=float).ravel()
        n = obj.shape[0]
        if lo.shape[0] != n or hi.shape[0] != n:
            raise DimensionMismatch("bound vectors must match objective length")
        binaries = tuple(int(i) for i in self.binary_indices)
        for i in binaries:
            if not (0 <= i < n):
                raise DimensionMismatch(f"binary index {i} out of range")
            if lo[i] < -1e-12 or hi[i] > 1 + 1e-12:
                raise DimensionMismatch(f"binary variable {i} has bounds outside [0,1]")
        eq = np.asarray(self.eq_lhs, dtype=float)
        eq = eq.reshape(0, n) if eq.size == 0 else np.atleast_2d(eq)
        eq_r = np.asarray(self.eq_rhs, dtype=float).ravel()
        ineq = np.asarray(self.ineq_lhs, dtype=float)
        ineq = ineq.reshape(0, n) if ineq.size == 0 else np.atleast_2d(ineq)
        ineq_r = np.asarray(self.ineq_rhs, dtype=float).ravel()
        if eq.shape != (eq_r.shape[0], n) or ineq.shape != (ineq_r.shape[0], n):
            raise DimensionMismatch("constraint blocks inconsistent with variable count")
        object.__setattr__(self, "objective", obj)
        object.__setattr__(self, "var_lower", lo)
        object.__setattr__(self, "var_upper", hi)
        object.__setattr__(self, "binary_indices", binaries)
        object.__setattr__(self, "eq_lhs", eq)
        object.__setattr__(self, "eq_rhs", eq_r)
        object.__setattr__(self, "ineq_lhs", ineq)
        object.__setattr__(self, "ineq_rhs", ineq_r)

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True)
class MilpSolution:
    x: np.ndarray | None
    objective: float | None
    status: str  # 'optimal' | 'infeasible'


def lp_relaxation_bound(p: MilpProblem) -> float:
    """Optimal value of the root LP relaxation (binaries relaxed to [0,1])."""
    from scipy.optimize import linprog

    res = linprog(p.objective,
                  A_ub=p.ineq_lhs if p.ineq_lhs.size else None,
                  b_ub=p.ineq_rhs if p.ineq_rhs.size else None,
                  A_eq=p.eq_lhs if p.eq_lhs.size else None,
                  b_eq=p.eq_rhs if p.eq_rhs.size else None,
                  bounds=np.column_stack([p.var_lower, p.var_upper]),
                  method="highs")
    if res.status != 0:
        raise NumericalFailure(f"LP relaxation ended with status {res.status}")
    return float(res.fun)


def solve_milp(p: MilpProblem, *, node_limit: int = NODE_LIMIT,
               presolve: bool = True) -> MilpSolution:
    """Global optimum of the MILP, or status 'infeasible'.

    Deterministic for identical inputs; raises NodeLimitExceeded when
    the search tree passes ``node_limit`` nodes. HiGHS presolve can
    mis-handle rows with very small coefficients (the eps linking rows
    of complementary-slackness encodings): infeasibility claims are
    always re-verified with presolve off, and callers whose
    correctness rests on exact optimal values should pass
    ``presolve=False``.
    """
    constraints = []
    if p.eq_lhs.size:
        constraints.append(LinearConstraint(p.eq_lhs, p.eq_rhs, p.eq_rhs))
    if p.ineq_lhs.size:
        constraints.append(LinearConstraint(p.ineq_lhs, -np.inf, p.ineq_rhs))
    integrality = np.zeros(p.n_vars)
    integrality[list(p.binary_indices)] = 1

    def _run(use_presolve: bool):
        return milp(c=p.objective, constraints=constraints,
                    integrality=integrality,
                    bounds=Bounds(p.var_lower, p.var_upper),
                    options={"presolve": use_presolve, "node_limit": node_limit,
                             "mip_rel_gap": 0.0, "mip_abs_gap": 0.0})

    with warnings.catch_warnings():
        # mip_abs_gap is not in scipy's documented list but is passed through
        warnings.filterwarnings("ignore", message="Unrecognized options")
        res = _run(presolve)
        if res.status == 2 and presolve:
            res = _run(False)
    if res.status == 2:
        return MilpSolution(None, None, "infeasible")
    if res.status == 1 or (res.status == 4 and "limit" in (res.message or "").lower()):
        raise NodeLimitExceeded(f"node limit {node_limit} reached: {res.message}")
    if res.status != 0 or res.x is None:
        raise NumericalFailure(f"MILP solve failed: {res.message}")
    x = np.asarray(res.x, dtype=float)
    for i in p.binary_indices:
        if abs(x[i] - round(x[i])) > INTEGRALITY_TOL:
            raise NumericalFailure(f"binary variable {i} not integral: {x[i]}")
        x[i] = round(x[i])
    return MilpSolution(x, float(p.objective @ x), "optimal")
