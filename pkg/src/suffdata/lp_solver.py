"""Vertex LP solves and feasibility helpers built on the simplex core.

``solve_lp`` returns a basic optimal solution with dual multipliers and
reduced costs; ``find_point`` returns the max-min-slack point of a
general inequality polyhedron (a Chebyshev-style interior point when
the interior is nonempty).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import simplex
from .errors import DimensionMismatch, Infeasible, NumericalFailure, UnboundedModel
from .model import StandardLP


@dataclass(frozen=True)
class VertexSolution:
    """Basic optimal solution of min c'x over {x >= 0 : Ax = b}.

    ``duals`` are the equality multipliers lambda and ``reduced_costs``
    is s = c - A'lambda; complementary slackness x_i * s_i = 0 holds at
    return up to solver tolerance.
    """

    x: np.ndarray
    objective: float
    basis_indices: tuple[int, ...]
    duals: np.ndarray
    reduced_costs: np.ndarray


def solve_lp(lp: StandardLP, c) -> VertexSolution:
    """Deterministic primal simplex; ``c`` must be standard-form length."""
    c = np.asarray(c, dtype=float).ravel()
    if c.shape[0] != lp.n_total:
        raise DimensionMismatch(
            f"cost has dimension {c.shape[0]}, expected {lp.n_total}"
        )
    res = simplex.solve_standard_form(lp.A, lp.b, c)
    if res.status == simplex.ITERATION_LIMIT:
        raise NumericalFailure("simplex hit its iteration cap before certifying optimality")
    if res.status == simplex.INFEASIBLE:
        raise Infeasible("standard-form polyhedron is empty")
    if res.status == simplex.UNBOUNDED:
        raise UnboundedModel("LP is unbounded; StandardLP invariants violated")
    return VertexSolution(res.x, res.objective, tuple(res.basis),
                          res.duals, res.reduced_costs)


def solve_general(c, G=None, h=None, eq_lhs=None, eq_rhs=None,
                  *, feas_tol: float = simplex.FEAS_TOL):
    """min c'v s.t. G v <= h, eq_lhs v = eq_rhs over free variables.

    Returns (status, v, objective) with status one of the simplex status
    strings. Free variables are split into positive parts internally.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = c.shape[0]
    G = np.zeros((0, n)) if G is None else np.atleast_2d(np.asarray(G, dtype=float))
    h = np.zeros(0) if h is None else np.asarray(h, dtype=float).ravel()
    E = np.zeros((0, n)) if eq_lhs is None else np.atleast_2d(np.asarray(eq_lhs, dtype=float))
    f = np.zeros(0) if eq_rhs is None else np.asarray(eq_rhs, dtype=float).ravel()
    if G.shape[0] != h.shape[0] or E.shape[0] != f.shape[0]:
        raise DimensionMismatch("constraint matrix/rhs row counts differ")
    if (G.size and G.shape[1] != n) or (E.size and E.shape[1] != n):
        raise DimensionMismatch("constraint column counts differ from objective")

    k, me = G.shape[0], E.shape[0]
    # columns: v+ (n), v- (n), slack (k)
    A = np.zeros((me + k, 2 * n + k))
    bb = np.concatenate([f, h])
    if me:
        A[:me, :n] = E
        A[:me, n:2 * n] = -E
    if k:
        A[me:, :n] = G
        A[me:, n:2 * n] = -G
        A[me:, 2 * n:] = np.eye(k)
    cc = np.concatenate([c, -c, np.zeros(k)])
    res = simplex.solve_standard_form(A, bb, cc)
    if res.status != simplex.OPTIMAL:
        return res.status, None, None
    v = res.x[:n] - res.x[n:2 * n]
    return simplex.OPTIMAL, v, float(c @ v)


def find_point(G, h, *, eq_lhs=None, eq_rhs=None,
               feas_tol: float = 1e-9) -> np.ndarray:
    """Max-min-slack point of {v : Gv <= h} (optionally with equalities).

    Maximizes t subject to Gv + t <= h row-wise; t > 0 certifies a
    nonempty interior, t = 0 returns a boundary point, and a negative
    optimum means the polyhedron is empty. The polyhedron must be
    bounded for the max-slack LP to be bounded.
    """
    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).ravel()
    if G.shape[0] != h.shape[0]:
        raise DimensionMismatch("G and h row counts differ")
    n = G.shape[1]
    Gt = np.hstack([G, np.ones((G.shape[0], 1))])
    Et = None
    if eq_lhs is not None:
        E = np.atleast_2d(np.asarray(eq_lhs, dtype=float))
        Et = np.hstack([E, np.zeros((E.shape[0], 1))])
    cost = np.zeros(n + 1)
    cost[-1] = -1.0  # maximize t
    status, vt, _ = solve_general(cost, Gt, h, Et, eq_rhs, feas_tol=feas_tol)
    if status == simplex.INFEASIBLE:
        raise Infeasible("polyhedron is empty")
    if status != simplex.OPTIMAL:
        raise NumericalFailure(f"max-slack LP ended with status {status}")
    v, t = vt[:n], vt[-1]
    if t < -feas_tol:
        raise Infeasible("polyhedron is empty (negative max slack)")
    return v


def max_slack_point_highs(G, h, eq_lhs=None, eq_rhs=None,
                          *, feas_tol: float = 1e-9) -> np.ndarray:
    """Same contract as ``find_point`` but solved with scipy's HiGHS.

    Used on lifted uncertainty-set polyhedra, which are too large for
    the dense teaching simplex to be worth running.
    """
    from scipy.optimize import linprog

    G = np.atleast_2d(np.asarray(G, dtype=float))
    h = np.asarray(h, dtype=float).ravel()
    n = G.shape[1]
    Gt = np.hstack([G, np.ones((G.shape[0], 1))])
    A_eq = b_eq = None
    if eq_lhs is not None and np.asarray(eq_lhs).size:
        E = np.atleast_2d(np.asarray(eq_lhs, dtype=float))
        A_eq = np.hstack([E, np.zeros((E.shape[0], 1))])
        b_eq = np.asarray(eq_rhs, dtype=float).ravel()
    cost = np.zeros(n + 1)
    cost[-1] = -1.0
    res = linprog(cost, A_ub=Gt, b_ub=h, A_eq=A_eq, b_eq=b_eq,
                  bounds=(None, None), method="highs")
    if res.status == 2:
        raise Infeasible("polyhedron is empty")
    if res.status != 0:
        raise NumericalFailure(f"max-slack LP ended with status {res.status}")
    v, t = res.x[:n], res.x[-1]
    if t < -feas_tol:
        raise Infeasible("polyhedron is empty (negative max slack)")
    return np.asarray(v, dtype=float)
