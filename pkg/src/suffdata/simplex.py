"""Primal simplex over standard-form arrays: min c'x s.t. Ax = b, x >= 0.

Phase 1 uses explicit artificial variables; both phases pivot with
Bland's rule (lowest eligible index enters, lowest-index variable leaves
among ratio ties), which guarantees termination and makes every solve
deterministic. The basis is refactorized with an LU decomposition at
each pivot; at the dense sizes this package targets that is cheaper
than getting clever.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"


@dataclass
class SimplexResult:
    status: str
    x: np.ndarray | None = None
    objective: float | None = None
    basis: list[int] | None = None
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    iterations: int = 0


def _pivot_loop(A, b, c, basis, max_iter, opt_tol):
    """Run Bland pivots from a feasible basis; returns (status, basis, iters)."""
    m, n = A.shape
    iters = 0
    while iters < max_iter:
        B = A[:, basis]
        lu = lu_factor(B)
        xb = lu_solve(lu, b)
        lam = lu_solve(lu, c[basis], trans=1)
        s = c - A.T @ lam
        s[basis] = 0.0

        candidates = np.flatnonzero(s < -opt_tol)
        if candidates.size == 0:
            return OPTIMAL, basis, iters
        entering = int(candidates[0])

        w = lu_solve(lu, A[:, entering])
        pos = w > PIVOT_TOL
        if not np.any(pos):
            return UNBOUNDED, basis, iters

        ratios = np.full(m, np.inf)
        ratios[pos] = np.maximum(xb[pos], 0.0) / w[pos]
        theta = ratios.min()
        # Bland leaving rule: among ratio ties, lowest variable index.
        ties = np.flatnonzero(ratios <= theta + 1e-12)
        leave_pos = int(min(ties, key=lambda i: basis[i]))
        basis[leave_pos] = entering
        iters += 1
    return ITERATION_LIMIT, basis, iters


def _solution_from_basis(A, b, c, basis):
    m, n = A.shape
    B = A[:, basis]
    lu = lu_factor(B)
    xb = lu_solve(lu, b)
    x = np.zeros(n)
    x[basis] = xb
    lam = lu_solve(lu, c[basis], trans=1)
    s = c - A.T @ lam
    s[basis] = 0.0
    return x, float(c @ x), lam, s


def solve_standard_form(A, b, c, *, max_iter: int | None = None,
                        feas_tol: float = FEAS_TOL) -> SimplexResult:
    """Solve min c'x, Ax = b, x >= 0 to a basic optimal solution.

    ``A`` must have full row rank. Rows with negative ``b`` are flipped
    before phase 1. The iteration cap defaults to ``10 * n * m`` per
    phase.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    m, n = A.shape
    if b.shape[0] != m or c.shape[0] != n:
        raise ValueError("inconsistent simplex dimensions")
    if max_iter is None:
        max_iter = 10 * max(n, 1) * max(m, 1)
    if m == 0:
        # no constraints: min over x >= 0 is 0 at x = 0 when c >= 0
        if np.any(c < -feas_tol):
            return SimplexResult(UNBOUNDED)
        return SimplexResult(OPTIMAL, np.zeros(n), 0.0, [], np.zeros(0), c.copy())

    flip = b < 0
    A1 = A.copy()
    A1[flip] *= -1.0
    b1 = b.copy()
    b1[flip] *= -1.0

    # Phase 1: artificial variables form the starting identity basis.
    A_art = np.hstack([A1, np.eye(m)])
    c_art = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))
    status, basis, it1 = _pivot_loop(A_art, b1, c_art, basis, max_iter, feas_tol)
    if status == ITERATION_LIMIT:
        return SimplexResult(ITERATION_LIMIT, iterations=it1)
    x1, obj1, _, _ = _solution_from_basis(A_art, b1, c_art, basis)
    if obj1 > feas_tol * (1.0 + float(np.abs(b1).sum())):
        return SimplexResult(INFEASIBLE, iterations=it1)

    # Drive zero-level artificials out of the basis.
    for pos in range(m):
        if basis[pos] < n:
            continue
        lu = lu_factor(A_art[:, basis])
        e = np.zeros(m)
        e[pos] = 1.0
        y = lu_solve(lu, e, trans=1)
        row = y @ A1  # pivot-row entries of B^{-1} A1
        in_basis = np.zeros(n, dtype=bool)
        in_basis[[k for k in basis if k < n]] = True
        usable = np.flatnonzero((np.abs(row) > 1e-7) & ~in_basis)
        if usable.size == 0:
            raise np.linalg.LinAlgError(
                "artificial variable stuck in basis: A does not have full row rank"
            )
        basis[pos] = int(usable[0])

    # Phase 2 on the original columns.
    status, basis, it2 = _pivot_loop(A1, b1, c, basis, max_iter, feas_tol)
    if status == ITERATION_LIMIT:
        return SimplexResult(ITERATION_LIMIT, iterations=it1 + it2)
    if status == UNBOUNDED:
        return SimplexResult(UNBOUNDED, iterations=it1 + it2)
    x, obj, lam, s = _solution_from_basis(A1, b1, c, basis)
    lam_out = lam.copy()
    lam_out[flip] *= -1.0
    return SimplexResult(OPTIMAL, x, obj, sorted(basis), lam_out, s, it1 + it2)


def feasible_point(A, b, *, feas_tol: float = FEAS_TOL) -> np.ndarray | None:
    """A basic feasible point of {x >= 0 : Ax = b}, or None if empty."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    res = solve_standard_form(A, b, np.zeros(n), feas_tol=feas_tol)
    if res.status == OPTIMAL:
        return res.x
    if res.status == INFEASIBLE:
        return None
    raise np.linalg.LinAlgError(f"phase 1 ended with status {res.status}")
