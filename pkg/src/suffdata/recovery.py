"""Decision recovery from observed query values.

The fitted cost vector minimizes the squared observation misfit over
the uncertainty set. Noiseless observations are handled by a direct
feasibility route (some admissible cost matches the observations
exactly, so the minimum is zero and an LP finds it at machine
precision); otherwise a primal active-set method solves the convex
quadratic program to its exact KKT point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from .errors import ConvergenceFailure, DimensionMismatch, Infeasible
from .lp_solver import max_slack_point_highs, solve_lp
from .model import (
    Dataset,
    ObservationVector,
    StandardLP,
    UncertaintySet,
    embed_cost,
    project_to_original,
)

KKT_TOL = 1e-9


@dataclass(frozen=True)
class RecoveryResult:
    c_hat: np.ndarray
    decision: np.ndarray
    residual: float
    objective_at_c_hat: float


def _project_onto_equalities(v: np.ndarray, E: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Least-norm correction making E v = rhs hold to machine precision."""
    if E.shape[0] == 0:
        return v
    delta, *_ = np.linalg.lstsq(E, E @ v - rhs, rcond=None)
    return v - delta


def _lsq_active_set(Qm, o, G, h, E, f, v0, *, max_iter=None):
    """min ||Qm v - o||^2 s.t. G v <= h, E v = f, from feasible v0.

    Primal active set with least-norm equality-constrained subproblems;
    ties in the ratio test and in multiplier dropping break by lowest
    row index. Terminates at a verified KKT point or raises
    ConvergenceFailure at the iteration cap.
    """
    n = v0.shape[0]
    if max_iter is None:
        max_iter = 50 * (n + G.shape[0] + 1)
    v = v0.copy()
    active: list[int] = []
    me = E.shape[0]
    for _ in range(max_iter):
        Ew = np.vstack([E, G[active]]) if active else E
        fw = np.concatenate([f, h[active]]) if active else f
        if Ew.shape[0]:
            step_p, *_ = np.linalg.lstsq(Ew, fw - Ew @ v, rcond=None)
            u_p = v + step_p
            Z = null_space(Ew)
        else:
            u_p = v
            Z = np.eye(n)
        if Z.shape[1]:
            t, *_ = np.linalg.lstsq(Qm @ Z, o - Qm @ u_p, rcond=None)
            u_star = u_p + Z @ t
        else:
            u_star = u_p
        p = u_star - v

        if np.linalg.norm(p) <= 1e-11 * (1.0 + np.linalg.norm(v)):
            grad = 2.0 * Qm.T @ (Qm @ v - o)
            gscale = 1.0 + float(np.linalg.norm(grad))
            if not active and me == 0:
                if np.linalg.norm(grad) <= KKT_TOL * gscale:
                    return v
                raise ConvergenceFailure("zero step with nonzero unconstrained gradient")
            M = (np.vstack([E, G[active]]) if active else E).T
            mul, *_ = np.linalg.lstsq(M, -grad, rcond=None)
            kkt_res = float(np.linalg.norm(M @ mul + grad))
            lam = mul[me:]
            if kkt_res <= KKT_TOL * gscale and (lam.size == 0 or lam.min() >= -KKT_TOL * gscale):
                return v
            if lam.size and lam.min() < -KKT_TOL * gscale:
                worst = float(lam.min())
                drop = min(i for i, l in zip(active, lam) if l <= worst + 1e-12)
                active.remove(drop)
                continue
            raise ConvergenceFailure(f"stationary point with KKT residual {kkt_res:.3e}")

        Gp = G @ p
        slack = h - G @ v
        a = 1.0
        blocker = None
        for i in range(G.shape[0]):
            if i in active or Gp[i] <= 1e-12:
                continue
            ai = max(slack[i], 0.0) / Gp[i]
            if ai < a - 1e-12:
                a = ai
                blocker = i
        v = v + a * p
        if blocker is not None:
            active.append(blocker)
            active.sort()
    raise ConvergenceFailure("active-set iteration cap exceeded")


def fit_c_hat(dataset: Dataset, obs: ObservationVector, C: UncertaintySet) -> np.ndarray:
    """Global minimizer of sum_i (c'q_i - o_i)^2 over c in C.

    When some admissible cost reproduces the observations exactly the
    zero-residual slice is located by LP and a max-slack point of it is
    returned; otherwise the quadratic program is solved by the active
    set method.
    """
    obs.check_against(dataset)
    d = C.dimension
    if dataset.size and dataset.dimension != d:
        raise DimensionMismatch("dataset dimension does not match the uncertainty set")
    lifted = C.lifted()
    G, h, A_eq, b_eq = lifted.as_rows()
    if dataset.size == 0:
        v = max_slack_point_highs(G, h, A_eq if A_eq.size else None,
                                  b_eq if A_eq.size else None)
        return v[:d]

    slice_eq = np.zeros((dataset.size, lifted.n_vars))
    slice_eq[:, :d] = dataset.queries
    E_all = np.vstack([A_eq, slice_eq])
    rhs_all = np.concatenate([b_eq, obs.values])
    try:
        v = max_slack_point_highs(G, h, E_all, rhs_all)
        return _project_onto_equalities(v, E_all, rhs_all)[:d]
    except Infeasible:
        pass

    # noisy route: exact convex QP over the lifted polyhedron
    Qm = slice_eq
    v0 = max_slack_point_highs(G, h, A_eq if A_eq.size else None,
                               b_eq if A_eq.size else None)
    v = _lsq_active_set(Qm, obs.values, G, h, A_eq, b_eq, v0)
    return v[:d]


def recover_decision(dataset: Dataset, obs: ObservationVector,
                     lp: StandardLP, C: UncertaintySet) -> RecoveryResult:
    """Fit an admissible cost to the observations and solve the LP at it."""
    c_hat = fit_c_hat(dataset, obs, C)
    sol = solve_lp(lp, embed_cost(c_hat, lp))
    residual = float(np.linalg.norm(dataset.queries @ c_hat - obs.values)) \
        if dataset.size else 0.0
    return RecoveryResult(c_hat, project_to_original(sol.x, lp),
                          residual, sol.objective)


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of the empirical noise-tolerance probe."""

    kappa_hat: float
    first_failure_index: int | None
    optimal_flags: tuple[bool, ...]


def noise_threshold_probe(dataset: Dataset, lp: StandardLP, C: UncertaintySet,
                          true_c, noise_direction, grid) -> ProbeResult:
    """Largest tested noise magnitude that still recovers an optimal
    decision for ``true_c``.

    Observations are perturbed by magnitude * noise_direction for each
    grid magnitude (ascending); recovery is optimal when the recovered
    decision's objective at the true cost matches the true optimum
    within 1e-7 relative. Reporting is monotone: kappa is the last
    magnitude before the first failure, with no extrapolation past the
    grid.
    """
    true_c = np.asarray(true_c, dtype=float).ravel()
    u = np.asarray(noise_direction, dtype=float).ravel()
    if u.shape[0] != dataset.size:
        raise DimensionMismatch(
            f"noise direction has length {u.shape[0]}, dataset has {dataset.size} queries"
        )
    norm_u = float(np.linalg.norm(u))
    if norm_u > 0:
        u = u / norm_u
    grid = [float(g) for g in grid]
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise ValueError("grid magnitudes must be nondecreasing")

    base = dataset.queries @ true_c
    opt = solve_lp(lp, embed_cost(true_c, lp)).objective
    tol = 1e-7 * (1.0 + abs(opt))

    flags: list[bool] = []
    for mu in grid:
        obs = ObservationVector(base + mu * u)
        rec = recover_decision(dataset, obs, lp, C)
        flags.append(bool(float(true_c @ rec.decision) <= opt + tol))
    first_fail = next((i for i, ok in enumerate(flags) if not ok), None)
    if first_fail is None:
        kappa = grid[-1] if grid else 0.0
    elif first_fail == 0:
        kappa = 0.0
    else:
        kappa = grid[first_fail - 1]
    return ProbeResult(kappa, first_fail, tuple(flags))
