"""Iterative construction of the reachable-optima direction space.

Each iteration looks for an LP solution, optimal for some admissible
cost vector, whose difference from the anchor solution leaves the
current span. Candidates are first sought by sampling cost vectors and
solving plain LPs (cheap, and any hit certifiably grows the span);
exhaustion is certified by a pair of complementary-slackness MILPs
whose optimal values vanish exactly when no direction is left. A
MILP-found point is re-polished by an LP with its binary pattern fixed,
so recorded directions are exact vertex differences rather than
tolerance-level MILP output.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from . import lp_solver
from .errors import ConfigError, NonTermination, NumericalFailure
from .linalg import SpanBasis, extend_basis, project_onto_complement
from .milp_solver import MilpProblem, solve_milp
from .model import AffineFactor, HPolyhedron, LiftedPolyhedron, StandardLP, UncertaintySet
from .model import embed_cost, project_to_original

DUAL_BOUND_SCALE = 1e3
DEFAULT_TOL_ZERO = 1e-7
DEFAULT_ALPHA_REDRAWS = 3
HEURISTIC_SAMPLES = 8


@dataclass(frozen=True)
class CsMilpConfig:
    """Constants of the complementary-slackness linearization.

    ``eps`` must satisfy eps <= 1/max(m_primal, m_dual) so the linking
    inequalities 1 - eps*s_i >= tau_i >= eps*x_i encode x_i * s_i = 0
    inside the boxes.
    """

    eps: float
    m_primal: float
    m_dual: float
    m_lambda: float
    tol_zero: float = DEFAULT_TOL_ZERO
    max_alpha_redraws: int = DEFAULT_ALPHA_REDRAWS

    def __post_init__(self):
        for name in ("eps", "m_primal", "m_dual", "m_lambda", "tol_zero"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.eps > 1.0 / max(self.m_primal, self.m_dual) + 1e-15:
            raise ConfigError(
                "eps violates eps <= 1/max(m_primal, m_dual); "
                "the tau linking constraints would not encode complementarity"
            )
        if self.max_alpha_redraws < 0:
            raise ConfigError("max_alpha_redraws must be nonnegative")


DUAL_PROBE_COUNT = 8
DUAL_PROBE_MARGIN = 64.0


def _probe_dual_magnitude(lp: StandardLP, C: UncertaintySet) -> float:
    """Largest dual or reduced-cost magnitude over LPs at the center of
    C and a deterministic sample of admissible cost vectors."""
    sampler = CostSampler(C)
    rng = np.random.default_rng(0)
    points = [C.center_point()] + [sampler.sample(rng) for _ in range(DUAL_PROBE_COUNT)]
    mag = 0.0
    for c in points:
        c_std = embed_cost(c, lp)
        res = linprog(c_std, A_eq=lp.A, b_eq=lp.b, bounds=(0, None), method="highs")
        if res.status != 0:
            raise NumericalFailure(f"dual probe LP ended with status {res.status}")
        lam = np.asarray(res.eqlin.marginals, dtype=float)
        s = c_std - lp.A.T @ lam
        mag = max(mag, float(np.abs(lam).max(initial=0.0)),
                  float(np.abs(s).max(initial=0.0)))
    return mag


def default_config(lp: StandardLP, C: UncertaintySet,
                   *, dual_scale: float = DUAL_BOUND_SCALE,
                   tol_zero: float = DEFAULT_TOL_ZERO,
                   max_alpha_redraws: int = DEFAULT_ALPHA_REDRAWS,
                   m_primal: float | None = None) -> CsMilpConfig:
    """Config with m_primal from per-coordinate LP maxima over X and
    dual boxes sized from probed dual magnitudes.

    The dual box must cover some certificate for every reachable
    optimum, but a box much wider than needed makes eps so small that
    the linking rows drown in solver tolerances. By default the box is
    a 64x margin over the largest dual seen at probe cost vectors,
    floored at 16x the data magnitudes; passing ``dual_scale``
    explicitly overrides the probe and uses dual_scale times the data
    magnitudes directly.
    """
    if m_primal is None:
        m_primal = 0.0
        for i in range(lp.n_total):
            c = np.zeros(lp.n_total)
            c[i] = -1.0
            res = linprog(c, A_eq=lp.A, b_eq=lp.b, bounds=(0, None), method="highs")
            if res.status != 0:
                raise NumericalFailure(
                    f"coordinate bound LP {i} ended with status {res.status}")
            m_primal = max(m_primal, -res.fun)
        m_primal = max(m_primal, 1.0)
    scale = max(C.inf_norm, float(np.abs(lp.A).max()), 1.0)
    if dual_scale != DUAL_BOUND_SCALE:
        m_dual = m_lambda = dual_scale * scale
    else:
        probe = _probe_dual_magnitude(lp, C)
        m_dual = m_lambda = max(DUAL_PROBE_MARGIN * probe, 16.0 * scale)
    eps = 1.0 / (2.0 * max(m_primal, m_dual))
    return CsMilpConfig(eps, m_primal, m_dual, m_lambda,
                        tol_zero=tol_zero, max_alpha_redraws=max_alpha_redraws)


@dataclass(frozen=True)
class DirectionBasis:
    """Span of differences of reachable optimal solutions, in original
    decision coordinates, anchored at the optimum for one admissible
    cost vector. Raw difference vectors live in ``basis.source_vectors``."""

    anchor_x0: np.ndarray
    basis: SpanBasis
    iterations: int
    seed: int

    @property
    def dimension(self) -> int:
        return self.basis.ambient_dim


@dataclass(frozen=True)
class CsEncoding:
    """Variable layout and constraint blocks of the CS system.

    Variables are ordered (x, lambda, s, lifted-C, tau); ``lifted``'s
    first ``d`` coordinates are the cost vector c.
    """

    lp: StandardLP
    lifted: LiftedPolyhedron
    cfg: CsMilpConfig
    n_vars: int
    off_x: int
    off_lam: int
    off_s: int
    off_lift: int
    off_tau: int
    eq_lhs: np.ndarray
    eq_rhs: np.ndarray
    ineq_lhs: np.ndarray
    ineq_rhs: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray
    binary_indices: tuple[int, ...]

    def x_of(self, v: np.ndarray) -> np.ndarray:
        return v[self.off_x:self.off_x + self.lp.n_total]

    def cost_of(self, v: np.ndarray) -> np.ndarray:
        return v[self.off_lift:self.off_lift + self.lp.n_original]

    def tau_of(self, v: np.ndarray) -> np.ndarray:
        return v[self.off_tau:self.off_tau + self.lp.n_total]


def build_cs_encoding(lp: StandardLP, C: UncertaintySet, cfg: CsMilpConfig) -> CsEncoding:
    n, m, d = lp.n_total, lp.m, lp.n_original
    lifted = C.lifted()
    nl = lifted.n_vars
    off_x, off_lam, off_s, off_lift, off_tau = 0, n, n + m, 2 * n + m, 2 * n + m + nl
    N = 2 * n + m + nl + n

    n_eq = m + n + lifted.eq_A.shape[0]
    eq = np.zeros((n_eq, N))
    eq_rhs = np.zeros(n_eq)
    eq[:m, off_x:off_x + n] = lp.A
    eq_rhs[:m] = lp.b
    # A'lam + s = embedded c  (slack coordinates carry zero cost)
    eq[m:m + n, off_lam:off_lam + m] = lp.A.T
    eq[m + np.arange(n), off_s + np.arange(n)] = 1.0
    eq[m + np.arange(d), off_lift + np.arange(d)] = -1.0
    if lifted.eq_A.shape[0]:
        eq[m + n:, off_lift:off_lift + nl] = lifted.eq_A
        eq_rhs[m + n:] = lifted.eq_b

    n_ineq = 2 * n + lifted.ineq_G.shape[0]
    G = np.zeros((n_ineq, N))
    g_rhs = np.zeros(n_ineq)
    # eps*x_i - tau_i <= 0   and   eps*s_i + tau_i <= 1
    G[np.arange(n), off_x + np.arange(n)] = cfg.eps
    G[np.arange(n), off_tau + np.arange(n)] = -1.0
    G[n + np.arange(n), off_s + np.arange(n)] = cfg.eps
    G[n + np.arange(n), off_tau + np.arange(n)] = 1.0
    g_rhs[n:2 * n] = 1.0
    if lifted.ineq_G.shape[0]:
        G[2 * n:, off_lift:off_lift + nl] = lifted.ineq_G
        g_rhs[2 * n:] = lifted.ineq_h

    lo = np.concatenate([np.zeros(n), np.full(m, -cfg.m_lambda), np.zeros(n),
                         lifted.var_lower, np.zeros(n)])
    hi = np.concatenate([np.full(n, cfg.m_primal), np.full(m, cfg.m_lambda),
                         np.full(n, cfg.m_dual), lifted.var_upper, np.ones(n)])
    binaries = tuple(range(off_tau, off_tau + n))
    return CsEncoding(lp, lifted, cfg, N, off_x, off_lam, off_s, off_lift, off_tau,
                      eq, eq_rhs, G, g_rhs, lo, hi, binaries)


def milp_for_objective(enc: CsEncoding, objective: np.ndarray) -> MilpProblem:
    return MilpProblem(objective, enc.var_lower, enc.var_upper, enc.binary_indices,
                       enc.eq_lhs, enc.eq_rhs, enc.ineq_lhs, enc.ineq_rhs)


def build_cs_milp(lp: StandardLP, C: UncertaintySet, objective_dir, anchor,
                  span_basis: SpanBasis, cfg: CsMilpConfig, sense: str,
                  *, encoding: CsEncoding | None = None) -> MilpProblem:
    """MILP whose optimum is min/max of gamma'(anchor - x_original) over
    pairs (x, c) with x optimal for c in C, where gamma is the objective
    direction projected onto the complement of ``span_basis``.

    The constant gamma'anchor is not part of the returned problem's
    linear objective; evaluate candidate values as
    gamma'(anchor - x_original) on the solution.
    """
    if sense not in ("min", "max"):
        raise ConfigError(f"sense must be 'min' or 'max', got {sense!r}")
    if encoding is None:
        encoding = build_cs_encoding(lp, C, cfg)
    gamma = project_onto_complement(span_basis, np.asarray(objective_dir, dtype=float))
    obj = np.zeros(encoding.n_vars)
    sign = -1.0 if sense == "min" else 1.0
    obj[encoding.off_x:encoding.off_x + lp.n_original] = sign * gamma
    return milp_for_objective(encoding, obj)


def _polish_with_pattern(enc: CsEncoding, objective: np.ndarray,
                         tau: np.ndarray) -> np.ndarray | None:
    """Re-solve the continuous part exactly with the binary pattern fixed.

    tau_i = 0 pins x_i = 0, tau_i = 1 pins s_i = 0; the tau linking rows
    then hold automatically and are dropped.
    """
    n = enc.lp.n_total
    lo = enc.var_lower.copy()
    hi = enc.var_upper.copy()
    for i in range(n):
        if tau[i] < 0.5:
            hi[enc.off_x + i] = 0.0
        else:
            hi[enc.off_s + i] = 0.0
        lo[enc.off_tau + i] = hi[enc.off_tau + i] = tau[i]
    extra = enc.ineq_lhs[2 * n:]
    extra_rhs = enc.ineq_rhs[2 * n:]
    res = linprog(objective,
                  A_ub=extra if extra.size else None,
                  b_ub=extra_rhs if extra.size else None,
                  A_eq=enc.eq_lhs, b_eq=enc.eq_rhs,
                  bounds=np.column_stack([lo, hi]),
                  method="highs")
    if res.status != 0:
        return None
    return np.asarray(res.x, dtype=float)


def _optimal_face_point(lp: StandardLP, c: np.ndarray,
                        obj_x: np.ndarray) -> np.ndarray | None:
    """Extremize ``obj_x`` over the optimal face of min c'x on X."""
    c_std = embed_cost(c, lp)
    first = linprog(c_std, A_eq=lp.A, b_eq=lp.b, bounds=(0, None), method="highs")
    if first.status != 0:
        return None
    cap = first.fun + 1e-9 * (1.0 + abs(first.fun))
    second = linprog(obj_x, A_ub=c_std[None, :], b_ub=[cap],
                     A_eq=lp.A, b_eq=lp.b, bounds=(0, None), method="highs")
    if second.status != 0:
        return None
    return np.asarray(second.x, dtype=float)


def _exact_cs_optimum(enc: CsEncoding, objective: np.ndarray):
    """Solve the CS MILP to optimality and certify its point.

    Returns (x_std, c, raw_value) where raw_value is the MILP's optimal
    linear objective (a bound that is exact up to solver tolerance) and
    (x_std, c) is a certified pair: the binary pattern is re-solved as
    an exact LP, falling back to the optimal face of the LP at the
    returned cost vector when the pattern itself is not exactly
    feasible. Presolve stays off: a silently wrong optimum here would
    end the direction search early, and HiGHS presolve is not
    trustworthy on the eps linking rows.
    """
    sol = solve_milp(milp_for_objective(enc, objective), presolve=False)
    if sol.status != "optimal":
        raise NumericalFailure("complementary-slackness MILP reported infeasible")
    polished = _polish_with_pattern(enc, objective, enc.tau_of(sol.x))
    if polished is not None:
        return enc.x_of(polished).copy(), enc.cost_of(polished).copy(), sol.objective
    c_found = enc.cost_of(sol.x).copy()
    n = enc.lp.n_total
    repaired = _optimal_face_point(enc.lp, c_found,
                                   objective[enc.off_x:enc.off_x + n])
    if repaired is None:
        raise NumericalFailure(
            "could not certify a reachable optimum from the MILP solution"
        )
    return repaired, c_found, sol.objective


class CostSampler:
    """Deterministic sampler of points of a bounded uncertainty set."""

    def __init__(self, C: UncertaintySet):
        self.C = C
        rep = C.representation
        if isinstance(rep, AffineFactor):
            self._mode = "affine"
        else:
            self._mode = "hpoly"
            self._center = lp_solver.find_point(rep.G, rep.h)
            self._G = rep.G
            self._h = rep.h

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        rep = self.C.representation
        if self._mode == "affine":
            alpha = rng.uniform(rep.alpha_lower, rep.alpha_upper)
            eps = rng.uniform(-rep.eta, rep.eta, self.C.dimension) if rep.eta > 0 \
                else np.zeros(self.C.dimension)
            return rep.phi.T @ alpha + eps
        u = rng.standard_normal(self.C.dimension)
        nu = np.linalg.norm(u)
        if nu == 0:
            return self._center.copy()
        u /= nu
        steps = self._G @ u
        slack = self._h - self._G @ self._center
        pos = steps > 1e-12
        t_max = float(np.min(slack[pos] / steps[pos])) if np.any(pos) else 0.0
        return self._center + rng.uniform(0.0, 0.95 * max(t_max, 0.0)) * u

    def sample_extreme(self, rng: np.random.Generator) -> np.ndarray:
        """A random extreme point of C; new reachable optima tend to sit
        under extreme cost vectors, so these make strong probes."""
        rep = self.C.representation
        d = self.C.dimension
        if self._mode == "affine":
            pick = rng.uniform(size=rep.alpha_lower.shape[0]) < 0.5
            alpha = np.where(pick, rep.alpha_lower, rep.alpha_upper)
            eps = np.where(rng.uniform(size=d) < 0.5, -rep.eta, rep.eta) \
                if rep.eta > 0 else np.zeros(d)
            return rep.phi.T @ alpha + eps
        u = rng.standard_normal(d)
        res = linprog(-u, A_ub=self._G, b_ub=self._h,
                      bounds=[(None, None)] * d, method="highs")
        if res.status != 0:
            return self.sample(rng)
        return np.asarray(res.x, dtype=float)

    def tilted(self, direction: np.ndarray) -> np.ndarray:
        """The cost vector of C minimizing direction'c: the admissible
        cost most anti-aligned with ``direction``. Its LP optimum is a
        strong candidate for extremizing direction'x over reachable
        optima."""
        rep = self.C.representation
        if self._mode == "affine":
            fd = rep.phi @ direction
            alpha = np.where(fd > 0, rep.alpha_lower, rep.alpha_upper)
            eps = -rep.eta * np.sign(direction) if rep.eta > 0 \
                else np.zeros(self.C.dimension)
            return rep.phi.T @ alpha + eps
        res = linprog(direction, A_ub=self._G, b_ub=self._h,
                      bounds=[(None, None)] * self.C.dimension, method="highs")
        if res.status != 0:
            return self._center.copy()
        return np.asarray(res.x, dtype=float)


def _certified_lp_vertex(lp: StandardLP, c_std: np.ndarray) -> np.ndarray | None:
    """LP optimum with a verified dual certificate, or None."""
    res = linprog(c_std, A_eq=lp.A, b_eq=lp.b, bounds=(0, None), method="highs")
    if res.status != 0 or res.x is None:
        return None
    x = np.asarray(res.x, dtype=float)
    lam = np.asarray(res.eqlin.marginals, dtype=float)
    s = c_std - lp.A.T @ lam
    scale = 1.0 + float(np.abs(c_std).max(initial=0.0))
    if np.min(s) < -1e-7 * scale:
        return None
    if np.max(np.abs(lp.A @ x - lp.b)) > 1e-7 * (1.0 + np.abs(lp.b).max(initial=0.0)):
        return None
    gap = abs(float(c_std @ x) - float(lp.b @ lam))
    if gap > 1e-7 * (1.0 + abs(float(c_std @ x))):
        return None
    return x


def compute_dir_basis(lp: StandardLP, C: UncertaintySet,
                      cfg: CsMilpConfig | None = None, seed: int = 0,
                      *, heuristic_samples: int = HEURISTIC_SAMPLES,
                      warm_start: DirectionBasis | None = None) -> DirectionBasis:
    """Basis of the span of reachable-optimum differences (original
    coordinates), grown one certified direction per iteration.

    The anchor is the LP optimum at the center point of C. Growth
    candidates come from sampled cost vectors when possible; each
    termination claim is certified by solving the min and max CS MILPs
    (redrawing the random objective direction up to
    ``cfg.max_alpha_redraws`` times when both values vanish).

    ``warm_start`` may carry a DirectionBasis computed for a SUBSET of
    C with the same anchor (e.g. a smaller noise level of the same
    task); its raw vectors are reachable differences here too and seed
    the basis without re-certification. A warm start with a different
    anchor is ignored.
    """
    if cfg is None:
        cfg = default_config(lp, C)
    rng = np.random.default_rng(seed)
    d = lp.n_original

    sampler = CostSampler(C)
    c0 = C.center_point()
    x0 = lp_solver.solve_lp(lp, embed_cost(c0, lp))
    anchor = project_to_original(x0.x, lp)
    gate = cfg.tol_zero * (1.0 + float(np.abs(anchor).max(initial=0.0)))

    encoding = build_cs_encoding(lp, C, cfg)
    basis = SpanBasis.empty(d)
    iterations = 0
    if warm_start is not None and \
            float(np.abs(warm_start.anchor_x0 - anchor).max(initial=0.0)) <= 1e-9:
        for v in warm_start.basis.source_vectors:
            extended = extend_basis(basis, v)
            if extended is not None:
                basis = extended
                iterations += 1

    pending: list[np.ndarray] = []  # certified reachable differences to retry
    while basis.dim < d:
        grown = False
        for _ in range(cfg.max_alpha_redraws + 1):
            alpha = rng.standard_normal(d)
            gamma = project_onto_complement(basis, alpha)

            # cheap candidates: leftovers from earlier passes, then optima
            # at sampled cost vectors (extreme and interior alternating)
            candidates = pending
            pending = []
            probes = [sampler.tilted(gamma), sampler.tilted(-gamma)]
            probes += [sampler.sample_extreme(rng) if k % 2 == 0
                       else sampler.sample(rng)
                       for k in range(heuristic_samples)]
            for c_try in probes:
                x_try = _certified_lp_vertex(lp, embed_cost(c_try, lp))
                if x_try is not None:
                    candidates.append(project_to_original(x_try, lp) - anchor)
            for pos, v in enumerate(candidates):
                if abs(float(gamma @ v)) <= gate:
                    pending.append(v)  # certified; may pass a later gate
                    continue
                extended = extend_basis(basis, v)
                if extended is None:
                    continue  # spanned for good
                basis = extended
                grown = True
                pending.extend(candidates[pos + 1:])
                break
            pending = pending[-64:]
            if grown:
                break

            # exact certification: max then min of gamma'(anchor - x)
            for sense_sign in (1.0, -1.0):
                obj = np.zeros(encoding.n_vars)
                obj[encoding.off_x:encoding.off_x + d] = sense_sign * gamma
                x_std, _c_opt, raw_obj = _exact_cs_optimum(encoding, obj)
                v = project_to_original(x_std, lp) - anchor
                value = -float(gamma @ v)
                # optimal value of gamma'(anchor - x) straight from the MILP,
                # valid even if the certified point fell short of it
                value_raw = float(gamma @ anchor) - (raw_obj if sense_sign > 0
                                                     else -raw_obj)
                if abs(value) > gate:
                    extended = extend_basis(basis, v)
                    if extended is None:
                        raise NonTermination(
                            f"MILP value {value:.3e} exceeds tolerance but its "
                            "direction is already spanned"
                        )
                    basis = extended
                    grown = True
                    break
                if abs(value_raw) > gate:
                    raise NumericalFailure(
                        f"MILP bound {value_raw:.3e} exceeds tolerance but no "
                        "certified reachable point attains it; solver tolerances "
                        "are too loose for the configured boxes"
                    )
            if grown:
                break
        if not grown:
            break
        iterations += 1

    return DirectionBasis(anchor, basis, iterations, seed)
