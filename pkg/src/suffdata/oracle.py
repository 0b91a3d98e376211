"""Brute-force polytope geometry for small instances.

Vertices come from exhaustive basis enumeration, adjacency from the
rank of common tight constraints, and cone/face membership from small
feasibility LPs (solved with scipy's HiGHS so the oracle stays
independent of the package's own simplex). This module is the ground
truth the theorem-backed operations are validated against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .errors import BudgetExceeded, NumericalFailure
from .linalg import SpanBasis
from .model import FullSpace, StandardLP, UncertaintySet, project_to_original

BASIS_BUDGET = 2_000_000
VERTEX_DEDUP_TOL = 1e-7
ZERO_TOL = 1e-9


@dataclass(frozen=True)
class VertexCatalog:
    """All extreme points of a standard-form polytope plus the neighbor
    relation (pairs of vertices joined by an edge)."""

    vertices: np.ndarray          # V x n_total
    adjacency: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return self.vertices.shape[0]

    def neighbors_of(self, i: int) -> list[int]:
        out = []
        for a, b in self.adjacency:
            if a == i:
                out.append(b)
            elif b == i:
                out.append(a)
        return sorted(out)


@dataclass(frozen=True)
class ConeDescription:
    """Extreme directions of the feasible-direction cone at one vertex;
    the optimality cone is {c : c'delta >= 0 for all extreme delta}."""

    vertex_index: int
    extreme_directions: np.ndarray  # K x n_total, unit rows


def enumerate_vertices(lp: StandardLP, *, budget: int = BASIS_BUDGET) -> VertexCatalog:
    """All basic feasible solutions, deduplicated, with edge adjacency."""
    m, n = lp.m, lp.n_total
    if math.comb(n, m) > budget:
        raise BudgetExceeded(
            f"C({n},{m}) = {math.comb(n, m)} basis subsets exceed budget {budget}"
        )
    verts: list[np.ndarray] = []
    for cols in combinations(range(n), m):
        B = lp.A[:, cols]
        try:
            xb = np.linalg.solve(B, lp.b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(xb)):
            continue
        if np.max(np.abs(B @ xb - lp.b)) > 1e-8 * (1.0 + np.abs(lp.b).max(initial=0.0)):
            continue
        if np.any(xb < -1e-9):
            continue
        x = np.zeros(n)
        x[list(cols)] = np.maximum(xb, 0.0)
        if all(np.max(np.abs(x - v)) > VERTEX_DEDUP_TOL for v in verts):
            verts.append(x)
    vertices = np.array(verts) if verts else np.zeros((0, n))

    pairs: list[tuple[int, int]] = []
    for i, j in combinations(range(len(verts)), 2):
        if _is_edge(lp, vertices[i], vertices[j]):
            pairs.append((i, j))
    return VertexCatalog(vertices, tuple(pairs))


def _is_edge(lp: StandardLP, u: np.ndarray, v: np.ndarray) -> bool:
    """Minimal face containing u, v is 1-dimensional."""
    common_zero = (u <= ZERO_TOL) & (v <= ZERO_TOL)
    support = np.flatnonzero(~common_zero)
    rank = np.linalg.matrix_rank(lp.A[:, support], tol=1e-9)
    return support.size - rank == 1


def extreme_directions_at(catalog: VertexCatalog, lp: StandardLP,
                          vertex_index: int) -> ConeDescription:
    """Unit directions toward the vertex's polytope neighbors.

    For a bounded polytope these are exactly the extreme directions of
    the feasible-direction cone at the vertex.
    """
    x = catalog.vertices[vertex_index]
    dirs = []
    for j in catalog.neighbors_of(vertex_index):
        delta = catalog.vertices[j] - x
        dirs.append(delta / np.linalg.norm(delta))
    return ConeDescription(vertex_index,
                           np.array(dirs) if dirs else np.zeros((0, lp.n_total)))


def cone_contains(cone: ConeDescription, c, tol: float = 1e-9) -> bool:
    """True iff c'delta >= -tol for every extreme direction."""
    c = np.asarray(c, dtype=float).ravel()
    if cone.extreme_directions.size == 0:
        return True
    return bool(np.all(cone.extreme_directions @ c >= -tol))


def argmin_vertices(catalog: VertexCatalog, c) -> frozenset[int]:
    """Indices of catalog vertices attaining min c'x (standard-form c)."""
    c = np.asarray(c, dtype=float).ravel()
    values = catalog.vertices @ c
    best = values.min()
    return frozenset(np.flatnonzero(values <= best + 1e-8 * (1.0 + abs(best))).tolist())


def _face_lp_feasible(C: UncertaintySet, eq_extra, eq_extra_rhs,
                      ineq_extra, ineq_extra_rhs, sigma: float) -> bool:
    """Feasibility of {c in C : extra equalities and inequalities on c}."""
    lifted = C.lifted(sigma)
    n = lifted.n_vars
    d = lifted.dim

    def widen(M):
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if M.size == 0:
            return np.zeros((0, n))
        out = np.zeros((M.shape[0], n))
        out[:, :d] = M
        return out

    A_ub = np.vstack([lifted.ineq_G, -widen(ineq_extra)])
    b_ub = np.concatenate([lifted.ineq_h, -np.asarray(ineq_extra_rhs, dtype=float).ravel()])
    A_eq = np.vstack([lifted.eq_A, widen(eq_extra)])
    b_eq = np.concatenate([lifted.eq_b, np.asarray(eq_extra_rhs, dtype=float).ravel()])
    res = linprog(np.zeros(n),
                  A_ub=A_ub if A_ub.size else None,
                  b_ub=b_ub if b_ub.size else None,
                  A_eq=A_eq if A_eq.size else None,
                  b_eq=b_eq if b_eq.size else None,
                  bounds=np.column_stack([lifted.var_lower, lifted.var_upper]),
                  method="highs")
    if res.status == 0:
        return True
    if res.status == 2:
        return False
    raise NumericalFailure(f"face feasibility LP ended with status {res.status}")


def relevant_extreme_directions(lp: StandardLP, C: UncertaintySet,
                                *, catalog: VertexCatalog | None = None,
                                sigma: float = 0.0,
                                budget: int = BASIS_BUDGET) -> np.ndarray:
    """Original-coordinate extreme directions whose perpendicular cone
    face meets C, deduplicated up to sign and scale."""
    if catalog is None:
        catalog = enumerate_vertices(lp, budget=budget)
    found: list[np.ndarray] = []
    for vi in range(catalog.size):
        cone = extreme_directions_at(catalog, lp, vi)
        if cone.extreme_directions.size == 0:
            continue
        dirs_orig = cone.extreme_directions[:, : lp.n_original]
        for k, delta in enumerate(cone.extreme_directions):
            # {c in C : c'delta = 0, c'delta' >= 0 for all delta' at vi}
            if not _face_lp_feasible(C, dirs_orig[k][None, :], [0.0],
                                     dirs_orig, np.zeros(dirs_orig.shape[0]),
                                     sigma):
                continue
            cand = delta[: lp.n_original]
            nrm = np.linalg.norm(cand)
            if nrm <= ZERO_TOL:
                continue
            cand = cand / nrm
            ref = np.flatnonzero(np.abs(cand) > 1e-9)
            if ref.size and cand[ref[0]] < 0:
                cand = -cand
            if all(np.max(np.abs(cand - seen)) > VERTEX_DEDUP_TOL for seen in found):
                found.append(cand)
    return np.array(found) if found else np.zeros((0, lp.n_original))


def reachable_vertices(lp: StandardLP, C: UncertaintySet,
                       *, catalog: VertexCatalog | None = None,
                       sigma: float = 0.0,
                       budget: int = BASIS_BUDGET) -> frozenset[int]:
    """Vertices optimal for at least one c in C (optimality cone meets C)."""
    if catalog is None:
        catalog = enumerate_vertices(lp, budget=budget)
    reachable = []
    for vi in range(catalog.size):
        cone = extreme_directions_at(catalog, lp, vi)
        dirs_orig = cone.extreme_directions[:, : lp.n_original]
        if _face_lp_feasible(C, np.zeros((0, lp.n_original)), np.zeros(0),
                             dirs_orig, np.zeros(dirs_orig.shape[0]), sigma):
            reachable.append(vi)
    return frozenset(reachable)


def reachable_direction_span(lp: StandardLP, C: UncertaintySet,
                             *, catalog: VertexCatalog | None = None,
                             sigma: float = 0.0,
                             budget: int = BASIS_BUDGET) -> SpanBasis:
    """Span of original-coordinate differences of reachable vertices."""
    if catalog is None:
        catalog = enumerate_vertices(lp, budget=budget)
    reach = sorted(reachable_vertices(lp, C, catalog=catalog, sigma=sigma))
    basis = SpanBasis.empty(lp.n_original)
    if not reach:
        return basis
    x0 = catalog.vertices[reach[0], : lp.n_original]
    diffs = [catalog.vertices[i, : lp.n_original] - x0 for i in reach[1:]]
    return SpanBasis.from_vectors(np.array(diffs)) if diffs else basis


def compute_F0(lp: StandardLP) -> SpanBasis:
    """Span of standard-form unit vectors e_i with max x_i > 0 over X."""
    achievable = []
    for i in range(lp.n_total):
        c = np.zeros(lp.n_total)
        c[i] = -1.0
        res = linprog(c, A_eq=lp.A, b_eq=lp.b, bounds=(0, None), method="highs")
        if res.status != 0:
            raise NumericalFailure(f"F0 LP for coordinate {i} ended with status {res.status}")
        if -res.fun > 1e-8:
            achievable.append(i)
    vectors = np.zeros((len(achievable), lp.n_total))
    vectors[np.arange(len(achievable)), achievable] = 1.0
    return SpanBasis(vectors, vectors) if achievable else SpanBasis.empty(lp.n_total)


def f0_coordinate_mask(lp: StandardLP) -> np.ndarray:
    """Boolean mask of standard coordinates achievable with x_i > 0."""
    basis = compute_F0(lp)
    mask = np.zeros(lp.n_total, dtype=bool)
    for v in basis.vectors:
        mask[int(np.argmax(np.abs(v)))] = True
    return mask
