"""Dataset sufficiency checks and minimal query selection.

A dataset is sufficient exactly when its span contains the reachable
direction space; with no prior knowledge the reachable direction space
degenerates to the kernel of the constraint matrix restricted to the
coordinates that can be active, so that case has its own check. Query
selection keeps the basis queries carrying a nonzero coordinate of some
direction vector in query coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import lp_solver, oracle
from .directions import CostSampler, DirectionBasis
from .errors import DimensionMismatch, IllConditionedQueryBasis, SamplingFailure
from .linalg import (
    SpanBasis,
    in_span,
    intersect_with_coordinate_span,
    project_onto_complement,
)
from .model import Dataset, StandardLP, UncertaintySet, embed_cost

COND_LIMIT = 1e8
TOL_SELECT = 1e-8


@dataclass(frozen=True)
class QueryBasis:
    """Allowed queries as the columns of an invertible matrix."""

    Q: np.ndarray
    inverse: np.ndarray = None

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if Q.shape[0] != Q.shape[1]:
            raise DimensionMismatch("query basis must be square")
        cond = float(np.linalg.cond(Q))
        if not np.isfinite(cond) or cond >= COND_LIMIT:
            raise IllConditionedQueryBasis(f"condition estimate {cond:.3e} >= 1e8")
        inv = np.linalg.inv(Q)
        if np.max(np.abs(inv @ Q - np.eye(Q.shape[0]))) > 1e-8:
            raise IllConditionedQueryBasis("inverse check failed at 1e-8")
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "inverse", inv)

    @classmethod
    def canonical(cls, dim: int) -> "QueryBasis":
        return cls(np.eye(dim))

    @property
    def dimension(self) -> int:
        return self.Q.shape[0]


def _query_span(dataset: Dataset) -> SpanBasis:
    if dataset.size == 0:
        return SpanBasis.empty(dataset.dimension)
    return SpanBasis.from_vectors(dataset.queries)


def is_sufficient(dataset: Dataset, dirs: DirectionBasis) -> bool:
    """True iff every direction-basis vector lies in span(queries)."""
    if dirs.basis.dim == 0:
        return True
    if dataset.dimension != dirs.dimension and dataset.size > 0:
        raise DimensionMismatch(
            f"queries have dimension {dataset.dimension}, directions {dirs.dimension}"
        )
    span = _query_span(dataset) if dataset.size else SpanBasis.empty(dirs.dimension)
    return all(in_span(span, v) for v in dirs.basis.vectors)


def unspanned_direction(dataset: Dataset, dirs: DirectionBasis) -> np.ndarray | None:
    """Residual of the first direction vector outside span(queries)."""
    span = _query_span(dataset) if dataset.size else SpanBasis.empty(dirs.dimension)
    for v in dirs.basis.vectors:
        if not in_span(span, v):
            r = project_onto_complement(span, v)
            return r / np.linalg.norm(r)
    return None


def unrestricted_direction_span(lp: StandardLP) -> SpanBasis:
    """Original-coordinate span of ker A intersected with the active
    coordinate space (the direction space reachable with no prior)."""
    mask = oracle.f0_coordinate_mask(lp)
    inter = intersect_with_coordinate_span(lp.A, mask)
    if inter.dim == 0:
        return SpanBasis.empty(lp.n_original)
    return SpanBasis.from_vectors(inter.vectors[:, : lp.n_original])


def is_sufficient_unrestricted(dataset: Dataset, lp: StandardLP) -> bool:
    """Sufficiency for C = R^d: span containment of the kernel/active
    intersection, projected to original coordinates."""
    target = unrestricted_direction_span(lp)
    if target.dim == 0:
        return True
    span = _query_span(dataset) if dataset.size else SpanBasis.empty(lp.n_original)
    return all(in_span(span, v) for v in target.vectors)


def selected_indices(dirs: DirectionBasis, qb: QueryBasis) -> list[int]:
    """Indices i with |(Q^{-1} v_j)_i| > 1e-8 * ||Q^{-1} v_j||_inf for
    some raw direction vector v_j."""
    if qb.dimension != dirs.dimension:
        raise DimensionMismatch(
            f"query basis dimension {qb.dimension}, directions {dirs.dimension}"
        )
    chosen: set[int] = set()
    for v in dirs.basis.source_vectors:
        w = qb.inverse @ v
        scale = float(np.abs(w).max(initial=0.0))
        if scale == 0.0:
            continue
        chosen.update(np.flatnonzero(np.abs(w) > TOL_SELECT * scale).tolist())
    return sorted(chosen)


def select_queries(dirs: DirectionBasis, qb: QueryBasis) -> Dataset:
    """Minimal sufficient dataset inside a query basis.

    Keeps query q_i exactly when coordinate i of some raw direction
    vector, expressed in query coordinates, is nonzero (above
    ``1e-8 * ||Q^{-1} v||_inf``).
    """
    idx = selected_indices(dirs, qb)
    if not idx:
        return Dataset.empty(qb.dimension)
    return Dataset(qb.Q[:, idx].T, labels=tuple(f"q{i}" for i in idx))


@dataclass(frozen=True)
class MonteCarloResult:
    passed: bool
    trials_run: int
    counterexample: tuple[np.ndarray, np.ndarray] | None = None


def monte_carlo_sufficiency_check(dataset: Dataset, lp: StandardLP,
                                  C: UncertaintySet, trials: int, seed: int,
                                  *, catalog: oracle.VertexCatalog | None = None
                                  ) -> MonteCarloResult:
    """Sampled falsification of the projection criterion.

    Per trial: sample c in C, find a second admissible c' with the same
    observations (equal products against every query) pushed as far as
    possible along a random unobserved direction, and compare the full
    optimal vertex sets. Any argmin mismatch is a counterexample to
    sufficiency.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    d = lp.n_original
    if dataset.size and dataset.dimension != d:
        raise DimensionMismatch("dataset dimension does not match the LP")
    if catalog is None:
        catalog = oracle.enumerate_vertices(lp)
    try:
        sampler = CostSampler(C)
    except Exception as exc:  # noqa: BLE001 - surfaced as the spec'd error
        raise SamplingFailure(f"cannot sample the uncertainty set: {exc}") from exc

    span = _query_span(dataset) if dataset.size else SpanBasis.empty(d)
    rng = np.random.default_rng(seed)
    lifted = C.lifted()
    G, h, A_eq, b_eq = lifted.as_rows()

    for trial in range(trials):
        c = sampler.sample(rng)
        if span.dim >= d:
            continue  # slice is a single point; nothing to perturb
        w = rng.standard_normal(d)
        w = project_onto_complement(span, w)
        nw = np.linalg.norm(w)
        if nw < 1e-12:
            continue
        w /= nw
        # maximize w'c' over {c' in C : q'c' = q'c for all queries}
        slice_eq = np.zeros((dataset.size, lifted.n_vars))
        slice_rhs = np.zeros(dataset.size)
        if dataset.size:
            slice_eq[:, :d] = dataset.queries
            slice_rhs = dataset.queries @ c
        cost = np.zeros(lifted.n_vars)
        cost[:d] = -w
        status, v, _ = lp_solver.solve_general(
            cost, G, h,
            np.vstack([A_eq, slice_eq]) if A_eq.size or slice_eq.size else None,
            np.concatenate([b_eq, slice_rhs]),
        )
        if status != "optimal":
            continue
        c_alt = v[:d]
        same = oracle.argmin_vertices(catalog, embed_cost(c, lp)) == \
            oracle.argmin_vertices(catalog, embed_cost(c_alt, lp))
        if not same:
            return MonteCarloResult(False, trial + 1, (c, c_alt))
    return MonteCarloResult(True, trials, None)
