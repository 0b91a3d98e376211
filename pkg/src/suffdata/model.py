"""Problem data types: decision polyhedra, uncertainty sets, datasets.

A ``GeneralLP`` describes the decision set in inequality form with box
bounds; ``standardize`` converts it to equality form over nonnegative
variables while keeping track of which standard-form coordinates carry
the original decision variables. Cost vectors always live in the
original d-dimensional space; slack coordinates carry zero cost.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import simplex
from .errors import (
    DimensionMismatch,
    Infeasible,
    InfeasibleModel,
    ParseError,
    UnboundedModel,
)

_RANK_TOL = 1e-9


def _as_matrix(x, ncols: int | None = None) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.size == 0:
        return a.reshape(0, ncols if ncols is not None else (a.shape[-1] if a.ndim == 2 else 0))
    return np.atleast_2d(a)


@dataclass(frozen=True)
class GeneralLP:
    """Decision polyhedron {x : ineq_lhs x <= ineq_rhs, eq_lhs x = eq_rhs,
    lower_bounds <= x <= upper_bounds}.

    Construction verifies dimensional consistency, nonemptiness, and
    boundedness. Lower bounds must be nonnegative so that the original
    coordinates embed one-to-one into standard-form coordinates with
    x >= 0; upper bounds may be +inf only where the constraints already
    bound the coordinate (checked with a per-coordinate LP).
    """

    n_vars: int
    ineq_lhs: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    ineq_rhs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    eq_lhs: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    eq_rhs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lower_bounds: np.ndarray | None = None
    upper_bounds: np.ndarray | None = None

    def __post_init__(self):
        d = int(self.n_vars)
        if d <= 0:
            raise DimensionMismatch("n_vars must be positive")
        object.__setattr__(self, "n_vars", d)
        ineq = _as_matrix(self.ineq_lhs, d)
        ineq_r = np.asarray(self.ineq_rhs, dtype=float).ravel()
        eq = _as_matrix(self.eq_lhs, d)
        eq_r = np.asarray(self.eq_rhs, dtype=float).ravel()
        lb = (np.zeros(d) if self.lower_bounds is None
              else np.asarray(self.lower_bounds, dtype=float).ravel())
        ub = (np.full(d, np.inf) if self.upper_bounds is None
              else np.asarray(self.upper_bounds, dtype=float).ravel())
        if ineq.shape[1] != d or eq.shape[1] != d:
            raise DimensionMismatch("constraint matrices must have n_vars columns")
        if ineq.shape[0] != ineq_r.shape[0] or eq.shape[0] != eq_r.shape[0]:
            raise DimensionMismatch("constraint matrix/rhs row counts differ")
        if lb.shape[0] != d or ub.shape[0] != d:
            raise DimensionMismatch("bound vectors must have length n_vars")
        if np.any(~np.isfinite(lb)) or np.any(lb < 0):
            raise DimensionMismatch("lower bounds must be finite and nonnegative")
        if np.any(ub < lb):
            raise InfeasibleModel("some upper bound lies below its lower bound")
        for name, arr in (("ineq_lhs", ineq), ("ineq_rhs", ineq_r),
                          ("eq_lhs", eq), ("eq_rhs", eq_r)):
            if not np.all(np.isfinite(arr)):
                raise DimensionMismatch(f"{name} contains non-finite entries")
        object.__setattr__(self, "ineq_lhs", ineq)
        object.__setattr__(self, "ineq_rhs", ineq_r)
        object.__setattr__(self, "eq_lhs", eq)
        object.__setattr__(self, "eq_rhs", eq_r)
        object.__setattr__(self, "lower_bounds", lb)
        object.__setattr__(self, "upper_bounds", ub)
        _validate_region(self)


@dataclass(frozen=True)
class StandardLP:
    """Polyhedron {x >= 0 : Ax = b} with rank(A) = m.

    The first ``n_original`` coordinates are the original decision
    variables (``embedding[i]`` is the standard-form column of original
    coordinate i, always the identity map here); the rest are slacks.
    """

    A: np.ndarray
    b: np.ndarray
    n_original: int
    embedding: np.ndarray = field(default=None)

    def __post_init__(self):
        A = _as_matrix(self.A)
        b = np.asarray(self.b, dtype=float).ravel()
        if A.shape[0] != b.shape[0]:
            raise DimensionMismatch("A and b row counts differ")
        if not (0 < self.n_original <= A.shape[1]):
            raise DimensionMismatch("n_original out of range")
        emb = (np.arange(self.n_original) if self.embedding is None
               else np.asarray(self.embedding, dtype=int).ravel())
        if emb.shape[0] != self.n_original or np.any(emb != np.arange(self.n_original)):
            raise DimensionMismatch("embedding must map original coordinate i to column i")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "embedding", emb)

    @property
    def m(self) -> int:
        return self.A.shape[0]

    @property
    def n_total(self) -> int:
        return self.A.shape[1]


def _drop_redundant_eq_rows(eq, eq_r):
    """Remove equality rows dependent on earlier ones; raise on inconsistency."""
    if eq.shape[0] == 0:
        return eq, eq_r
    tol = _RANK_TOL * max(1.0, float(np.abs(eq).max()))
    aug = np.hstack([eq, eq_r[:, None]])
    work = aug.copy()
    keep: list[int] = []
    row = 0
    for i in range(aug.shape[0]):
        if np.abs(work[i, :-1]).max() <= tol:
            if abs(work[i, -1]) > _RANK_TOL * max(1.0, float(np.abs(eq_r).max())):
                raise InfeasibleModel("inconsistent equality constraints")
            continue
        keep.append(i)
        piv = int(np.argmax(np.abs(work[i, :-1])))
        work[i] /= work[i, piv]
        below = np.arange(i + 1, aug.shape[0])
        if below.size:
            work[below] -= np.outer(work[below, piv], work[i])
        row += 1
    return eq[keep], eq_r[keep]


def standardize(g: GeneralLP) -> StandardLP:
    """Convert ``g`` to standard form {x >= 0 : Ax = b}.

    Every inequality row, strictly positive lower bound, and finite
    upper bound gets its own slack column, so each feasible point of
    ``g`` has a unique slack completion. Row order: equalities,
    inequalities, lower-bound rows, upper-bound rows.
    """
    d = g.n_vars
    eq, eq_r = _drop_redundant_eq_rows(g.eq_lhs, g.eq_rhs)

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    for a, beta in zip(g.ineq_lhs, g.ineq_rhs):
        rows.append(a)
        rhs.append(beta)
    for i in range(d):
        if g.lower_bounds[i] > 0:
            r = np.zeros(d)
            r[i] = -1.0
            rows.append(r)
            rhs.append(-g.lower_bounds[i])
    for i in range(d):
        if np.isfinite(g.upper_bounds[i]):
            r = np.zeros(d)
            r[i] = 1.0
            rows.append(r)
            rhs.append(g.upper_bounds[i])

    n_slack = len(rows)
    m = eq.shape[0] + n_slack
    n_total = d + n_slack
    A = np.zeros((m, n_total))
    b = np.zeros(m)
    A[: eq.shape[0], :d] = eq
    b[: eq.shape[0]] = eq_r
    for k, (a, beta) in enumerate(zip(rows, rhs)):
        A[eq.shape[0] + k, :d] = a
        A[eq.shape[0] + k, d + k] = 1.0
        b[eq.shape[0] + k] = beta
    return StandardLP(A, b, d)


def _validate_region(g: GeneralLP) -> None:
    lp = standardize(g)
    if simplex.feasible_point(lp.A, lp.b) is None:
        raise InfeasibleModel("the decision polyhedron is empty")
    # Coordinates without a finite upper bound must still be bounded by
    # the other constraints; certify with a per-coordinate max LP.
    for i in np.flatnonzero(~np.isfinite(g.upper_bounds)):
        c = np.zeros(lp.n_total)
        c[i] = -1.0
        res = simplex.solve_standard_form(lp.A, lp.b, c)
        if res.status == simplex.UNBOUNDED:
            raise UnboundedModel(f"coordinate {i} is unbounded above")
        if res.status != simplex.OPTIMAL:
            raise UnboundedModel(f"boundedness check failed for coordinate {i}: {res.status}")


def embed_cost(c, lp: StandardLP) -> np.ndarray:
    """Zero-pad an original-coordinate cost vector to standard form."""
    c = np.asarray(c, dtype=float).ravel()
    if c.shape[0] != lp.n_original:
        raise DimensionMismatch(
            f"cost has dimension {c.shape[0]}, expected {lp.n_original}"
        )
    out = np.zeros(lp.n_total)
    out[: lp.n_original] = c
    return out


def project_to_original(v, lp: StandardLP) -> np.ndarray:
    """Original-coordinate components of a standard-form vector."""
    v = np.asarray(v, dtype=float).ravel()
    if v.shape[0] != lp.n_total:
        raise DimensionMismatch(
            f"vector has dimension {v.shape[0]}, expected {lp.n_total}"
        )
    return v[: lp.n_original].copy()


# ---------------------------------------------------------------------------
# Uncertainty sets


@dataclass(frozen=True)
class HPolyhedron:
    """Cost-vector set {c : G c <= h}."""

    G: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        G = _as_matrix(self.G)
        h = np.asarray(self.h, dtype=float).ravel()
        if G.shape[0] != h.shape[0]:
            raise DimensionMismatch("G and h row counts differ")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "h", h)


@dataclass(frozen=True)
class AffineFactor:
    """Costs c = phi' alpha + eps with alpha in a box and |eps_i| <= eta."""

    phi: np.ndarray
    alpha_lower: np.ndarray
    alpha_upper: np.ndarray
    eta: float

    def __post_init__(self):
        phi = _as_matrix(self.phi)
        lo = np.asarray(self.alpha_lower, dtype=float).ravel()
        hi = np.asarray(self.alpha_upper, dtype=float).ravel()
        if lo.shape[0] != phi.shape[0] or hi.shape[0] != phi.shape[0]:
            raise DimensionMismatch("alpha bounds must match the factor count")
        if self.eta < 0:
            raise DimensionMismatch("eta must be nonnegative")
        if np.any(hi < lo):
            raise Infeasible("empty alpha box")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "alpha_lower", lo)
        object.__setattr__(self, "alpha_upper", hi)
        object.__setattr__(self, "eta", float(self.eta))


@dataclass(frozen=True)
class FullSpace:
    """Marker for C = R^d (no prior knowledge); handled by the kernel
    characterization rather than the bounded-set machinery."""

    dimension: int


@dataclass(frozen=True)
class LiftedPolyhedron:
    """H-form expansion of an uncertainty set.

    Variables are ordered (c, extras); the first ``dim`` coordinates are
    the cost vector. Box bounds are kept separate from general rows so
    solvers can exploit them.
    """

    dim: int
    n_vars: int
    var_lower: np.ndarray
    var_upper: np.ndarray
    ineq_G: np.ndarray
    ineq_h: np.ndarray
    eq_A: np.ndarray
    eq_b: np.ndarray

    def as_rows(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """All constraints with finite box bounds materialized as rows."""
        rows = [self.ineq_G] if self.ineq_G.size else []
        rhs = [self.ineq_h] if self.ineq_h.size else []
        for i in range(self.n_vars):
            if np.isfinite(self.var_upper[i]):
                r = np.zeros(self.n_vars)
                r[i] = 1.0
                rows.append(r[None, :])
                rhs.append(np.array([self.var_upper[i]]))
            if np.isfinite(self.var_lower[i]):
                r = np.zeros(self.n_vars)
                r[i] = -1.0
                rows.append(r[None, :])
                rhs.append(np.array([-self.var_lower[i]]))
        G = np.vstack(rows) if rows else np.zeros((0, self.n_vars))
        h = np.concatenate(rhs) if rhs else np.zeros(0)
        return G, h, self.eq_A, self.eq_b

    def shrunk(self, sigma: float) -> "LiftedPolyhedron":
        """Shrink every inequality by ``sigma`` to emulate an open set."""
        if sigma == 0:
            return self
        return LiftedPolyhedron(
            self.dim, self.n_vars,
            self.var_lower + sigma, self.var_upper - sigma,
            self.ineq_G, self.ineq_h - sigma,
            self.eq_A, self.eq_b,
        )


@dataclass(frozen=True)
class UncertaintySet:
    """Bounded convex polyhedral set of admissible cost vectors.

    Construction certifies nonemptiness and boundedness and caches
    per-coordinate cost bounds (used to scale solver tolerances and to
    box MILP variables).
    """

    representation: HPolyhedron | AffineFactor
    dimension: int
    coord_lower: np.ndarray = field(default=None, compare=False)
    coord_upper: np.ndarray = field(default=None, compare=False)

    def __post_init__(self):
        d = int(self.dimension)
        if d <= 0:
            raise DimensionMismatch("dimension must be positive")
        rep = self.representation
        if isinstance(rep, HPolyhedron):
            if rep.G.shape[1] != d:
                raise DimensionMismatch("G column count must equal dimension")
            lo, hi = _hpoly_coord_bounds(rep, d)
        elif isinstance(rep, AffineFactor):
            if rep.phi.shape[1] != d:
                raise DimensionMismatch("phi column count must equal dimension")
            # interval arithmetic over the alpha box; phi entries may mix signs
            lo = np.where(rep.phi.T >= 0,
                          rep.phi.T * rep.alpha_lower,
                          rep.phi.T * rep.alpha_upper).sum(axis=1) - rep.eta
            hi = np.where(rep.phi.T >= 0,
                          rep.phi.T * rep.alpha_upper,
                          rep.phi.T * rep.alpha_lower).sum(axis=1) + rep.eta
        else:
            raise DimensionMismatch("unknown uncertainty representation")
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "coord_lower", lo)
        object.__setattr__(self, "coord_upper", hi)

    @property
    def inf_norm(self) -> float:
        return float(max(np.abs(self.coord_lower).max(), np.abs(self.coord_upper).max()))

    def center_point(self) -> np.ndarray:
        """A deterministic point of C: the box center in factor coordinates
        for AffineFactor sets, the max-slack point otherwise."""
        rep = self.representation
        if isinstance(rep, AffineFactor):
            return rep.phi.T @ ((rep.alpha_lower + rep.alpha_upper) / 2.0)
        from . import lp_solver  # deferred: lp_solver imports this module

        return lp_solver.find_point(rep.G, rep.h)

    def lifted(self, sigma: float = 0.0) -> LiftedPolyhedron:
        rep = self.representation
        d = self.dimension
        if isinstance(rep, HPolyhedron):
            out = LiftedPolyhedron(
                d, d, self.coord_lower.copy(), self.coord_upper.copy(),
                rep.G.copy(), rep.h.copy(), np.zeros((0, d)), np.zeros(0),
            )
        else:
            l = rep.phi.shape[0]
            n = d + l + d  # (c, alpha, eps)
            var_lo = np.concatenate([self.coord_lower, rep.alpha_lower, np.full(d, -rep.eta)])
            var_hi = np.concatenate([self.coord_upper, rep.alpha_upper, np.full(d, rep.eta)])
            eq = np.zeros((d, n))
            eq[:, :d] = np.eye(d)
            eq[:, d:d + l] = -rep.phi.T
            eq[:, d + l:] = -np.eye(d)
            out = LiftedPolyhedron(d, n, var_lo, var_hi, np.zeros((0, n)), np.zeros(0),
                                   eq, np.zeros(d))
        return out.shrunk(sigma)

    def contains(self, c, tol: float = 1e-7) -> bool:
        c = np.asarray(c, dtype=float).ravel()
        rep = self.representation
        if isinstance(rep, HPolyhedron):
            return bool(np.all(rep.G @ c <= rep.h + tol))
        lifted = self.lifted()
        G, h, A_eq, b_eq = lifted.as_rows()
        from . import lp_solver  # deferred: lp_solver imports this module

        eqs = np.zeros((self.dimension, lifted.n_vars))
        eqs[:, : self.dimension] = np.eye(self.dimension)
        try:
            lp_solver.find_point(G, h, eq_lhs=np.vstack([A_eq, eqs]),
                                 eq_rhs=np.concatenate([b_eq, c]),
                                 feas_tol=tol)
            return True
        except Infeasible:
            return False


def _hpoly_coord_bounds(rep: HPolyhedron, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-coordinate min/max over {Gc <= h}; certifies bounded + nonempty."""
    from scipy.optimize import linprog

    lo = np.zeros(d)
    hi = np.zeros(d)
    for i in range(d):
        c = np.zeros(d)
        c[i] = 1.0
        for sign, out in ((1.0, lo), (-1.0, hi)):
            res = linprog(sign * c, A_ub=rep.G, b_ub=rep.h,
                          bounds=[(None, None)] * d, method="highs")
            if res.status == 2:
                raise Infeasible("the uncertainty set is empty")
            if res.status == 3:
                raise UnboundedModel(f"uncertainty set unbounded in coordinate {i}")
            if res.status != 0:
                raise UnboundedModel(f"bound LP failed with status {res.status}")
            out[i] = sign * res.fun
    return lo, hi


# ---------------------------------------------------------------------------
# Datasets and observations


@dataclass(frozen=True)
class Dataset:
    """Ordered query vectors; observing q reveals c'q.

    Exact duplicate queries are dropped at construction (they add no
    information). An empty dataset still needs its ambient dimension.
    """

    queries: np.ndarray
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        q = np.asarray(self.queries, dtype=float)
        if q.ndim == 1:
            q = q.reshape(1, -1) if q.size else q.reshape(0, 0)
        if q.ndim != 2:
            raise DimensionMismatch("queries must form a 2-D array")
        labels = self.labels
        seen: set[bytes] = set()
        keep: list[int] = []
        for i, row in enumerate(q):
            key = row.tobytes()
            if key not in seen:
                seen.add(key)
                keep.append(i)
        if len(keep) != q.shape[0]:
            q = q[keep]
            if labels is not None:
                labels = tuple(labels[i] for i in keep)
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != q.shape[0]:
                raise DimensionMismatch("one label per query required")
        object.__setattr__(self, "queries", q)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def empty(cls, dim: int) -> "Dataset":
        return cls(np.zeros((0, dim)))

    @property
    def size(self) -> int:
        return self.queries.shape[0]

    @property
    def dimension(self) -> int:
        return self.queries.shape[1]


@dataclass(frozen=True)
class ObservationVector:
    """Observed values aligned with a dataset's queries."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float).ravel())

    def check_against(self, dataset: Dataset) -> None:
        if self.values.shape[0] != dataset.size:
            raise DimensionMismatch(
                f"{self.values.shape[0]} observations for {dataset.size} queries"
            )


def observe(dataset: Dataset, c) -> ObservationVector:
    """Noiseless observations c'q for every query of the dataset."""
    c = np.asarray(c, dtype=float).ravel()
    if dataset.size and c.shape[0] != dataset.dimension:
        raise DimensionMismatch("cost dimension does not match queries")
    return ObservationVector(dataset.queries @ c if dataset.size else np.zeros(0))


# ---------------------------------------------------------------------------
# JSON problem files


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ParseError(f"missing key '{key}' in {where}")
    return obj[key]


def _matrix_from(obj, key: str, where: str) -> np.ndarray:
    value = _require(obj, key, where)
    try:
        return np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"key '{key}' in {where} is not a numeric matrix") from exc


def uncertainty_from_dict(obj: dict, n_vars: int) -> UncertaintySet | FullSpace:
    kind = _require(obj, "type", "uncertainty")
    if kind == "full":
        return FullSpace(n_vars)
    if kind == "hpoly":
        G = _matrix_from(obj, "lhs", "uncertainty")
        h = _matrix_from(obj, "rhs", "uncertainty")
        return UncertaintySet(HPolyhedron(G, h), n_vars)
    if kind == "affine":
        phi = _matrix_from(obj, "phi", "uncertainty")
        lo = _matrix_from(obj, "alpha_lower", "uncertainty")
        hi = _matrix_from(obj, "alpha_upper", "uncertainty")
        eta = _require(obj, "eta", "uncertainty")
        try:
            eta = float(eta)
        except (TypeError, ValueError) as exc:
            raise ParseError("key 'eta' in uncertainty is not a number") from exc
        return UncertaintySet(AffineFactor(phi, lo, hi, eta), n_vars)
    raise ParseError(f"unknown uncertainty type '{kind}'")


def problem_from_dict(obj: dict) -> tuple[GeneralLP, UncertaintySet | FullSpace]:
    """Parse the canonical problem schema; raises ParseError naming the
    offending key on malformed input."""
    if not isinstance(obj, dict):
        raise ParseError("problem file must contain a JSON object")
    n_vars = _require(obj, "n_vars", "problem")
    if not isinstance(n_vars, int) or n_vars <= 0:
        raise ParseError("key 'n_vars' must be a positive integer")
    kwargs: dict = {"n_vars": n_vars}
    if "ineq" in obj:
        kwargs["ineq_lhs"] = _matrix_from(obj["ineq"], "lhs", "ineq")
        kwargs["ineq_rhs"] = _matrix_from(obj["ineq"], "rhs", "ineq")
    if "eq" in obj:
        kwargs["eq_lhs"] = _matrix_from(obj["eq"], "lhs", "eq")
        kwargs["eq_rhs"] = _matrix_from(obj["eq"], "rhs", "eq")
    if "bounds" in obj:
        bounds = obj["bounds"]
        if "lower" in bounds:
            kwargs["lower_bounds"] = _matrix_from(bounds, "lower", "bounds")
        if "upper" in bounds:
            upper = np.asarray(
                [np.inf if u is None else float(u) for u in _require(bounds, "upper", "bounds")]
            )
            kwargs["upper_bounds"] = upper
    try:
        g = GeneralLP(**kwargs)
    except DimensionMismatch as exc:
        raise ParseError(str(exc)) from exc
    uncertainty = uncertainty_from_dict(_require(obj, "uncertainty", "problem"), n_vars)
    return g, uncertainty


def load_problem(path) -> tuple[GeneralLP, UncertaintySet | FullSpace]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return problem_from_dict(obj)


def dataset_from_dict(obj: dict, n_vars: int) -> Dataset:
    queries = _matrix_from(obj, "queries", "dataset")
    if queries.size == 0:
        return Dataset.empty(n_vars)
    queries = np.atleast_2d(queries)
    if queries.shape[1] != n_vars:
        raise ParseError(
            f"key 'queries' has vectors of length {queries.shape[1]}, expected {n_vars}"
        )
    labels = obj.get("labels")
    return Dataset(queries, tuple(labels) if labels is not None else None)


def load_dataset(path, n_vars: int) -> Dataset:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    return dataset_from_dict(obj, n_vars)


def load_observations(path) -> ObservationVector:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from exc
    values = _matrix_from(obj, "values", "observations")
    return ObservationVector(values)
