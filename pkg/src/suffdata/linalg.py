"""Dense subspace utilities: orthonormal bases, complements, kernels.

Everything here works on plain float arrays with explicit tolerances.
Orthonormalization is modified Gram-Schmidt with one reorthogonalization
pass, which is accurate enough at the problem scales used (dimensions up
to a few hundred, coefficients O(1)-O(10)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch

DEFAULT_TOL_RANK = 1e-8


@dataclass(frozen=True)
class SpanBasis:
    """Orthonormal basis of the span of ``source_vectors``.

    ``vectors`` has one orthonormal vector per row; ``source_vectors``
    keeps the raw vectors they orthonormalize, in insertion order.
    An empty basis still carries the ambient dimension in its shape.
    """

    vectors: np.ndarray
    source_vectors: np.ndarray
    tol_rank: float = DEFAULT_TOL_RANK

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        s = np.atleast_2d(np.asarray(self.source_vectors, dtype=float))
        if v.size == 0:
            v = v.reshape(0, s.shape[1] if s.size else v.shape[-1])
        if s.size == 0:
            s = s.reshape(0, v.shape[1])
        if v.shape[1] != s.shape[1]:
            raise DimensionMismatch(
                f"basis vectors have dimension {v.shape[1]}, sources {s.shape[1]}"
            )
        object.__setattr__(self, "vectors", v)
        object.__setattr__(self, "source_vectors", s)

    @classmethod
    def empty(cls, dim: int, tol_rank: float = DEFAULT_TOL_RANK) -> "SpanBasis":
        return cls(np.zeros((0, dim)), np.zeros((0, dim)), tol_rank)

    @classmethod
    def from_vectors(cls, vectors, tol_rank: float = DEFAULT_TOL_RANK) -> "SpanBasis":
        """Orthonormalize ``vectors``, silently dropping dependent ones."""
        vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
        basis = cls.empty(vectors.shape[1], tol_rank)
        for v in vectors:
            extended = extend_basis(basis, v)
            if extended is not None:
                basis = extended
        return basis

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    @property
    def ambient_dim(self) -> int:
        return self.vectors.shape[1]


def _orthogonal_residual(basis: SpanBasis, v: np.ndarray) -> np.ndarray:
    r = v - basis.vectors.T @ (basis.vectors @ v)
    # one reorthogonalization pass
    r = r - basis.vectors.T @ (basis.vectors @ r)
    return r


def extend_basis(basis: SpanBasis, v) -> SpanBasis | None:
    """Extend ``basis`` with ``v`` if it grows the span, else return None.

    The residual of ``v`` against the span must exceed
    ``tol_rank * max(1, ||v||)`` for the extension to count; the input
    basis is never mutated.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != basis.ambient_dim:
        raise DimensionMismatch(
            f"vector has dimension {v.shape}, basis ambient is {basis.ambient_dim}"
        )
    r = _orthogonal_residual(basis, v)
    nr = float(np.linalg.norm(r))
    if nr <= basis.tol_rank * max(1.0, float(np.linalg.norm(v))):
        return None
    return SpanBasis(
        np.vstack([basis.vectors, r / nr]),
        np.vstack([basis.source_vectors, v]),
        basis.tol_rank,
    )


def project_onto_complement(basis: SpanBasis, v) -> np.ndarray:
    """Project ``v`` onto the orthogonal complement of the span."""
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != basis.ambient_dim:
        raise DimensionMismatch(
            f"vector has dimension {v.shape}, basis ambient is {basis.ambient_dim}"
        )
    return _orthogonal_residual(basis, v)


def project_onto_span(basis: SpanBasis, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v - project_onto_complement(basis, v)


def in_span(basis: SpanBasis, v) -> bool:
    """True iff ``v`` lies in the span within ``tol_rank`` (relative)."""
    v = np.asarray(v, dtype=float)
    r = project_onto_complement(basis, v)
    return float(np.linalg.norm(r)) <= basis.tol_rank * max(1.0, float(np.linalg.norm(v)))


def subspace_equal(a: SpanBasis, b: SpanBasis) -> bool:
    """True iff the two bases span the same subspace."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )
    if a.dim != b.dim:
        return False
    return all(in_span(b, v) for v in a.vectors) and all(in_span(a, v) for v in b.vectors)


def kernel_basis(M, tol_rank: float = DEFAULT_TOL_RANK) -> SpanBasis:
    """Orthonormal basis of ``{v : Mv = 0}`` via rank-revealing elimination.

    Rank decisions use ``tol_rank`` relative to the largest entry of ``M``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        raise DimensionMismatch("kernel_basis requires a nonempty matrix")
    m, n = M.shape
    scale = max(1.0, float(np.abs(M).max()))
    tol = tol_rank * scale

    # Gaussian elimination with partial pivoting, tracking pivot columns.
    R = M.copy()
    pivot_cols: list[int] = []
    row = 0
    for col in range(n):
        if row >= m:
            break
        p = row + int(np.argmax(np.abs(R[row:, col])))
        if abs(R[p, col]) <= tol:
            continue
        R[[row, p]] = R[[p, row]]
        R[row] = R[row] / R[row, col]
        mask = np.arange(m) != row
        R[mask] -= np.outer(R[mask, col], R[row])
        pivot_cols.append(col)
        row += 1

    free_cols = [c for c in range(n) if c not in pivot_cols]
    raw = np.zeros((len(free_cols), n))
    for k, fc in enumerate(free_cols):
        raw[k, fc] = 1.0
        for r, pc in enumerate(pivot_cols):
            raw[k, pc] = -R[r, fc]
    return SpanBasis.from_vectors(raw, tol_rank) if len(free_cols) else SpanBasis.empty(n, tol_rank)


def intersect_with_coordinate_span(basis_matrix: np.ndarray, coords: np.ndarray) -> SpanBasis:
    """Basis of ``ker(basis_matrix) ∩ span{e_i : coords[i]}``.

    ``basis_matrix`` is stacked with unit rows pinning the excluded
    coordinates to zero, then the kernel is taken.
    """
    basis_matrix = np.atleast_2d(np.asarray(basis_matrix, dtype=float))
    n = basis_matrix.shape[1]
    excluded = [i for i in range(n) if not coords[i]]
    if excluded:
        pins = np.zeros((len(excluded), n))
        pins[np.arange(len(excluded)), excluded] = 1.0
        stacked = np.vstack([basis_matrix, pins])
    else:
        stacked = basis_matrix
    return kernel_basis(stacked)
