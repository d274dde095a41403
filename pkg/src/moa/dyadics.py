"""Dyadic (outer) products of vectors, projectors, and spectral sums.

A dyad u v^T is the rank-2 outer product of two vectors.  For a unit vector
u, the dyad u u^T is the orthogonal projector onto span(u): it is idempotent
and annihilates the orthogonal complement.  A symmetric matrix is the
spectral sum of its eigenvalue-weighted eigenvector dyads.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .arrays import DenseArray
from .errors import DomainError, ShapeError
from .exprs import Leaf, Outer, materialize

_UNIT_TOL = 1e-12
_ORTHO_TOL = 1e-8


def dyad(u: DenseArray, v: DenseArray) -> DenseArray:
    """Outer product of two vectors as a matrix: out[i, j] = u[i] * v[j]."""
    if u.ndim != 1 or v.ndim != 1:
        raise ShapeError(f"dyad needs vectors, got ranks {u.ndim} and {v.ndim}")
    expr = Outer("mul", Leaf("u", u.shape), Leaf("v", v.shape))
    return materialize(expr, {"u": u, "v": v})


def projector_parallel(u: DenseArray) -> DenseArray:
    """Projector onto span(u) for a unit vector u: the dyad u u^T.

    Requires the norm of u to be within 1e-12 of 1.
    """
    if u.ndim != 1:
        raise ShapeError(f"projector needs a vector, got rank {u.ndim}")
    norm = float(np.linalg.norm(u.to_numpy()))
    if abs(norm - 1.0) > _UNIT_TOL:
        raise DomainError(f"projector axis must be a unit vector, norm is {norm!r}")
    return dyad(u, u)


def spectral_reconstruct(
    values: Sequence[float], vectors: DenseArray
) -> DenseArray:
    """Rebuild a symmetric matrix from its spectral data.

    ``vectors`` holds one eigenvector per column; ``values`` holds the
    matching eigenvalues.  The columns must be orthonormal.  The result is
    the sum of each eigenvalue times the dyad of its eigenvector with
    itself.
    """
    if vectors.ndim != 2:
        raise ShapeError(f"eigenvector matrix must be rank 2, got rank {vectors.ndim}")
    n, k = vectors.shape
    if len(values) != k:
        raise ShapeError(f"{len(values)} eigenvalues for {k} eigenvector columns")
    mat = vectors.to_numpy()
    gram = mat.T @ mat
    if not np.allclose(gram, np.eye(k), atol=_ORTHO_TOL, rtol=0.0):
        raise DomainError("eigenvector columns are not orthonormal")
    total = np.zeros((n, n), dtype=np.float64)
    for j, value in enumerate(values):
        column = DenseArray((n,), mat[:, j])
        total += float(value) * dyad(column, column).to_numpy()
    return DenseArray.from_numpy(total)
