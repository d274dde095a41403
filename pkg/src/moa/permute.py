"""General transpose: permute axes of a dense array.

The transpose of A by permutation t has shape select(shape(A), t), and the
element at index i is the element of A at index select(i, gradeup(t)).  The
matrix transpose is the rank-2 special case t = (1, 0).
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .arrays import DenseArray, counters
from .errors import ShapeError
from .shapes import as_permutation, gradeup, pi, select, unravel_rowmajor


def transpose_general(order: Sequence[int], array: DenseArray) -> DenseArray:
    """Eagerly materialize the axis permutation of ``array``.

    Walks every output index, pulling the source element through the inverse
    permutation, so it doubles as an executable statement of the definition.
    """
    perm = as_permutation(order, array.ndim)
    out_shape = select(array.shape, perm)
    inverse = gradeup(perm)
    src = array.to_numpy()
    out = np.empty(pi(out_shape), dtype=np.float64)
    for offset in range(out.size):
        index = unravel_rowmajor(offset, out_shape)
        out[offset] = src[select(index, inverse)]
    out.setflags(write=False)
    result = DenseArray._from_buffer(out_shape, out)
    counters.array_allocations += 1
    return result


def transpose_matrix(array: DenseArray) -> DenseArray:
    """Rank-2 transpose."""
    if array.ndim != 2:
        raise ShapeError(f"matrix transpose needs rank 2, got rank {array.ndim}")
    return transpose_general((1, 0), array)
