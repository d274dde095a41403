"""Shared fixtures: small worked arrays with hand-checkable values."""

from __future__ import annotations

import pytest

from moa import DenseArray


@pytest.fixture
def mat2() -> DenseArray:
    """2x2 matrix [[1, 2], [3, 4]]."""
    return DenseArray.from_nested([[1.0, 2.0], [3.0, 4.0]])


@pytest.fixture
def mat34() -> DenseArray:
    """3x4 matrix with rows 5..8, 9..12, 13..16."""
    return DenseArray.from_nested(
        [[5.0, 6.0, 7.0, 8.0], [9.0, 10.0, 11.0, 12.0], [13.0, 14.0, 15.0, 16.0]]
    )


@pytest.fixture
def mat3() -> DenseArray:
    """3x3 matrix with entries 1..9."""
    return DenseArray.from_nested([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]])


@pytest.fixture
def slabs() -> DenseArray:
    """Shape <2 4 3>: first slab holds 0..11, second slab holds 20..31."""
    data = [float(v) for v in range(12)] + [float(v) for v in range(20, 32)]
    return DenseArray((2, 4, 3), data)
