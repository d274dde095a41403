from __future__ import annotations

import numpy as np
import pytest

from moa import (
    DenseArray,
    DomainError,
    ShapeError,
    dyad,
    projector_parallel,
    spectral_reconstruct,
)


def test_dyad_values():
    u = DenseArray((2,), [1.0, 2.0])
    v = DenseArray((3,), [3.0, 4.0, 5.0])
    out = dyad(u, v)
    assert out.shape == (2, 3)
    assert out.to_numpy().tolist() == [[3.0, 4.0, 5.0], [6.0, 8.0, 10.0]]


def test_dyad_requires_vectors(mat2):
    with pytest.raises(ShapeError):
        dyad(mat2, DenseArray((2,), [1.0, 0.0]))


def test_projector_idempotent():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        raw = rng.standard_normal(n)
        unit = raw / np.linalg.norm(raw)
        p = projector_parallel(DenseArray((n,), unit)).to_numpy()
        assert np.max(np.abs(p @ p - p)) <= 1e-12
        assert np.max(np.abs((np.eye(n) - p) @ p)) <= 1e-12
        assert abs(np.trace(p) - 1.0) <= 1e-12


def test_projector_rejects_non_unit():
    with pytest.raises(DomainError):
        projector_parallel(DenseArray((2,), [1.0, 1.0]))


def test_projector_leaves_axis_fixed():
    unit = np.array([0.6, 0.8])
    p = projector_parallel(DenseArray((2,), unit)).to_numpy()
    assert np.max(np.abs(p @ unit - unit)) <= 1e-15


def test_spectral_reconstruct_matches_eigh():
    rng = np.random.default_rng(9)
    for _ in range(25):
        n = int(rng.integers(2, 6))
        raw = rng.standard_normal((n, n))
        sym = (raw + raw.T) / 2.0
        values, vectors = np.linalg.eigh(sym)
        rebuilt = spectral_reconstruct(
            [float(v) for v in values], DenseArray.from_numpy(vectors)
        )
        assert np.max(np.abs(rebuilt.to_numpy() - sym)) <= 1e-10


def test_spectral_reconstruct_validation():
    good = DenseArray.from_numpy(np.eye(3))
    with pytest.raises(ShapeError):
        spectral_reconstruct([1.0, 2.0], good)  # wrong count
    skewed = DenseArray.from_numpy(np.array([[1.0, 1.0], [0.0, 1.0]]))
    with pytest.raises(DomainError):
        spectral_reconstruct([1.0, 2.0], skewed)  # columns not orthonormal


def test_spectral_partial_basis():
    # a projector built from two of three eigenvectors
    vectors = DenseArray.from_numpy(np.eye(3)[:, :2])
    out = spectral_reconstruct([2.0, 3.0], vectors)
    assert out.to_numpy().tolist() == [
        [2.0, 0.0, 0.0],
        [0.0, 3.0, 0.0],
        [0.0, 0.0, 0.0],
    ]
