"""Dyads, projectors, and spectral sums.

The dyad u v^T is the smallest interesting outer product: two vectors in,
one matrix out.  For a unit vector u, the dyad u u^T projects onto the
line through u; it is idempotent and annihilates everything orthogonal.
Summing eigenvalue-weighted eigenvector dyads rebuilds a symmetric matrix
from its spectrum.
"""

import numpy as np

from moa import DenseArray, dyad, projector_parallel, spectral_reconstruct

u = DenseArray((2,), [0.6, 0.8])
v = DenseArray((3,), [1.0, 2.0, 3.0])

print("dyad of a 2-vector and a 3-vector:")
print(dyad(u, v).to_numpy())

P = projector_parallel(u)
p = P.to_numpy()
print("\nprojector onto span([0.6, 0.8]):")
print(p)
print("idempotent, max |P@P - P|:", np.max(np.abs(p @ p - p)))
print("annihilates the complement, max |(I-P)@P|:", np.max(np.abs((np.eye(2) - p) @ p)))

# spectral reconstruction: diagonalize, then rebuild from dyads
rng = np.random.default_rng(0)
raw = rng.standard_normal((4, 4))
sym = (raw + raw.T) / 2.0
values, vectors = np.linalg.eigh(sym)

rebuilt = spectral_reconstruct([float(w) for w in values], DenseArray.from_numpy(vectors))
err = np.max(np.abs(rebuilt.to_numpy() - sym))
print("\nspectral reconstruction of a random symmetric 4x4:")
print("max reconstruction error:", err)
