"""The Kronecker product is a reshaped, axis-permuted outer product.

The outer product of an m-by-n and a p-by-q matrix is a rank-4 array of
all pairwise products, shaped (m, n, p, q).  Permuting its axes by
(0, 2, 1, 3) groups row digits with row digits and column digits with
column digits; a row-major reshape to (m*p, n*q) then lands every product
exactly where the Kronecker product wants it.  Same multiset of numbers,
different layout.
"""

import numpy as np

from moa import DenseArray, Kron, Leaf, Outer, materialize

A = DenseArray.from_nested([[1.0, 2.0], [3.0, 4.0]])
B = DenseArray.from_nested(
    [[5.0, 6.0, 7.0, 8.0], [9.0, 10.0, 11.0, 12.0], [13.0, 14.0, 15.0, 16.0]]
)
env = {"A": A, "B": B}
a, b = Leaf("A", A.shape), Leaf("B", B.shape)

outer = materialize(Outer("mul", a, b), env)
print("outer product shape:", outer.shape)
print("first 8 flat elements:", outer.data[:8])

kron = materialize(Kron(a, b), env)
print("\nkronecker shape:", kron.shape)
print("first 8 flat elements:", kron.data[:8])
print("(the second half of that row comes from 2 * B's first row)")

print("\nsame numbers, different order:", sorted(outer.data) == sorted(kron.data))

# the structural definition pays its way: it agrees with numpy exactly
print("matches numpy's kron:", np.array_equal(kron.to_numpy(), np.kron(A.to_numpy(), B.to_numpy())))

# the desugared form shows the three-step pipeline explicitly
expanded = Kron(a, b).desugared
print("\nkron desugars to:", type(expanded).__name__, expanded.shape)
print("  over transpose:", expanded.child.perm)
print("  over outer of shapes:", a.shape, "++", b.shape)
