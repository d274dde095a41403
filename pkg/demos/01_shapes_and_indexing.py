"""Shapes, row-major layout, and the psi indexing operator.

An array is a shape (a vector of axis extents) plus its elements in
row-major order.  Indexing with psi is shape-polymorphic: a full index
returns one element, while a shorter index returns the contiguous
sub-array it prefixes, with the leading axes stripped off.
"""

from moa import DenseArray, pi, psi, ravel_rowmajor, unravel_rowmajor

# Two 4x3 slabs stacked along a leading axis of extent 2.  The first slab
# holds 0..11, the second 20..31, so every element says where it lives.
data = [float(v) for v in range(12)] + [float(v) for v in range(20, 32)]
arr = DenseArray((2, 4, 3), data)

print("shape:", arr.shape)
print("element count pi(shape):", pi(arr.shape))

print("\nfull index (1, 2, 0):", psi((1, 2, 0), arr))

plane = psi((1,), arr)
print("\npartial index (1,) selects the second slab:")
print("  shape:", plane.shape)
print("  data: ", plane.data)

row = psi((1, 2), arr)
print("\npartial index (1, 2) selects one row of that slab:")
print("  shape:", row.shape)
print("  data: ", row.data)

# Row-major linearization and its inverse connect multi-indices to flat
# buffer offsets.  The last axis varies fastest.
offset = ravel_rowmajor((1, 2, 0), arr.shape)
print("\nflat offset of (1, 2, 0):", offset)
print("unravel back:", unravel_rowmajor(offset, arr.shape))
