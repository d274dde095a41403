"""General transpose: permuting the axes of an array.

The transpose by a permutation t has shape shape[t], and element i of the
result is element i[gradeup(t)] of the source, where gradeup(t) is the
sorting permutation of t.  Because gradeup inverts a permutation, each
element lands exactly once.
"""

from moa import DenseArray, gradeup, select, transpose_general

data = [float(v) for v in range(12)] + [float(v) for v in range(20, 32)]
arr = DenseArray((2, 4, 3), data)

print("source shape:", arr.shape)

# gradeup sorts a vector's positions by value; on a permutation that is
# exactly the inverse permutation
t = (2, 0, 1)
print("\ngradeup of", t, "is", gradeup(t))
print("check: t[gradeup(t)] =", select(t, gradeup(t)))

rot = transpose_general(t, arr)
print("\ntranspose by", t, "has shape", rot.shape)
print(rot.to_numpy())

rev = transpose_general((2, 1, 0), arr)
print("\ntranspose by (2, 1, 0) has shape", rev.shape)
print(rev.to_numpy())

# applying the inverse permutation undoes the transpose
back = transpose_general(gradeup(t), rot)
print("\nround trip restores the source:", back == arr)
