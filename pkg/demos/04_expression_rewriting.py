"""Evaluating one element without materializing anything.

Asking for element i of a structured expression rewrites i downward
through the structure: an outer product splits the index between its
operands, a transpose permutes it, a reshape relinearizes it.  What is
left at the bottom is a handful of single-element reads.  The read
counters prove that a deep Kronecker chain costs exactly one read per
factor, and allocates nothing.
"""

from moa import (
    DenseArray,
    Leaf,
    counters,
    eval_element,
    multi_kron,
    psi_reduce,
)

M = DenseArray.from_nested([[1.0, 2.0], [3.0, 4.0]])

# a chain of five 2x2 factors: the materialized result would be 32x32
factors = [Leaf(f"M{i}", (2, 2)) for i in range(5)]
chain = multi_kron(factors)
env = {f"M{i}": M for i in range(5)}

print("chain shape:", chain.shape)

# the per-element read plan is a tree of flat reads combined by mul
plan = psi_reduce((17, 6), chain)
print("\nread plan for element (17, 6):")
print(" ", plan)

counters.reset()
value = eval_element(chain, (17, 6), env)
print("\nvalue:", value)
print("scalar reads:", counters.scalar_reads, "(one per factor)")
print("arrays allocated:", counters.array_allocations)

# evaluating every element of a small expression agrees with brute force
from moa import Outer, materialize

small = Outer("add", Leaf("A", (2, 2)), Leaf("M0", (2, 2)))
small_env = {"A": M, "M0": M}
full = materialize(small, small_env)
direct = [
    eval_element(small, (i, j, k, l), small_env)
    for i in range(2)
    for j in range(2)
    for k in range(2)
    for l in range(2)
]
print("\nelementwise route equals materialized route:", tuple(direct) == full.data)
