"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line for its capability, on top of the usual
pytest verdict.  Values asserted here were worked out by hand or against
independent oracles (numpy's kron/transpose/eigh) before being frozen.
"""

from __future__ import annotations

import functools

import numpy as np
import pytest

from moa import (
    Affine,
    DenseArray,
    FlatRead,
    FlatWrite,
    Kron,
    Leaf,
    OpExpr,
    Outer,
    PartitionError,
    builtin_env,
    builtin_grid,
    counters,
    eval_element,
    execute_plan,
    flatten_operands,
    gradeup,
    lower,
    materialize,
    materialize_stepwise,
    multi_kron,
    pi,
    projector_parallel,
    psi,
    spectral_reconstruct,
    transpose_general,
    unravel_rowmajor,
)


def reported(label: str):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"{label}: FAIL")
                raise
            print(f"{label}: PASS")

        return run

    return wrap


def slab_array() -> DenseArray:
    data = [float(v) for v in range(12)] + [float(v) for v in range(20, 32)]
    return DenseArray((2, 4, 3), data)


def double_outer():
    a = Leaf("A", (2, 2))
    b = Leaf("B", (3, 3))
    return Outer("mul", Outer("mul", a, b), a)


def double_outer_env():
    return {
        "A": DenseArray.from_nested([[1.0, 2.0], [3.0, 4.0]]),
        "B": DenseArray.from_nested(
            [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]]
        ),
    }


@reported("01 shapes and indexing")
def test_01_shapes_and_indexing():
    arr = slab_array()
    assert arr.shape == (2, 4, 3)
    assert pi(arr.shape) == 24

    # a full index yields the element
    assert psi((0, 0, 0), arr) == 0.0
    assert psi((1, 2, 0), arr) == 26.0

    # a partial index yields the contiguous row-major sub-array
    plane = psi((1,), arr)
    assert plane.shape == (4, 3)
    assert plane.data == tuple(float(v) for v in range(20, 32))
    row = psi((1, 2), arr)
    assert row.shape == (3,)
    assert row.data == (26.0, 27.0, 28.0)


@reported("02 gradeup and axis permutation")
def test_02_gradeup_and_axis_permutation():
    assert gradeup((2, 0, 1, 3)) == (1, 2, 0, 3)
    assert gradeup((2, 0, 1)) == (1, 2, 0)

    arr = slab_array()
    rev = transpose_general((2, 1, 0), arr)
    assert rev.shape == (3, 4, 2)
    assert rev.to_numpy().tolist() == [
        [[0.0, 20.0], [3.0, 23.0], [6.0, 26.0], [9.0, 29.0]],
        [[1.0, 21.0], [4.0, 24.0], [7.0, 27.0], [10.0, 30.0]],
        [[2.0, 22.0], [5.0, 25.0], [8.0, 28.0], [11.0, 31.0]],
    ]

    rot = transpose_general((2, 0, 1), arr)
    assert rot.shape == (3, 2, 4)
    assert rot.to_numpy().tolist() == [
        [[0.0, 3.0, 6.0, 9.0], [20.0, 23.0, 26.0, 29.0]],
        [[1.0, 4.0, 7.0, 10.0], [21.0, 24.0, 27.0, 30.0]],
        [[2.0, 5.0, 8.0, 11.0], [22.0, 25.0, 28.0, 31.0]],
    ]


@reported("03 kronecker against independent oracle")
def test_03_kronecker_oracle():
    rng = np.random.default_rng(42)
    for _ in range(200):
        m, n, p, q = (int(x) for x in rng.integers(1, 5, size=4))
        a = rng.integers(-9, 10, size=(m, n)).astype(np.float64)
        b = rng.integers(-9, 10, size=(p, q)).astype(np.float64)
        da, db = DenseArray.from_numpy(a), DenseArray.from_numpy(b)
        expr = Kron(Leaf("A", (m, n)), Leaf("B", (p, q)))
        ours = materialize(expr, {"A": da, "B": db}).to_numpy()
        assert np.array_equal(ours, np.kron(a, b))


@reported("04 general transpose follows its definition")
def test_04_transpose_definition():
    arr = slab_array()
    perm = (2, 0, 1)
    out = transpose_general(perm, arr)
    # the definition: element i of the result is element i[gradeup(perm)]
    # of the source; numpy's axes-permute is an independent statement of it
    assert np.array_equal(out.to_numpy(), np.transpose(arr.to_numpy(), perm))
    # spot value where hand-worked layouts often go wrong: gradeup((2,0,1))
    # is (1,2,0), so (1,0,3) pulls source element (0,3,1), which holds 10
    assert psi((1, 0, 3), out) == 10.0

    rng = np.random.default_rng(7)
    for _ in range(50):
        rank = int(rng.integers(1, 5))
        shape = tuple(int(x) for x in rng.integers(1, 5, size=rank))
        p = tuple(int(x) for x in rng.permutation(rank))
        src = DenseArray(shape, rng.standard_normal(pi(shape)))
        assert np.array_equal(
            transpose_general(p, src).to_numpy(), np.transpose(src.to_numpy(), p)
        )


@reported("05 per-element evaluation with counted reads")
def test_05_dnf_counted_reads():
    expr = double_outer()
    env = double_outer_env()
    full = materialize(expr, env)
    for offset in range(pi(expr.shape)):
        index = unravel_rowmajor(offset, expr.shape)
        counters.reset()
        value = eval_element(expr, index, env)
        # three leaf occurrences, so exactly three scalar reads
        assert counters.scalar_reads == 3
        assert counters.array_allocations == 0
        assert value == psi(index, full)


@reported("06 dual-route agreement over the expression grid")
def test_06_dual_route_grid():
    env = builtin_env(0)
    checked = 0
    for expr in builtin_grid():
        expected = materialize_stepwise(expr, env).reshape(-1)
        for offset in range(pi(expr.shape)):
            index = unravel_rowmajor(offset, expr.shape)
            assert eval_element(expr, index, env) == float(expected[offset])
            checked += 1
    assert checked > 500


@reported("07 worked loop plan")
def test_07_worked_loop_plan():
    plan = lower(double_outer(), procs=4)
    assert plan.procs == 4
    assert plan.out_shape == (2, 2, 3, 3, 2, 2)
    assert [(l.var, l.start, l.stop, l.stride, l.count) for l in plan.loops] == [
        ("p", 0, 4, 1, 4),
        ("q", 0, 9, 1, 9),
        ("r", 0, 4, 1, 4),
    ]
    assert plan.write == FlatWrite("out", Affine((("p", 36), ("q", 4), ("r", 1))))
    assert plan.body == OpExpr(
        "mul",
        OpExpr(
            "mul",
            FlatRead("avec", Affine((("p", 1),))),
            FlatRead("bvec", Affine((("q", 1),))),
        ),
        FlatRead("avec", Affine((("r", 1),))),
    )
    assert 4 * 9 * 4 == 144

    env = double_outer_env()
    out = execute_plan(plan, flatten_operands(env))
    expected = materialize(double_outer(), env)
    assert out == expected
    # inputs are positive, so every one of the 144 slots was truly written
    assert all(v > 0.0 for v in out.data)


@reported("08 kronecker chains evaluate without materializing")
def test_08_chains_do_not_materialize():
    base = DenseArray.from_nested([[1.0, 2.0], [3.0, 4.0]])
    for k in range(2, 7):
        factors = [Leaf(f"M{i}", (2, 2)) for i in range(k)]
        chain = multi_kron(factors)
        env = {f"M{i}": base for i in range(k)}
        side = 2**k
        expected = base.to_numpy()
        for _ in range(k - 1):
            expected = np.kron(expected, base.to_numpy())
        for index in [(0, 0), (side - 1, side - 1), (side // 2, 1)]:
            counters.reset()
            value = eval_element(chain, index, env)
            assert counters.scalar_reads == k
            assert counters.array_allocations == 0
            assert value == expected[index]


@reported("09 partitioning laws")
def test_09_partitioning():
    expr = double_outer()
    env = double_outer_env()
    buffers = flatten_operands(env)
    reference = execute_plan(lower(expr, procs=1), buffers)
    for procs in (1, 2, 4):
        plan = lower(expr, procs=procs)
        sequential = execute_plan(plan, buffers, parallel=False)
        threaded = execute_plan(plan, buffers, parallel=True)
        assert sequential == reference
        assert sequential.data == threaded.data

    with pytest.raises(PartitionError) as info:
        lower(expr, procs=5)
    assert info.value.valid == (2, 4)

    chain = multi_kron([Leaf("A", (2, 2)), Leaf("B", (3, 3))])
    chain_buffers = flatten_operands(env)
    base = execute_plan(lower(chain, procs=1), chain_buffers)
    outer_extent = lower(chain, procs=1).loops[0].count
    for procs in range(2, outer_extent + 1):
        if outer_extent % procs:
            continue
        out = execute_plan(lower(chain, procs=procs), chain_buffers, parallel=True)
        assert out == base


@reported("10 projectors and spectral sums")
def test_10_dyadics():
    rng = np.random.default_rng(1234)
    for _ in range(100):
        n = int(rng.integers(2, 6))
        raw = rng.standard_normal(n)
        unit = raw / np.linalg.norm(raw)
        p = projector_parallel(DenseArray((n,), unit)).to_numpy()
        assert np.max(np.abs(p @ p - p)) <= 1e-12
        assert np.max(np.abs((np.eye(n) - p) @ p)) <= 1e-12
    for _ in range(50):
        n = int(rng.integers(2, 6))
        raw = rng.standard_normal((n, n))
        sym = (raw + raw.T) / 2.0
        values, vectors = np.linalg.eigh(sym)
        rebuilt = spectral_reconstruct(
            [float(v) for v in values], DenseArray.from_numpy(vectors)
        )
        assert np.max(np.abs(rebuilt.to_numpy() - sym)) <= 1e-10
