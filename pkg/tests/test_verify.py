from __future__ import annotations

import numpy as np

from moa import builtin_env, builtin_grid, materialize, materialize_stepwise, run_suites
from moa.verify import GRID_LEAF_SHAPES


def test_grid_covers_every_node_and_op():
    kinds = {type(expr).__name__ for expr in builtin_grid()}
    assert {"Leaf", "Outer", "TransposeG", "Reshape", "Kron"} <= kinds
    ops = {expr.op for expr in builtin_grid() if hasattr(expr, "op")}
    assert ops == {"mul", "add", "sub", "div"}


def test_builtin_env_is_deterministic():
    one = builtin_env(3)
    two = builtin_env(3)
    other = builtin_env(4)
    assert all(one[name] == two[name] for name in GRID_LEAF_SHAPES)
    assert any(one[name] != other[name] for name in GRID_LEAF_SHAPES)


def test_stepwise_oracle_agrees_with_materialize():
    env = builtin_env(0)
    for expr in builtin_grid():
        ours = materialize(expr, env).to_numpy()
        theirs = materialize_stepwise(expr, env)
        assert np.array_equal(ours, theirs)


def test_all_suites_pass():
    results = run_suites(["dnf", "permute", "onf", "dyadics"], seed=1)
    for result in results:
        assert result.failed == 0, result.failures[:3]
        assert result.passed > 0
