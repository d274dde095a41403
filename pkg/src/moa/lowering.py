"""Lowering expressions to executable loop plans.

A loop plan is the operational form of an expression: a nest of counted
loops (start/stop/stride/count), a body that reads input buffers at affine
offsets in the loop variables, and a single affine row-major write into the
output buffer.  Lowering never materializes intermediates: structural nodes
(outer, transpose, reshape, kron) are compiled away into the offset algebra.

The algorithm tracks one "digit" per surviving unit of iteration.  A leaf
axis starts as one digit carrying that axis's row-major stride into the
leaf's buffer.  Outer concatenates digit groups, transpose permutes them,
and reshape re-slices the digit stream into new axis groups, splitting a
digit only when the split is exact.  An access that cannot be expressed
affinely this way raises LoweringError.

After the walk, adjacent digits whose read coefficients chain (outer
coefficient equals inner coefficient times inner extent, for every read)
coalesce into a single longer loop.  The plan's virtual processor count must
divide the outermost coalesced loop extent; the outer loop is then split so
its leading dimension equals the processor count and each processor owns one
contiguous slab of the output.
"""

from __future__ import annotations

import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Union

import numpy as np

from .arrays import DenseArray, counters
from .errors import LoweringError, PartitionError, PlanError, ShapeError
from .exprs import ExprNode, Kron, Leaf, Outer, Reshape, TransposeG, apply_op
from .shapes import Shape, as_shape, pi

_LOOP_NAMES = "pqrstuvw"


def _loop_name(k: int) -> str:
    return _LOOP_NAMES[k] if k < len(_LOOP_NAMES) else f"x{k}"


# --- plan data model ---------------------------------------------------------

@dataclass(frozen=True)
class Affine:
    """Sum of coeff*var terms plus a constant, in loop order."""

    terms: tuple[tuple[str, int], ...]
    const: int = 0

    def evaluate(self, bindings: dict[str, int]) -> int:
        total = self.const
        for var, coeff in self.terms:
            total += coeff * bindings[var]
        return total


@dataclass(frozen=True)
class FlatRead:
    buffer: str
    offset: Affine


@dataclass(frozen=True)
class OpExpr:
    op: str
    left: "BodyExpr"
    right: "BodyExpr"


BodyExpr = Union[FlatRead, OpExpr]


@dataclass(frozen=True)
class FlatWrite:
    buffer: str
    offset: Affine


@dataclass(frozen=True)
class LoopSpec:
    var: str
    start: int
    stop: int
    stride: int
    count: int

    def __post_init__(self) -> None:
        if self.stride <= 0 or self.start < 0 or self.stop < self.start:
            raise PlanError(
                f"loop {self.var}: bad range start={self.start} "
                f"stop={self.stop} stride={self.stride}"
            )
        expected = len(range(self.start, self.stop, self.stride))
        if self.count != expected:
            raise PlanError(
                f"loop {self.var}: count {self.count} does not match "
                f"range({self.start}, {self.stop}, {self.stride}) = {expected}"
            )

    def values(self) -> range:
        return range(self.start, self.stop, self.stride)


def _body_reads(body: BodyExpr):
    if isinstance(body, FlatRead):
        yield body
    else:
        yield from _body_reads(body.left)
        yield from _body_reads(body.right)


@dataclass(frozen=True)
class LoopPlan:
    procs: int
    out_shape: Shape
    loops: tuple[LoopSpec, ...]
    write: FlatWrite
    body: BodyExpr

    def __post_init__(self) -> None:
        object.__setattr__(self, "out_shape", as_shape(self.out_shape))
        if not self.loops:
            raise PlanError("a loop plan needs at least one loop")
        names = [loop.var for loop in self.loops]
        if len(set(names)) != len(names):
            raise PlanError(f"duplicate loop variables: {names}")
        iterations = 1
        for loop in self.loops:
            iterations *= loop.count
        if iterations != pi(self.out_shape):
            raise PlanError(
                f"loop nest runs {iterations} iterations, output shape "
                f"{self.out_shape} has {pi(self.out_shape)} elements"
            )
        if self.procs < 1:
            raise PlanError(f"procs must be >= 1, got {self.procs}")
        if self.loops[0].count % self.procs != 0:
            raise PlanError(
                f"procs {self.procs} does not divide the outer loop count "
                f"{self.loops[0].count}"
            )
        if self.write.buffer != "out":
            raise PlanError(f'write buffer must be "out", got {self.write.buffer!r}')
        known = set(names)
        for affine in [self.write.offset] + [r.offset for r in _body_reads(self.body)]:
            for var, _ in affine.terms:
                if var not in known:
                    raise PlanError(f"offset references unknown loop variable {var!r}")


# --- symbolic digits ---------------------------------------------------------

@dataclass
class _Digit:
    """One unit of iteration: an extent plus, per leaf occurrence, the
    coefficient its value contributes to that occurrence's read offset."""

    extent: int
    coeffs: dict[int, int] = field(default_factory=dict)


@dataclass
class _Build:
    """Result of walking one expression node."""

    axes: list[list[_Digit]]  # one digit group per output axis, 1-extents dropped
    body: Any  # ("read", occ) or ("op", op, left, right)


def _split_digit(digit: _Digit, head: int) -> tuple[_Digit, _Digit]:
    """Split extent e into (head, e // head); head must divide e.

    The original digit value v factors as v = hi * (e // head) + lo, so the
    high digit inherits each coefficient scaled by the low extent.
    """
    low = digit.extent // head
    hi = _Digit(head, {occ: c * low for occ, c in digit.coeffs.items()})
    lo = _Digit(low, dict(digit.coeffs))
    return hi, lo


def _regroup(stream: list[_Digit], extents: Shape) -> list[list[_Digit]]:
    """Re-slice a digit stream into groups whose extents multiply to the
    target axis extents, splitting digits when the split is exact.

    The stream coalesces first: adjacent digits whose reads chain act as one
    contiguous run, so reshapes of contiguous data always stay affine and
    only genuinely interleaved layouts can fail."""
    queue = _coalesce(stream)
    groups: list[list[_Digit]] = []
    for extent in extents:
        group: list[_Digit] = []
        acc = 1
        while acc < extent:
            if not queue:
                raise LoweringError("reshape regrouping exhausted digits")
            digit = queue.pop(0)
            if acc * digit.extent <= extent:
                group.append(digit)
                acc *= digit.extent
            else:
                head, rem = divmod(extent, acc)
                if rem != 0:
                    raise LoweringError(
                        f"reshape to extent {extent} is not affine over the "
                        f"underlying digit radices"
                    )
                if digit.extent % head != 0:
                    raise LoweringError(
                        f"reshape needs to split a digit of extent {digit.extent} "
                        f"by {head}, which is not exact; access is not affine"
                    )
                hi, lo = _split_digit(digit, head)
                group.append(hi)
                acc *= head
                queue.insert(0, lo)
        if acc != extent:
            raise LoweringError(
                f"reshape group reached extent {acc}, target was {extent}; "
                f"access is not affine"
            )
        groups.append(group)
    if queue:
        raise LoweringError("reshape regrouping left digits unconsumed")
    return groups


def _build(expr: ExprNode, counter: itertools.count) -> tuple[_Build, dict[int, str]]:
    """Walk the expression; return digit groups, a body template keyed by
    leaf occurrence, and the occurrence-to-leaf-name map."""
    if isinstance(expr, Leaf):
        occ = next(counter)
        stride = 1
        rev: list[list[_Digit]] = []
        for extent in reversed(expr.shape):
            rev.append([_Digit(extent, {occ: stride})] if extent > 1 else [])
            stride *= extent
        return _Build(list(reversed(rev)), ("read", occ)), {occ: expr.name}

    if isinstance(expr, Outer):
        left, lnames = _build(expr.left, counter)
        right, rnames = _build(expr.right, counter)
        return _Build(left.axes + right.axes, ("op", expr.op, left.body, right.body)), {
            **lnames,
            **rnames,
        }

    if isinstance(expr, TransposeG):
        child, names = _build(expr.child, counter)
        return _Build([child.axes[k] for k in expr.perm], child.body), names

    if isinstance(expr, Reshape):
        child, names = _build(expr.child, counter)
        stream = [digit for group in child.axes for digit in group]
        return _Build(_regroup(stream, expr.shape), child.body), names

    if isinstance(expr, Kron):
        return _build(expr.desugared, counter)

    raise LoweringError(f"cannot lower node {type(expr).__name__}")


def _coalesce(digits: list[_Digit]) -> list[_Digit]:
    """Merge adjacent digits whose coefficients chain for every read.

    Digits u (outer) and v (inner) merge when coeff_u == coeff_v * extent_v
    for each leaf occurrence, both treated as 0 when absent.  The write side
    always chains, because write coefficients are suffix products of the
    digit extents by construction.
    """
    merged = list(digits)
    k = 0
    while k + 1 < len(merged):
        u, v = merged[k], merged[k + 1]
        occs = set(u.coeffs) | set(v.coeffs)
        if all(u.coeffs.get(o, 0) == v.coeffs.get(o, 0) * v.extent for o in occs):
            merged[k : k + 2] = [_Digit(u.extent * v.extent, dict(v.coeffs))]
            if k > 0:
                k -= 1  # the new digit may chain with its left neighbor
        else:
            k += 1
    return merged


def _nontrivial_divisors(n: int) -> tuple[int, ...]:
    return tuple(d for d in range(2, n + 1) if n % d == 0)


def buffer_name(leaf_name: str) -> str:
    """Flat-buffer naming convention: leaf A binds buffer avec."""
    return leaf_name.lower() + "vec"


def _leaf_shapes(expr: ExprNode, out: dict[str, Shape]) -> None:
    if isinstance(expr, Leaf):
        seen = out.get(expr.name)
        if seen is not None and seen != expr.shape:
            raise ShapeError(
                f"leaf {expr.name!r} used with conflicting shapes {seen} and {expr.shape}"
            )
        out[expr.name] = expr.shape
    elif isinstance(expr, (Outer, Kron)):
        _leaf_shapes(expr.left, out)
        _leaf_shapes(expr.right, out)
    elif isinstance(expr, (TransposeG, Reshape)):
        _leaf_shapes(expr.child, out)


def lower(expr: ExprNode, procs: int = 1) -> LoopPlan:
    """Compile an expression to a loop plan for ``procs`` virtual processors.

    Raises PartitionError when procs is neither 1 nor a divisor of the
    outermost loop extent; the error carries the valid nontrivial counts.
    """
    out_shape = expr.shape
    if pi(out_shape) == 0:
        raise LoweringError("zero-element output has no loop plan")
    if procs < 1:
        raise PartitionError(f"procs must be >= 1, got {procs}")

    shapes: dict[str, Shape] = {}
    _leaf_shapes(expr, shapes)
    buffers: dict[str, str] = {}
    for name in shapes:
        bname = buffer_name(name)
        if bname in buffers.values():
            raise LoweringError(
                f"leaf names {sorted(shapes)} collide under buffer naming"
            )
        buffers[name] = bname

    built, occ_names = _build(expr, itertools.count())
    digits = _coalesce([digit for group in built.axes for digit in group])

    outer_extent = digits[0].extent if digits else 1
    if procs != 1:
        if outer_extent % procs != 0:
            raise PartitionError(
                f"procs {procs} does not divide the outer loop extent "
                f"{outer_extent}; valid processor counts: "
                f"{', '.join(map(str, _nontrivial_divisors(outer_extent))) or '1'}",
                valid=_nontrivial_divisors(outer_extent),
            )
        if procs < outer_extent:
            hi, lo = _split_digit(digits[0], procs)
            digits[0:1] = [hi, lo]

    if not digits:
        digits = [_Digit(1, {})]

    names = [_loop_name(k) for k in range(len(digits))]
    loops = tuple(
        LoopSpec(var=name, start=0, stop=d.extent, stride=1, count=d.extent)
        for name, d in zip(names, digits)
    )

    suffix = [1] * len(digits)
    for k in range(len(digits) - 2, -1, -1):
        suffix[k] = suffix[k + 1] * digits[k + 1].extent
    write = FlatWrite(
        "out",
        Affine(tuple((names[k], suffix[k]) for k in range(len(digits))), 0),
    )

    def realize(template: Any) -> BodyExpr:
        if template[0] == "read":
            occ = template[1]
            terms = tuple(
                (names[k], digits[k].coeffs[occ])
                for k in range(len(digits))
                if digits[k].coeffs.get(occ, 0) != 0
            )
            return FlatRead(buffers[occ_names[occ]], Affine(terms, 0))
        _, op, left, right = template
        return OpExpr(op, realize(left), realize(right))

    return LoopPlan(
        procs=procs,
        out_shape=out_shape,
        loops=loops,
        write=write,
        body=realize(built.body),
    )


# --- execution ---------------------------------------------------------------

def flatten_operands(env: dict[str, DenseArray]) -> dict[str, np.ndarray]:
    """Bind leaf arrays to the flat buffers a plan reads.

    Leaf A becomes buffer avec, holding A's elements in row-major order.
    """
    buffers: dict[str, np.ndarray] = {}
    for name, array in env.items():
        bname = buffer_name(name)
        if bname in buffers:
            raise LoweringError(f"operand names {sorted(env)} collide under buffer naming")
        buffers[bname] = array.to_numpy().reshape(-1)
    return buffers


def _run_slice(
    plan: LoopPlan,
    buffers: dict[str, np.ndarray],
    out: np.ndarray,
    outer_values: range,
) -> None:
    inner = [loop.values() for loop in plan.loops[1:]]
    names = [loop.var for loop in plan.loops]
    for outer in outer_values:
        for rest in itertools.product(*inner):
            bindings = dict(zip(names, (outer, *rest)))
            value = _eval_body(plan.body, buffers, bindings)
            offset = plan.write.offset.evaluate(bindings)
            if not 0 <= offset < out.size:
                raise PlanError(f"write offset {offset} out of range [0, {out.size})")
            out[offset] = value


def _eval_body(
    body: BodyExpr, buffers: dict[str, np.ndarray], bindings: dict[str, int]
) -> float:
    if isinstance(body, FlatRead):
        try:
            buf = buffers[body.buffer]
        except KeyError:
            raise PlanError(f"plan reads unbound buffer {body.buffer!r}") from None
        offset = body.offset.evaluate(bindings)
        if not 0 <= offset < buf.size:
            raise PlanError(
                f"read offset {offset} out of range [0, {buf.size}) "
                f"for buffer {body.buffer!r}"
            )
        return float(buf[offset])
    return apply_op(
        body.op,
        _eval_body(body.left, buffers, bindings),
        _eval_body(body.right, buffers, bindings),
    )


def execute_plan(
    plan: LoopPlan, buffers: dict[str, np.ndarray], parallel: bool = False
) -> DenseArray:
    """Run a plan over flat input buffers and return the output array.

    The outer loop's iterations are dealt to the plan's virtual processors
    in contiguous chunks.  Sequential execution runs the processors in
    order; parallel execution runs them on a thread pool.  Both fill
    disjoint slabs of the output, so results are identical bit for bit.
    """
    out = np.zeros(pi(plan.out_shape), dtype=np.float64)
    outer = plan.loops[0].values()
    chunk = plan.loops[0].count // plan.procs
    slices = [outer[k * chunk : (k + 1) * chunk] for k in range(plan.procs)]
    if parallel and plan.procs > 1:
        with ThreadPoolExecutor(max_workers=plan.procs) as pool:
            futures = [
                pool.submit(_run_slice, plan, buffers, out, sl) for sl in slices
            ]
            for future in futures:
                future.result()
    else:
        for sl in slices:
            _run_slice(plan, buffers, out, sl)
    out.setflags(write=False)
    result = DenseArray._from_buffer(plan.out_shape, out)
    counters.array_allocations += 1
    return result


# --- serialization -----------------------------------------------------------

def _affine_to_obj(affine: Affine) -> dict:
    return {
        "terms": [{"var": var, "coeff": coeff} for var, coeff in affine.terms],
        "const": affine.const,
    }


def _body_to_obj(body: BodyExpr) -> dict:
    if isinstance(body, FlatRead):
        return {"buffer": body.buffer, "offset": _affine_to_obj(body.offset)}
    return {"op": body.op, "args": [_body_to_obj(body.left), _body_to_obj(body.right)]}


def plan_to_json(plan: LoopPlan) -> str:
    """Canonical JSON for a plan: sorted keys, two-space indent."""
    doc = {
        "procs": plan.procs,
        "out_shape": list(plan.out_shape),
        "loops": [
            {
                "var": loop.var,
                "start": loop.start,
                "stop": loop.stop,
                "stride": loop.stride,
                "count": loop.count,
            }
            for loop in plan.loops
        ],
        "body": {
            "write": {
                "buffer": plan.write.buffer,
                "offset": _affine_to_obj(plan.write.offset),
            },
            "expr": _body_to_obj(plan.body),
        },
    }
    return json.dumps(doc, sort_keys=True, indent=2)


def _affine_from_obj(obj: dict) -> Affine:
    try:
        terms = tuple((t["var"], int(t["coeff"])) for t in obj["terms"])
        return Affine(terms, int(obj["const"]))
    except (KeyError, TypeError) as exc:
        raise PlanError(f"bad affine offset object: {obj!r}") from exc


def _body_from_obj(obj: dict) -> BodyExpr:
    if "buffer" in obj:
        return FlatRead(obj["buffer"], _affine_from_obj(obj["offset"]))
    if "op" in obj:
        args = obj.get("args", [])
        if len(args) != 2:
            raise PlanError(f"body op node needs 2 args, got {len(args)}")
        return OpExpr(obj["op"], _body_from_obj(args[0]), _body_from_obj(args[1]))
    raise PlanError(f"unrecognized body node: {obj!r}")


def plan_from_json(text: str) -> LoopPlan:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PlanError(f"invalid plan JSON: {exc}") from exc
    try:
        loops = tuple(
            LoopSpec(
                var=l["var"],
                start=int(l["start"]),
                stop=int(l["stop"]),
                stride=int(l["stride"]),
                count=int(l["count"]),
            )
            for l in doc["loops"]
        )
        write_obj = doc["body"]["write"]
        plan = LoopPlan(
            procs=int(doc["procs"]),
            out_shape=as_shape(int(e) for e in doc["out_shape"]),
            loops=loops,
            write=FlatWrite(write_obj["buffer"], _affine_from_obj(write_obj["offset"])),
            body=_body_from_obj(doc["body"]["expr"]),
        )
    except (KeyError, TypeError) as exc:
        raise PlanError(f"plan JSON missing or malformed field: {exc}") from exc
    return plan
