import struct

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from futamura.absint import UNKNOWN, ConstRanges, leq, meet, transfer
from futamura.executor import eval_scalar, run
from futamura.ir import Const, MemoryImage, parse_module
from futamura.ir.opcodes import BINARY, ICMP, LOADS

I64, I32 = "i64", "i32"


def c(v, ty=I64):
    return Const(ty, v)


def test_examples():
    assert transfer("iadd", [c(2), c(3)]) == c(5)
    assert transfer("iadd", [c(2), UNKNOWN]) is UNKNOWN
    mem = MemoryImage(64, ((16, struct.pack("<Q", 7)),))
    ranges = ConstRanges(((16, 8),))
    assert transfer("load.64", [c(16)], ranges, mem) == c(7)
    assert transfer("load.64", [c(32)], ranges, mem) is UNKNOWN


def test_straddling_load_does_not_fold():
    mem = MemoryImage(64, ((16, bytes(range(1, 17))),))
    ranges = ConstRanges(((16, 8),))
    assert transfer("load.64", [c(12)], ranges, mem) is UNKNOWN
    assert transfer("load.64", [c(20)], ranges, mem) is UNKNOWN
    assert transfer("load.32", [c(20)], ranges, mem) == c(0x08070605, I32)


def test_side_effects_are_unknown():
    assert transfer("store.64", [c(0), c(1)]) is UNKNOWN
    assert transfer("print.i64", [c(1)]) is UNKNOWN
    assert transfer("call", [c(1)]) is UNKNOWN


def test_meet_examples():
    assert meet(c(4), c(4)) == c(4)
    assert meet(c(4), c(5)) is UNKNOWN
    assert meet(UNKNOWN, c(4)) is UNKNOWN
    assert meet(c(4, I32), c(4, I64)) is UNKNOWN


def test_select_folds_on_const_condition_or_equal_arms():
    assert transfer("select", [c(1, I32), c(7), UNKNOWN]) == c(7)
    assert transfer("select", [c(0, I32), c(7), UNKNOWN]) is UNKNOWN
    assert transfer("select", [UNKNOWN, c(7), c(7)]) == c(7)
    assert transfer("select", [UNKNOWN, c(7), c(8)]) is UNKNOWN


abstract = st.one_of(st.just(UNKNOWN), st.integers(0, 2**64 - 1).map(c),
                     st.sampled_from([0, 1, 63, 64, 2**63]).map(c))
lattice = st.one_of(st.just(UNKNOWN), st.integers(0, 3).map(c))


@settings(max_examples=500)
@given(lattice, lattice, lattice)
def test_meet_laws(a, b, d):
    assert meet(a, b) == meet(b, a)
    assert meet(meet(a, b), d) == meet(a, meet(b, d))
    assert meet(a, a) == a
    assert leq(a, meet(a, b)) and leq(b, meet(a, b))


def _concretize(a, data):
    return a if a is not UNKNOWN else c(data.draw(st.integers(0, 2**64 - 1)))


pure_ops = st.sampled_from(BINARY + ICMP + ("select",))


@settings(max_examples=800)
@given(pure_ops, st.lists(abstract, min_size=3, max_size=3), st.data())
def test_transfer_sound(op, args, data):
    args = args[:3 if op == "select" else 2]
    out = transfer(op, args)
    if out is UNKNOWN:
        return
    for _ in range(5):
        concrete = [_concretize(a, data) for a in args]
        assert eval_scalar(op, concrete) == out


@settings(max_examples=800)
@given(pure_ops, st.lists(abstract, min_size=3, max_size=3), st.data())
def test_transfer_monotone(op, args, data):
    args = args[:3 if op == "select" else 2]
    lower = [_concretize(a, data) if data.draw(st.booleans()) else a for a in args]
    assert leq(transfer(op, lower), transfer(op, args))


@settings(max_examples=300, deadline=None)
@given(st.binary(min_size=32, max_size=32), st.integers(0, 24), st.integers(1, 24),
       st.sampled_from(sorted(LOADS)), st.integers(0, 31))
def test_fold_load_matches_executor(data, start, length, op, addr):
    assume(start + length <= 32)
    mem = MemoryImage(32, ((0, data),))
    out = transfer(op, [c(addr)], ConstRanges(((start, length),)), mem)
    if out is UNKNOWN:
        return
    ty = LOADS[op][1]
    m = parse_module(f"memory 32\ndata 0 {data.hex()}\n\n"
                     f"func @f() -> {ty} {{\nblock ^e:\n  %x = {op} {addr}\n  return %x\n}}\n")
    assert run(m, "f").value == out.value
    assert out.ty == ty
