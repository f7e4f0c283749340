import pytest

from futamura.executor import run
from futamura.ir import Block, Const, Function, Inst, Return, parse_module, validate
from futamura.specializer import CONTEXT_ONLY, PolyfillError, polyfill_intrinsics, polyfill_module

from irutil import canonical


def test_context_only_function_loses_just_the_markers():
    annotated = parse_module("""\
func @f(%x: i64) -> i64 {
block ^e:
  intrinsic.push_context 0
  %y = iadd %x, 1
  intrinsic.update_context 3
  br ^n(%y)
block ^n(%z: i64):
  intrinsic.pop_context
  return %z
}
""").functions[0]
    plain = parse_module("""\
func @f(%x: i64) -> i64 {
block ^e:
  %y = iadd %x, 1
  br ^n(%y)
block ^n(%z: i64):
  return %z
}
""").functions[0]
    assert polyfill_intrinsics(annotated) == plain
    assert polyfill_intrinsics(annotated, kinds=CONTEXT_ONLY) == plain


def test_stack_push_pop_become_store_then_load():
    f = parse_module("""\
func @f(%v: i64) -> i64 {
block ^e:
  intrinsic.stack_push 8, %v
  %x = intrinsic.stack_pop 8
  return %x
}
""").functions[0]
    g = polyfill_intrinsics(f)
    ops = [(i.op, i.args[0]) for i in g.blocks[0].insts]
    assert [o for o, _ in ops] == ["store.64", "load.64"]
    assert ops[0][1] == ops[1][1]


def test_register_scratch_region_is_appended():
    m = parse_module("""\
memory 12

func @f(%v: i64) -> i64 {
block ^e:
  intrinsic.store_register 255, %v
  %x = intrinsic.load_register 255
  %y = intrinsic.load_register 0
  %s = iadd %x, %y
  return %s
}
""")
    pm, base = polyfill_module(m)
    assert base == 16 and pm.memory.size == 16 + 256 * 8
    assert validate(pm) == []
    res = run(pm, "f", [41])
    assert res.value == 41 and res.metrics.stores == 1


def test_split_polyfill_is_identity():
    m = parse_module("""\
func @f(%v: i64) -> i64 {
block ^e:
  %k = intrinsic.specialized_value %v, 0, 3
  return %k
}
""")
    pm, _ = polyfill_module(m)
    assert run(pm, "f", [2]).value == 2
    assert canonical(pm.functions[0])[0][3] == ("return", "arg0")


def test_unknown_intrinsic_rejected():
    block = Block("e", (), (Inst(None, "intrinsic.bogus", ()),), Return(Const("i64", 0)))
    f = Function("f", (), "i64", (block,))
    with pytest.raises(PolyfillError):
        polyfill_intrinsics(f)
