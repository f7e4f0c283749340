from hypothesis import given, settings

import pytest

from futamura.executor import run
from futamura.ir import Const, ParseError, parse_module, print_module, validate
from futamura.ir.cfg import DomTree
from futamura.minvm import module_text, shipped_module

from strategies import cfgs, modules

STRAIGHT = """\
memory 16

func @f(%a: i64) -> i64 {
block ^e:
  %x = iadd %a, 1
  %y = imul %x, %a
  return %y
}
"""


def test_parse_print_canonical():
    m = parse_module(STRAIGHT)
    assert print_module(m) == STRAIGHT
    inst = m.functions[0].blocks[0].insts[0]
    assert inst.op == "iadd" and inst.args == ("a", Const("i64", 1))


def test_straight_line_validates():
    assert validate(parse_module(STRAIGHT)) == []


def test_sibling_use_is_dominance_error():
    m = parse_module("""\
func @f(%c: i64) -> i64 {
block ^e:
  br_if %c, ^l, ^r
block ^l:
  %x = iadd %c, 1
  br ^j
block ^r:
  br ^j
block ^j:
  return %x
}
""")
    diags = validate(m)
    assert len(diags) == 1
    assert "dominat" in diags[0].message


def test_branch_arity_error():
    m = parse_module("""\
func @f(%c: i64) -> i64 {
block ^e:
  br ^j(%c, %c)
block ^j(%v: i64):
  return %v
}
""")
    diags = validate(m)
    assert len(diags) == 1
    assert "argument" in diags[0].message


@pytest.mark.parametrize("text", [
    "func @f() -> i64 {\nblock ^e:\n  %x = frobnicate 1\n  return %x\n}\n",
    "func @f() -> i64 {\nblock ^e:\n  br ^nowhere\n}\n",
    "func @f() -> i64 {\nblock ^e:\n  %x = iadd 1\n  return %x\n}\n",
])
def test_malformed_rejected(text):
    try:
        m = parse_module(text)
    except ParseError:
        return
    assert validate(m)


def test_unknown_function_call_flagged():
    m = parse_module("func @f() -> i64 {\nblock ^e:\n  %x = call @g(1)\n  return %x\n}\n")
    assert validate(m)


def test_shipped_min_module_matches_builder():
    assert shipped_module() == parse_module(module_text())
    assert validate(shipped_module()) == []


@settings(max_examples=200, deadline=None)
@given(modules())
def test_round_trip(m):
    assert validate(m) == []
    assert parse_module(print_module(m)) == m


@settings(max_examples=150, deadline=None)
@given(modules())
def test_validated_modules_never_read_undefined(m):
    # the pure-Python kernel traps on reads of unset slots
    res = run(m, "f", [3, 2**63 + 5], fuel=2000, backend="python")
    assert res.trap is None or "undefined" not in res.trap


def _brute_dominates(entry, succs, a, b):
    if a == b:
        return True
    seen = {entry} if entry != a else set()
    stack = list(seen)
    while stack:
        n = stack.pop()
        for s in succs[n]:
            if s != a and s not in seen:
                seen.add(s)
                stack.append(s)
    return b not in seen


def _reachable(entry, succs):
    seen, stack = {entry}, [entry]
    while stack:
        for s in succs[stack.pop()]:
            if s not in seen:
                seen.add(s)
                stack.append(s)
    return seen


@settings(max_examples=300, deadline=None)
@given(cfgs())
def test_dominance_matches_brute_force(cfg):
    entry, succs = cfg
    dt = DomTree(entry, succs)
    live = _reachable(entry, succs)
    for a in live:
        for b in live:
            assert dt.dominates(a, b) == _brute_dominates(entry, succs, a, b), (a, b)
    for a in live:
        for b in live:
            c = dt.lca(a, b)
            assert dt.dominates(c, a) and dt.dominates(c, b)
