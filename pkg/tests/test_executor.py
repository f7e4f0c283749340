import os
import subprocess
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from futamura.executor import KERNELS, LoweringError, eval_scalar, run
from futamura.executor import lower
from futamura.ir import Const, parse_module
from futamura.minvm import BYTECODE_BASE, bytecode_range, load_program, shipped_module
from futamura.minvm.programs import sum_program
from futamura.specializer import polyfill_module

from strategies import modules

I64 = "i64"


def c(v, ty=I64):
    return Const(ty, v)


def test_iadd_returns_five():
    m = parse_module("func @f() -> i64 {\nblock ^e:\n  %x = iadd 2, 3\n  return %x\n}\n")
    res = run(m, "f")
    assert res.outcome() == ("return", 5)
    assert res.metrics.insts_executed <= 2


@pytest.mark.parametrize("op,args,want", [
    ("imul", (3, 4), 12),
    ("iadd", (2**64 - 1, 1), 0),
    ("icmp.lt_u", (1, 2), 1),
    ("icmp.lt_s", (2**64 - 1, 0), 1),
    ("isub", (0, 1), 2**64 - 1),
    ("ishl", (1, 64), 1),
    ("ishr_u", (2**63, 63), 1),
])
def test_eval_scalar(op, args, want):
    ty = "i32" if op.startswith("icmp") else I64
    assert eval_scalar(op, [c(a) for a in args]) == c(want, ty)


def test_i32_wraps_at_32_bits():
    assert eval_scalar("iadd", [c(2**32 - 1, "i32"), c(1, "i32")]) == c(0, "i32")


def _sum_setup(n):
    prog = sum_program(n)
    base = load_program(shipped_module(), prog)
    poly, _ = polyfill_module(base)
    return prog, poly


def test_polyfilled_min_sum_prints_55():
    _, poly = _sum_setup(10)
    res = run(poly, "min_plain", [BYTECODE_BASE, 0])
    assert res.metrics.prints == [55]


def test_fuel_exhaustion_traps():
    _, poly = _sum_setup(1000)
    res = run(poly, "min_plain", [BYTECODE_BASE, 0], fuel=10)
    assert res.outcome() == ("trap", "out of fuel")


def test_raw_intrinsics_rejected():
    with pytest.raises(LoweringError):
        run(load_program(shipped_module(), sum_program(3)), "min_plain", [BYTECODE_BASE, 0])


def test_wrong_arity_rejected():
    _, poly = _sum_setup(3)
    with pytest.raises(ValueError):
        run(poly, "min_plain", [BYTECODE_BASE])


def test_out_of_bounds_traps():
    m = parse_module("memory 8\n\nfunc @f() -> i64 {\nblock ^e:\n  %x = load.64 4\n  return %x\n}\n")
    assert run(m, "f").trap is not None


def test_unknown_callee_is_rejected():
    m = parse_module("func @f() -> i64 {\nblock ^e:\n  %x = call @g(1)\n  return %x\n}\n")
    with pytest.raises(LoweringError):
        run(m, "f")


def test_watch_range_counts():
    prog, poly = _sum_setup(10)
    res = run(poly, "min_plain", [BYTECODE_BASE, 0], {"bytecode": bytecode_range(prog)})
    assert 0 < res.metrics.loads_in_range["bytecode"] <= res.metrics.loads


def test_kernel_opcode_tables_agree():
    assert lower.OPCODE_COUNT == 28
    assert lower.TRAP == lower.OPCODE_COUNT - 1
    for k in KERNELS.values():
        assert k.execute is not None
    if "cython" in KERNELS:
        assert KERNELS["cython"].OPCODE_COUNT == lower.OPCODE_COUNT


@pytest.mark.skipif("cython" not in KERNELS, reason="compiled kernel not built")
@settings(max_examples=150, deadline=None)
@given(modules(), st.integers(0, 2**64 - 1))
def test_compiled_kernel_matches_python(m, a):
    ref = run(m, "f", [a, 7], fuel=3000, backend="python")
    if ref.trap == "undefined SSA value":
        return
    got = run(m, "f", [a, 7], fuel=3000, backend="cython")
    assert got.observable() == ref.observable()
    assert got.final_memory == ref.final_memory
    assert (got.metrics.insts_executed, got.metrics.loads, got.metrics.stores) == \
        (ref.metrics.insts_executed, ref.metrics.loads, ref.metrics.stores)


@settings(max_examples=100, deadline=None)
@given(modules(), st.integers(0, 2**64 - 1))
def test_deterministic(m, a):
    assert run(m, "f", [a, 1], fuel=2000) == run(m, "f", [a, 1], fuel=2000)


@settings(max_examples=100, deadline=None)
@given(modules(), st.integers(0, 2**64 - 1), st.integers(1, 500))
def test_fuel_monotone(m, a, fuel):
    first = run(m, "f", [a, 1], fuel=fuel)
    if first.trap == "out of fuel":
        return
    more = run(m, "f", [a, 1], fuel=fuel * 10)
    assert more.observable() == first.observable()


def test_pure_python_fallback_selected_by_env():
    code = ("from futamura.executor import BACKEND, run\n"
            "from futamura.ir import parse_module\n"
            "m = parse_module('func @f() -> i64 {\\nblock ^e:\\n  return 7\\n}\\n')\n"
            "print(BACKEND, run(m, 'f').value)\n")
    env = dict(os.environ, FUTAMURA_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True)
    assert out.stdout.split() == ["python", "7"], out.stderr
