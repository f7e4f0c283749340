"""End-to-end acceptance checks; each test is one numbered criterion."""
import random
import re
import time

import pytest

from futamura.executor import run
from futamura.ir import Const, parse_module, validate
from futamura.minvm import (
    BYTECODE_BASE, bytecode_range, interp_name, interpreter_text,
    load_program, min_request, shipped_module,
)
from futamura.minvm.bench import bench
from futamura.minvm.fuzz import fuzz, generate_program
from futamura.minvm.isa import assemble
from futamura.minvm.programs import SUITE, load, sum_program
from futamura.specializer import (
    CONTEXT_ONLY, NonConstContext, SpecializationError, SpecializationRequest,
    SpecializedConst, RunTime, polyfill_module, specialize_function,
)

from irutil import op_multiset

VARIANTS = ("plain", "state")
STYLES = ("backedges", "split")


def _spec(base, program, variant, style="backedges", mode="hsca"):
    return specialize_function(base, min_request(program, variant, style, "spec"), mode)


@pytest.mark.criterion(1, "bytecode erasure on the benchmark suite")
def test_bytecode_erasure(record_property):
    t0 = time.perf_counter()
    checked = 0
    for name in SUITE:
        p = load(name)
        base = load_program(shipped_module(), p)
        watch = {"bytecode": bytecode_range(p)}
        for variant in VARIANTS:
            for style in STYLES:
                f = _spec(base, p, variant, style).function
                for arg in (0, 3):
                    res = run(base.with_function(f), "spec", [BYTECODE_BASE, arg], watch)
                    assert res.returned, (name, variant, style)
                    assert res.metrics.loads_in_range["bytecode"] == 0, (name, variant, style)
                    checked += 1
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{len(SUITE)} programs, {checked} runs, {elapsed:.1f}s")
    assert elapsed < 10


@pytest.mark.criterion(2, "semantic preservation over 500 fuzzed programs")
def test_semantic_preservation(record_property):
    t0 = time.perf_counter()
    report = fuzz(seed=2024, cases=500)
    elapsed = time.perf_counter() - t0
    record_property("detail", f"{report.cases} programs, {report.checks} checks, {elapsed:.1f}s")
    assert report.ok, report.failures[0].format()
    assert report.cases == 500
    assert elapsed < 120


@pytest.mark.criterion(3, "dispatch-overhead proxy on sum-to-100000")
def test_dispatch_overhead(record_property):
    report = bench(sum_program(100_000), ("interp-plain", "specialized-plain"))
    interp, spec = report.row("interp-plain"), report.row("specialized-plain")
    assert interp.prints == spec.prints == (5000050000,)
    record_property("detail", f"{interp.insts} vs {spec.insts} insts, ratio {spec.ratio:.2f}")
    assert spec.ratio >= 1.5


@pytest.mark.criterion(4, "state intrinsics remove register memory traffic")
def test_state_elision(record_property):
    notes = []
    for name in SUITE:
        report = bench(load(name), ("specialized-plain", "specialized-state"))
        plain, state = report.row("specialized-plain"), report.row("specialized-state")
        assert plain.outcome == state.outcome and plain.prints == state.prints
        assert state.loads + state.stores < plain.loads + plain.stores, name
        notes.append(f"{name} {plain.loads + plain.stores}->{state.loads + state.stores}")
    p = load("add_only")
    f = _spec(load_program(shipped_module(), p), p, "state").function
    # no memory operations at all, so none that touch the register file
    mem_ops = [i for b in f.blocks for i in b.insts if i.op.startswith(("load.", "store."))]
    assert mem_ops == []
    record_property("detail", ", ".join(notes))


@pytest.mark.criterion(5, "without contexts specialization degenerates to a copy")
def test_moap_degeneration(record_property):
    p = load("sum")
    base = load_program(shipped_module(), p)
    name = interp_name("plain")
    stripped, _ = polyfill_module(base, CONTEXT_ONLY)
    generic = stripped.function(name)
    f = specialize_function(stripped, min_request(p, "plain", "backedges", "spec")).function
    # the request promises %prog is the bytecode address, so it may appear as an immediate
    assert op_multiset(f) == op_multiset(generic, {"prog": Const("i64", BYTECODE_BASE)})
    assert len(f.blocks) == len(generic.blocks)
    res = run(stripped.with_function(f), "spec", [BYTECODE_BASE, 0],
              {"bytecode": bytecode_range(p)})
    assert res.metrics.prints == [55]
    assert res.metrics.loads_in_range["bytecode"] > 0
    record_property("detail", f"{len(f.blocks)} blocks, bytecode loads "
                              f"{res.metrics.loads_in_range['bytecode']}")


def _scrambled_contexts(variant, style, rng):
    pool = [rng.randrange(4) for _ in range(3)] if rng.random() < 0.5 else None

    def pick(_):
        v = rng.choice(pool) if pool else rng.randrange(1 << 64)
        return f"intrinsic.update_context {v}"
    text = re.sub(r"intrinsic\.update_context %[\w.]+", pick, interpreter_text(variant, style))
    return parse_module(f"memory {BYTECODE_BASE}\n" + text)


@pytest.mark.criterion(6, "context values are not load-bearing for correctness")
def test_context_soundness(record_property):
    runs = 0
    for i in range(100):
        rng = random.Random(i)
        style = rng.choice(STYLES)
        mode = rng.choice(("hsca", "naive"))
        program = assemble(generate_program(606, i))
        base = load_program(_scrambled_contexts("plain", style, rng), program)
        poly, _ = polyfill_module(base)
        f = _spec(base, program, "plain", style, mode).function
        sm = base.with_function(f)
        for arg in (0, 1, rng.randrange(1 << 64)):
            want = run(poly, interp_name("plain", style), [BYTECODE_BASE, arg])
            assert run(sm, "spec", [BYTECODE_BASE, arg]).observable() == want.observable(), i
        runs += 1
    # the state variant needs a constant pc for its register indices; it must fail loudly
    rng = random.Random(0)
    program = assemble(generate_program(606, 0))
    base = load_program(_scrambled_contexts("state", "backedges", rng), program)
    with pytest.raises(SpecializationError, match="register index"):
        _spec(base, program, "state")
    record_property("detail", f"{runs} scrambled interpreters")


@pytest.mark.criterion(7, "HSCA repair adds no more parameters than naive repair")
def test_ssa_repair_quality(record_property):
    notes = []
    for name in SUITE:
        p = load(name)
        base = load_program(shipped_module(), p)
        for variant in VARIANTS:
            h = _spec(base, p, variant, mode="hsca")
            n = _spec(base, p, variant, mode="naive")
            assert validate(base.with_function(h.function)) == []
            assert validate(base.with_function(n.function)) == []
            assert h.repair.added_params <= n.repair.added_params, (name, variant)
            for arg in (0, 5):
                a = run(base.with_function(h.function), "spec", [BYTECODE_BASE, arg])
                b = run(base.with_function(n.function), "spec", [BYTECODE_BASE, arg])
                assert a.observable() == b.observable()
            if variant == "plain":
                notes.append(f"{name} {h.repair.added_params}/{n.repair.added_params}")
    record_property("detail", "hsca/naive params: " + ", ".join(notes))


@pytest.mark.criterion(8, "value-split JMPNZ matches the two-backedge JMPNZ")
def test_value_specialization(record_property):
    for name, base_value in (("switch4", 100), ("switch_ext", 200)):
        p = load(name)
        base = load_program(shipped_module(), p)
        for variant in VARIANTS:
            fb = _spec(base, p, variant, "backedges").function
            fs = _spec(base, p, variant, "split").function
            for sel in range(4):
                a = run(base.with_function(fb), "spec", [BYTECODE_BASE, sel])
                b = run(base.with_function(fs), "spec", [BYTECODE_BASE, sel])
                assert a.observable() == b.observable()
                assert a.metrics.prints == [base_value + sel]
    record_property("detail", "selectors 0-3 on switch4 and switch_ext, both variants")


NON_CONST = """\
memory 64
data 0 0000000000000000

func @vm(%prog: i64, %acc: i64) -> i64 {
block ^entry:
  intrinsic.push_context 0
  br ^loop(0)
block ^loop(%pc: i64):
  %off = ishl %pc, 3
  %addr = iadd %prog, %off
  %op = load.64 %addr
  br_table %op, [^jump], ^halt
block ^jump:
  intrinsic.update_context %acc
  br ^loop(%acc)
block ^halt:
  intrinsic.pop_context
  return %acc
}
"""


@pytest.mark.criterion(9, "termination within ceilings and loud non-constant contexts")
def test_termination_and_limits(record_property):
    worst = 0.0
    for name in SUITE + ("switch4", "switch_ext"):
        p = load(name)
        base = load_program(shipped_module(), p)
        for variant in VARIANTS:
            for style in STYLES:
                t0 = time.perf_counter()
                _spec(base, p, variant, style)
                worst = max(worst, time.perf_counter() - t0)
    assert worst < 5
    m = parse_module(NON_CONST)
    req = SpecializationRequest("vm", (SpecializedConst(0), RunTime()), "spec")
    t0 = time.perf_counter()
    with pytest.raises(NonConstContext):
        specialize_function(m, req)
    assert time.perf_counter() - t0 < 5
    record_property("detail", f"slowest specialization {worst * 1000:.0f} ms")
