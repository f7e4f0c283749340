"""The Min interpreter written in the IR, with specialization annotations.

Four variants come from two independent choices:

* ``plain`` keeps the register file in memory at ``[0, 2048)``; ``state``
  accesses registers through ``load_register``/``store_register``.
* ``backedges`` writes JMPNZ (and SWITCH) with one loop backedge per possible
  next pc; ``split`` computes the next pc once and makes the branch outcome a
  compile-time constant with ``specialized_value``.

Every interpreter has the signature ``(%prog: i64, %arg: i64) -> i64``: the
bytecode address and the initial accumulator.  HALT returns the accumulator.
"""
from __future__ import annotations

import functools
from importlib import resources

from ..ir import parse_module
from ..ir.types import Function, MemoryImage, Module
from ..specializer.request import RunTime, SpecializationRequest, SpecializedMemory
from .isa import MinProgram, assemble

VARIANTS = ("plain", "state")
JMPNZ_STYLES = ("backedges", "split")
REGISTER_BASE = 0
REGISTER_BYTES = 256 * 8
BYTECODE_BASE = 4096

_CASES = ("li", "lr", "sr", "add", "sub", "mul", "jmp", "jnz", "print", "halt", "switch")


def interp_name(variant: str = "plain", jmpnz: str = "backedges") -> str:
    if variant not in VARIANTS or jmpnz not in JMPNZ_STYLES:
        raise ValueError(f"unknown interpreter variant {variant}/{jmpnz}")
    return f"min_{variant}" + ("_split" if jmpnz == "split" else "")


def _fetch(p, k=1):
    """Load the word ``k`` slots after the opcode into ``%{p}.imm``."""
    return [
        f"%{p}.at = iadd %pc, {k}",
        f"%{p}.off = ishl %{p}.at, 3",
        f"%{p}.addr = iadd %prog, %{p}.off",
        f"%{p}.imm = load.64 %{p}.addr",
    ]


def _reg_read(p, variant):
    if variant == "state":
        return [f"%{p}.rv = intrinsic.load_register %{p}.imm"]
    return [f"%{p}.raddr = ishl %{p}.imm, 3", f"%{p}.rv = load.64 %{p}.raddr"]


def _block(label, lines, params=""):
    return [f"block ^{label}{params}:"] + [f"  {x}" for x in lines]


def interpreter_text(variant: str = "plain", jmpnz: str = "backedges") -> str:
    name = interp_name(variant, jmpnz)
    out = [f"func @{name}(%prog: i64, %arg: i64) -> i64 {{"]
    out += _block("entry", ["intrinsic.push_context 0", "br ^loop(0, %arg)"])
    cases = ", ".join(f"^{c}" for c in _CASES)
    out += _block("loop", [
        "%op.off = ishl %pc, 3",
        "%op.addr = iadd %prog, %op.off",
        "%op = load.64 %op.addr",
        f"br_table %op, [{cases}], ^bad",
    ], "(%pc: i64, %acc: i64)")

    # LOAD_IMMEDIATE
    out += _block("li", _fetch("li") + ["%li.npc = iadd %pc, 2",
                                         "intrinsic.update_context %li.npc",
                                         "br ^loop(%li.npc, %li.imm)"])
    # LOAD_REG
    out += _block("lr", _fetch("lr") + _reg_read("lr", variant) + [
        "%lr.npc = iadd %pc, 2",
        "intrinsic.update_context %lr.npc",
        "br ^loop(%lr.npc, %lr.rv)"])
    # STORE_REG
    if variant == "state":
        write = ["intrinsic.store_register %sr.imm, %acc"]
    else:
        write = ["%sr.raddr = ishl %sr.imm, 3", "store.64 %sr.raddr, %acc"]
    out += _block("sr", _fetch("sr") + write + [
        "%sr.npc = iadd %pc, 2",
        "intrinsic.update_context %sr.npc",
        "br ^loop(%sr.npc, %acc)"])
    # ADD / SUB / MUL
    for p, op in (("add", "iadd"), ("sub", "isub"), ("mul", "imul")):
        out += _block(p, _fetch(p) + _reg_read(p, variant) + [
            f"%{p}.acc = {op} %acc, %{p}.rv",
            f"%{p}.npc = iadd %pc, 2",
            f"intrinsic.update_context %{p}.npc",
            f"br ^loop(%{p}.npc, %{p}.acc)"])
    # JMP
    out += _block("jmp", _fetch("jmp") + ["intrinsic.update_context %jmp.imm",
                                           "br ^loop(%jmp.imm, %acc)"])
    # JMPNZ
    if jmpnz == "backedges":
        out += _block("jnz", _fetch("jnz") + ["%jnz.nz = icmp.ne %acc, 0",
                                               "br_if %jnz.nz, ^jnz.taken, ^jnz.fall"])
        out += _block("jnz.taken", ["intrinsic.update_context %jnz.imm",
                                    "br ^loop(%jnz.imm, %acc)"])
        out += _block("jnz.fall", ["%jnz.npc = iadd %pc, 2",
                                   "intrinsic.update_context %jnz.npc",
                                   "br ^loop(%jnz.npc, %acc)"])
    else:
        out += _block("jnz", _fetch("jnz") + [
            "%jnz.nz = icmp.ne %acc, 0",
            "%jnz.c = zext %jnz.nz",
            "%jnz.k = intrinsic.specialized_value %jnz.c, 0, 1",
            "%jnz.fall = iadd %pc, 2",
            "%jnz.npc = select %jnz.k, %jnz.imm, %jnz.fall",
            "intrinsic.update_context %jnz.npc",
            "br ^loop(%jnz.npc, %acc)"])
    # PRINT
    out += _block("print", ["print.i64 %acc",
                            "%print.npc = iadd %pc, 1",
                            "intrinsic.update_context %print.npc",
                            "br ^loop(%print.npc, %acc)"])
    # HALT
    out += _block("halt", ["intrinsic.pop_context", "return %acc"])
    # SWITCH t0 t1 t2 t3 (extension): pc = t[acc] if acc < 4 else pc + 5
    if jmpnz == "backedges":
        arms = ", ".join(f"^sw{k}" for k in range(4))
        out += _block("switch", [f"br_table %acc, [{arms}], ^sw.fall"])
        for k in range(4):
            p = f"sw{k}"
            out += _block(p, _fetch(p, k + 1) + [f"intrinsic.update_context %{p}.imm",
                                                  f"br ^loop(%{p}.imm, %acc)"])
        out += _block("sw.fall", ["%sw.npc = iadd %pc, 5",
                                  "intrinsic.update_context %sw.npc",
                                  "br ^loop(%sw.npc, %acc)"])
    else:
        out += _block("switch", [
            "%sw.small = icmp.lt_u %acc, 4",
            "%sw.sel = select %sw.small, %acc, 4",
            "%sw.k = intrinsic.specialized_value %sw.sel, 0, 4",
            "%sw.in = icmp.lt_u %sw.k, 4",
            "%sw.slot = select %sw.in, %sw.k, 0",
            "%sw.at1 = iadd %pc, 1",
            "%sw.at = iadd %sw.at1, %sw.slot",
            "%sw.off = ishl %sw.at, 3",
            "%sw.addr = iadd %prog, %sw.off",
            "%sw.t = load.64 %sw.addr",
            "%sw.fall = iadd %pc, 5",
            "%sw.npc = select %sw.in, %sw.t, %sw.fall",
            "intrinsic.update_context %sw.npc",
            "br ^loop(%sw.npc, %acc)"])
    out += _block("bad", ['trap "bad opcode"'])
    out.append("}")
    return "\n".join(out) + "\n"


def module_text() -> str:
    parts = [f"memory {BYTECODE_BASE}", ""]
    for variant in VARIANTS:
        for style in JMPNZ_STYLES:
            parts.append(interpreter_text(variant, style))
    return "\n".join(parts)


def build_min_interpreter(variant: str = "plain", jmpnz: str = "backedges") -> Function:
    m = parse_module(f"memory {BYTECODE_BASE}\n" + interpreter_text(variant, jmpnz))
    return m.functions[0]


@functools.lru_cache(maxsize=None)
def shipped_module() -> Module:
    """The interpreter module shipped with the package (no program loaded)."""
    text = resources.files(__package__).joinpath("min.ir").read_text()
    return parse_module(text)


def load_program(m: Module, program) -> Module:
    """Place ``program`` at :data:`BYTECODE_BASE` in a fresh memory image."""
    if isinstance(program, str):
        program = assemble(program)
    data = program.to_bytes()
    mem = MemoryImage(BYTECODE_BASE + len(data), ((BYTECODE_BASE, data),) if data else ())
    return Module(m.functions, mem, m.entry)


def min_module(program, variant: str = None, jmpnz: str = None) -> Module:
    """Shipped interpreters (or just one) with ``program`` loaded."""
    m = shipped_module()
    if variant is not None:
        m = Module((m.function(interp_name(variant, jmpnz or "backedges")),), m.memory)
    return load_program(m, program)


def min_request(program: MinProgram, variant: str = "plain", jmpnz: str = "backedges",
                output: str = None) -> SpecializationRequest:
    name = interp_name(variant, jmpnz)
    return SpecializationRequest(
        name, (SpecializedMemory(BYTECODE_BASE, 8 * len(program)), RunTime()),
        output or f"{name}_spec")


def bytecode_range(program: MinProgram):
    return (BYTECODE_BASE, 8 * len(program))
