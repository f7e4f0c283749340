"""Lower intrinsics to plain IR so an annotated function runs in the executor.

Context intrinsics, ``assert_const`` and ``flush`` disappear.  Registers live
in a 256-slot scratch region appended to module memory.  Local and stack
intrinsics become eager 64-bit loads and stores at their addresses, and
``specialized_value`` is the identity on its first operand.
"""
from __future__ import annotations

from ..ir import opcodes
from ..ir.types import I64, Block, Br, BrIf, BrTable, Const, Function, Inst, MemoryImage, Module, Return, Target

REGISTER_SLOTS = 256
SCRATCH_BYTES = REGISTER_SLOTS * 8

CONTEXT_ONLY = frozenset(opcodes.CONTEXT_INTRINSICS)
ALL = frozenset(opcodes.INTRINSICS)


class PolyfillError(Exception):
    pass


def _subst(a, alias):
    while not isinstance(a, Const) and a in alias:
        a = alias[a]
    return a


def _reg_addr(idx, base, res, insts):
    if isinstance(idx, Const):
        return Const(I64, base + 8 * idx.value)
    off = f"{res}.pf.off"
    addr = f"{res}.pf.addr"
    insts.append(Inst(off, "ishl", (idx, Const(I64, 3))))
    insts.append(Inst(addr, "iadd", (off, Const(I64, base))))
    return addr


def polyfill_intrinsics(f: Function, scratch_base: int = None, kinds=ALL) -> Function:
    """Replace the intrinsics named in ``kinds`` in ``f``.

    ``scratch_base`` is the address of the register scratch region and is
    required only when register intrinsics are lowered.
    """
    alias = {}
    blocks = []
    counter = 0
    for b in f.blocks:
        insts = []
        for inst in b.insts:
            name = opcodes.intrinsic_name(inst.op)
            args = tuple(_subst(a, alias) for a in inst.args)
            if name is not None and name not in opcodes.INTRINSICS:
                raise PolyfillError(f"unknown intrinsic {inst.op}")
            if name is None or name not in kinds:
                insts.append(Inst(inst.result, inst.op, args, inst.callee))
                continue
            res = inst.result
            if name in CONTEXT_ONLY or name in ("assert_const", "flush"):
                continue
            if name == "specialized_value":
                alias[res] = args[0]
            elif name in ("load_register", "store_register"):
                if scratch_base is None:
                    raise PolyfillError("register intrinsics need a scratch region")
                tag = res if res is not None else f"{b.label}.reg{counter}"
                counter += 1
                addr = _reg_addr(args[0], scratch_base, tag, insts)
                if name == "load_register":
                    insts.append(Inst(res, "load.64", (addr,)))
                else:
                    insts.append(Inst(None, "store.64", (addr, args[1])))
            elif name in ("local_read", "stack_read"):
                insts.append(Inst(res, "load.64", (args[1],)))
            elif name == "stack_pop":
                insts.append(Inst(res, "load.64", (args[0],)))
            elif name in ("local_write", "stack_write"):
                insts.append(Inst(None, "store.64", (args[1], args[2])))
            elif name == "stack_push":
                insts.append(Inst(None, "store.64", (args[0], args[1])))
            else:
                raise PolyfillError(f"no polyfill for {inst.op}")
        blocks.append((b, insts))
    out = []
    for b, insts in blocks:
        # aliases may be used before their textual definition, so resolve late
        insts = [Inst(i.result, i.op, tuple(_subst(a, alias) for a in i.args), i.callee)
                 for i in insts]
        out.append(Block(b.label, b.params, tuple(insts), _subst_term(b.term, alias)))
    return Function(f.name, f.params, f.result, tuple(out), f.entry)


def _subst_term(t, alias):
    def tgt(x):
        return Target(x.label, tuple(_subst(a, alias) for a in x.args))

    if isinstance(t, Br):
        return Br(tgt(t.target))
    if isinstance(t, BrIf):
        return BrIf(_subst(t.cond, alias), tgt(t.then), tgt(t.else_))
    if isinstance(t, BrTable):
        return BrTable(_subst(t.selector, alias), tuple(tgt(c) for c in t.cases), tgt(t.default))
    if isinstance(t, Return) and t.value is not None:
        return Return(_subst(t.value, alias))
    return t


def _uses_registers(f: Function) -> bool:
    return any(opcodes.intrinsic_name(i.op) in ("load_register", "store_register")
               for b in f.blocks for i in b.insts)


def polyfill_module(m: Module, kinds=ALL) -> tuple:
    """Polyfill every function; returns ``(module, scratch_base or None)``.

    The scratch region is appended only when some function uses register
    intrinsics (and ``kinds`` lowers them).
    """
    need = "load_register" in kinds and any(_uses_registers(f) for f in m.functions)
    base = None
    memory = m.memory
    if need:
        base = (m.memory.size + 7) // 8 * 8
        memory = MemoryImage(base + SCRATCH_BYTES, m.memory.init)
    funcs = tuple(polyfill_intrinsics(f, base, kinds) for f in m.functions)
    return Module(funcs, memory, m.entry), base
