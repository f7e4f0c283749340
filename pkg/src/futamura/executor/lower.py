"""Lowering of an IR module to the flat word code run by the kernels.

Every SSA value of a function gets a frame slot; immediates get
pre-initialised constant slots.  Block parameters are written by the edge
records of the branch that enters the block (parallel copy).

Instruction layouts (one int per word)::

    ADD..LTS  op dst a b bits
    SELECT    op dst c a b
    MOV/TRUNC op dst a
    LOADn     op dst addr
    STOREn    op addr val
    PRINT     op v
    CALL      op dst fidx nargs arg...
    BR        op edge
    BRIF      op cond edge_then edge_else
    BRTABLE   op sel n edge... edge_default
    RET       op v            (v = -1: no value)
    TRAP      op msg_index

    edge:     target_pc n src... dst...
"""
from __future__ import annotations

from array import array

from ..ir import opcodes
from ..ir.types import BITS, Br, BrIf, BrTable, Const, Return, Trap
from ..ir.validate import module_signatures, value_types

(ADD, SUB, MUL, AND, OR, XOR, SHL, SHR, EQ, NE, LTU, LTS, SELECT, MOV, TRUNC,
 LOAD8, LOAD32, LOAD64, STORE8, STORE32, STORE64, PRINT, CALL, BR, BRIF,
 BRTABLE, RET, TRAP) = range(28)

OPCODE_COUNT = 28

_BIN = {
    "iadd": ADD, "isub": SUB, "imul": MUL, "iand": AND, "ior": OR, "ixor": XOR,
    "ishl": SHL, "ishr_u": SHR, "icmp.eq": EQ, "icmp.ne": NE, "icmp.lt_u": LTU,
    "icmp.lt_s": LTS,
}
_LOAD = {"load.8u": LOAD8, "load.32": LOAD32, "load.64": LOAD64}
_STORE = {"store.8": STORE8, "store.32": STORE32, "store.64": STORE64}

# Per-function record layout in ``funcs``.
FUNC_FIELDS = 5  # entry_pc, nslots, nparams, const_off, const_count


class LoweringError(Exception):
    pass


class Lowered:
    """Flat program: code/edge/function tables plus a string table for traps."""

    def __init__(self):
        self.code = array("q")
        self.edges = array("q")
        self.funcs = array("q")
        self.const_slots = array("q")
        self.const_vals = array("Q")
        self.messages = []
        self.index = {}
        self.results = []
        self._lists = None

    def as_lists(self):
        if self._lists is None:
            self._lists = (list(self.code), list(self.edges), list(self.funcs),
                           list(self.const_slots), list(self.const_vals))
        return self._lists


def lower_module(m, root: str) -> Lowered:
    """Lower ``root`` and every function transitively called from it."""
    sigs = module_signatures(m)
    todo = [root]
    order = []
    funcs = {f.name: f for f in m.functions}
    if root not in funcs:
        raise LoweringError(f"unknown function @{root}")
    seen = {root}
    while todo:
        name = todo.pop()
        order.append(name)
        for b in funcs[name].blocks:
            for inst in b.insts:
                if inst.op == "call":
                    if inst.callee not in funcs:
                        raise LoweringError(f"call to unknown function @{inst.callee}")
                    if inst.callee not in seen:
                        seen.add(inst.callee)
                        todo.append(inst.callee)
    low = Lowered()
    for i, name in enumerate(order):
        low.index[name] = i
        low.results.append(funcs[name].result is not None)
    low.funcs.extend([0] * (FUNC_FIELDS * len(order)))
    for name in order:
        _lower_function(low, funcs[name], sigs)
    return low


def _lower_function(low: Lowered, f, sigs):
    types = value_types(f, sigs)
    slots = {}
    for p, _ in f.params:
        slots[p] = len(slots)
    for b in f.blocks:
        for p, _ in b.params:
            slots[p] = len(slots)
        for inst in b.insts:
            if inst.result is not None:
                slots[inst.result] = len(slots)
    # constant slots follow the value slots
    consts = {}
    for b in f.blocks:
        for a in [a for inst in b.insts for a in inst.args] + _term_operands(b.term):
            if isinstance(a, Const):
                consts.setdefault(a.value, None)
    base = len(slots)
    for i, v in enumerate(consts):
        consts[v] = base + i

    def s(a):
        return consts[a.value] if isinstance(a, Const) else slots[a]

    code = low.code
    bmap = f.block_map()
    fixups = []  # (position in edges, label) -> patched with block pc
    block_pc = {}

    def edge(t):
        pos = len(low.edges)
        low.edges.append(0)
        fixups.append((pos, t.label))
        params = bmap[t.label].params
        low.edges.append(len(t.args))
        for a in t.args:
            low.edges.append(s(a))
        for p, _ in params:
            low.edges.append(slots[p])
        return pos

    for b in f.blocks:
        block_pc[b.label] = len(code)
        for inst in b.insts:
            op = inst.op
            if op in _BIN:
                bits = BITS[types[inst.args[0]] if not isinstance(inst.args[0], Const) else inst.args[0].ty]
                code.extend((_BIN[op], slots[inst.result], s(inst.args[0]), s(inst.args[1]), bits))
            elif op == "select":
                code.extend((SELECT, slots[inst.result], s(inst.args[0]), s(inst.args[1]), s(inst.args[2])))
            elif op in opcodes.CONSTS or op == "zext":
                code.extend((MOV, slots[inst.result], s(inst.args[0])))
            elif op == "trunc":
                code.extend((TRUNC, slots[inst.result], s(inst.args[0])))
            elif op in _LOAD:
                code.extend((_LOAD[op], slots[inst.result], s(inst.args[0])))
            elif op in _STORE:
                code.extend((_STORE[op], s(inst.args[0]), s(inst.args[1])))
            elif op == "print.i64":
                code.extend((PRINT, s(inst.args[0])))
            elif op == "call":
                dst = slots[inst.result] if inst.result is not None else -1
                code.extend((CALL, dst, low.index[inst.callee], len(inst.args)))
                code.extend(s(a) for a in inst.args)
            else:
                raise LoweringError(
                    f"@{f.name}^{b.label}: cannot execute {op}; polyfill intrinsics first")
        t = b.term
        if isinstance(t, Br):
            code.extend((BR, edge(t.target)))
        elif isinstance(t, BrIf):
            code.extend((BRIF, s(t.cond), edge(t.then), edge(t.else_)))
        elif isinstance(t, BrTable):
            code.extend((BRTABLE, s(t.selector), len(t.cases)))
            code.extend(edge(c) for c in t.cases)
            code.append(edge(t.default))
        elif isinstance(t, Return):
            code.extend((RET, s(t.value) if t.value is not None else -1))
        elif isinstance(t, Trap):
            code.extend((TRAP, len(low.messages)))
            low.messages.append(t.message)
    for pos, label in fixups:
        low.edges[pos] = block_pc[label]

    fi = low.index[f.name] * FUNC_FIELDS
    low.funcs[fi] = block_pc[f.entry]
    low.funcs[fi + 1] = base + len(consts)
    low.funcs[fi + 2] = len(f.params)
    low.funcs[fi + 3] = len(low.const_slots)
    low.funcs[fi + 4] = len(consts)
    for v, sl in consts.items():
        low.const_slots.append(sl)
        low.const_vals.append(v)


def _term_operands(t):
    out = []
    if isinstance(t, BrIf):
        out.append(t.cond)
    elif isinstance(t, BrTable):
        out.append(t.selector)
    elif isinstance(t, Return) and t.value is not None:
        out.append(t.value)
    for tgt in t.targets():
        out.extend(tgt.args)
    return out
