"""Hypothesis strategies for random IR modules and small CFGs."""
from hypothesis import strategies as st

from futamura.ir import Block, Br, BrIf, BrTable, Const, Function, Inst, MemoryImage, Module
from futamura.ir import Return, Target, Trap
from futamura.ir.opcodes import BINARY, ICMP

I64 = "i64"
MEM_SIZE = 256

u64 = st.integers(0, 2**64 - 1)
small = st.integers(0, 40)


@st.composite
def cfgs(draw, max_blocks=8):
    """``(entry, succs)`` over labels ``0..n-1``."""
    n = draw(st.integers(1, max_blocks))
    succs = {i: draw(st.lists(st.integers(0, n - 1), max_size=3, unique=True)) for i in range(n)}
    return 0, succs


@st.composite
def functions(draw, name="f", nparams=2, max_blocks=5):
    """A valid function: every block only uses function params, its own params and its own defs."""
    nblocks = draw(st.integers(1, max_blocks))
    labels = [f"b{i}" for i in range(nblocks)]
    arity = [0] + [draw(st.integers(0, 2)) for _ in range(nblocks - 1)]
    params = tuple((f"p{i}", I64) for i in range(nparams))
    blocks = []
    for bi, label in enumerate(labels):
        avail = [p for p, _ in params]
        bparams = tuple((f"{label}.a{k}", I64) for k in range(arity[bi]))
        avail += [p for p, _ in bparams]
        insts = []

        def operand():
            if avail and draw(st.booleans()):
                return draw(st.sampled_from(avail))
            return Const(I64, draw(st.one_of(small, u64)))

        for k in range(draw(st.integers(0, 6))):
            res = f"{label}.v{k}"
            kind = draw(st.sampled_from(("bin", "bin", "cmp", "select", "load", "store", "print")))
            if kind == "bin":
                insts.append(Inst(res, draw(st.sampled_from(BINARY)), (operand(), operand())))
            elif kind == "cmp":
                cmp_res = res + "c"
                insts.append(Inst(cmp_res, draw(st.sampled_from(ICMP)), (operand(), operand())))
                insts.append(Inst(res, "zext", (cmp_res,)))
            elif kind == "select":
                insts.append(Inst(res, "select", (operand(), operand(), operand())))
            elif kind == "load":
                addr = Const(I64, draw(st.integers(0, MEM_SIZE - 8)))
                insts.append(Inst(res, "load.64", (addr,)))
            elif kind == "store":
                addr = Const(I64, draw(st.integers(0, MEM_SIZE - 8)))
                insts.append(Inst(None, "store.64", (addr, operand())))
                continue
            else:
                insts.append(Inst(None, "print.i64", (operand(),)))
                continue
            avail.append(res)

        def target():
            t = draw(st.integers(1, nblocks - 1)) if nblocks > 1 else None
            if t is None:
                return None
            return Target(labels[t], tuple(operand() for _ in range(arity[t])))

        kind = draw(st.sampled_from(("br", "br_if", "br_table", "return", "return", "trap")))
        t1 = target() if kind in ("br", "br_if", "br_table") else None
        if t1 is None:
            term = Trap("boom") if kind == "trap" else Return(operand())
        elif kind == "br":
            term = Br(t1)
        elif kind == "br_if":
            term = BrIf(operand(), t1, target())
        else:
            cases = tuple(target() for _ in range(draw(st.integers(0, 3))))
            term = BrTable(operand(), cases, target())
        blocks.append(Block(label, bparams, tuple(insts), term))
    return Function(name, params, I64, tuple(blocks))


@st.composite
def modules(draw):
    f = draw(functions())
    data = draw(st.binary(max_size=32))
    off = draw(st.integers(0, MEM_SIZE - len(data)))
    init = ((off, data),) if data else ()
    return Module((f,), MemoryImage(MEM_SIZE, init))
