"""Structural comparison helpers for functions."""
from collections import Counter

from futamura.ir import Br, BrIf, BrTable, Const, Return, Trap
from futamura.ir.cfg import reverse_postorder, successors


def canonical(f):
    """``f`` with labels and values renamed in reverse-postorder first-use order."""
    names = {p: f"arg{i}" for i, (p, _) in enumerate(f.params)}
    labels = {}
    bm = f.block_map()
    order = reverse_postorder(f.entry, successors(f))
    for i, b in enumerate(order):
        labels[b] = f"L{i}"

    def v(a):
        if isinstance(a, Const):
            return a
        if a not in names:
            names[a] = f"v{len(names)}"
        return names[a]

    def tgt(t):
        return (labels[t.label], tuple(v(a) for a in t.args))

    out = []
    for b in order:
        blk = bm[b]
        params = tuple((v(p), ty) for p, ty in blk.params)
        insts = tuple((v(i.result) if i.result else None, i.op, tuple(v(a) for a in i.args), i.callee)
                      for i in blk.insts)
        t = blk.term
        if isinstance(t, Br):
            term = ("br", tgt(t.target))
        elif isinstance(t, BrIf):
            term = ("br_if", v(t.cond), tgt(t.then), tgt(t.else_))
        elif isinstance(t, BrTable):
            term = ("br_table", v(t.selector), tuple(tgt(c) for c in t.cases), tgt(t.default))
        elif isinstance(t, Return):
            term = ("return", None if t.value is None else v(t.value))
        else:
            assert isinstance(t, Trap)
            term = ("trap", t.message)
        out.append((labels[b], params, insts, term))
    return tuple(out)


def op_multiset(f, subst=None) -> Counter:
    """Opcodes with immediates, values reduced to a placeholder.

    ``subst`` maps value names to the constants they are known to hold.
    """
    subst = subst or {}
    c = Counter()
    for b in f.blocks:
        for i in b.insts:
            args = (subst.get(a, a) if not isinstance(a, Const) else a for a in i.args)
            c[(i.op, tuple(a if isinstance(a, Const) else "%" for a in args))] += 1
        c[("term", type(b.term).__name__)] += 1
    return c


def count_ops(f, pred) -> int:
    return sum(1 for b in f.blocks for i in b.insts if pred(i.op))
