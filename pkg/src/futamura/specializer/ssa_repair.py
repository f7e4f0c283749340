"""Restore the dominance property after specialization.

Specialization can reshape the CFG so that a definition no longer dominates
all of its uses.  Repair picks a set of *cut points*; every value live into a
cut point becomes a fresh block parameter there, and each predecessor passes
its current name for it.

``hsca`` mode chooses cut points with the highest-same-context-ancestor
fixpoint over the dominator tree.  ``naive`` mode makes every non-entry
block a cut point.  In both modes a non-cut block reached by conflicting
names for one value is promoted to a cut point and the rename is redone,
so the result is valid SSA regardless of how the cut set was chosen.
"""
from __future__ import annotations

from dataclasses import dataclass

from ..ir.cfg import DomTree, predecessors, successors
from ..ir.validate import value_types
from ..ir.types import Block, Br, BrIf, BrTable, Const, Function, Inst, Return, Target


class RepairError(Exception):
    pass


@dataclass
class RepairStats:
    mode: str
    cut_points: int
    added_params: int
    promotions: int


def _names(ops):
    return [a for a in ops if not isinstance(a, Const)]


def _term_uses(t):
    if isinstance(t, BrIf):
        return _names([t.cond])
    if isinstance(t, BrTable):
        return _names([t.selector])
    if isinstance(t, Return) and t.value is not None:
        return _names([t.value])
    return []


def liveness(f: Function, succs: dict):
    """Per-block live-in sets of SSA names (edge arguments count as uses in the source)."""
    gen, kill = {}, {}
    for b in f.blocks:
        defined = {p for p, _ in b.params}
        g = set()
        for inst in b.insts:
            for a in _names(inst.args):
                if a not in defined:
                    g.add(a)
            if inst.result is not None:
                defined.add(inst.result)
        for a in _term_uses(b.term):
            if a not in defined:
                g.add(a)
        for t in b.term.targets():
            for a in _names(t.args):
                if a not in defined:
                    g.add(a)
        gen[b.label], kill[b.label] = g, defined
    live_in = {b.label: set(gen[b.label]) for b in f.blocks}
    order = [b.label for b in reversed(f.blocks)]
    changed = True
    while changed:
        changed = False
        for label in order:
            out = set()
            for s in succs[label]:
                out |= live_in[s]
            new = gen[label] | (out - kill[label])
            if new != live_in[label]:
                live_in[label] = new
                changed = True
    return live_in


def hsca_cut_points(f: Function, block_ctx: dict, dt: DomTree, preds: dict) -> set:
    """Blocks where an inbound HSCA fails to dominate the block.

    The entry block and blocks entered from another context are their own
    HSCA; otherwise a block inherits the highest of its inbound HSCAs.
    """
    hsca = {f.entry: f.entry}
    cuts = set()
    rpo = [b for b in dt.rpo if b != f.entry]
    for _ in range(len(rpo) + 2):
        changed = False
        cuts = set()
        for b in rpo:
            inbound = [hsca[p] for p in preds[b] if p in hsca]
            if not inbound:
                continue
            if any(not dt.dominates(h, b) for h in inbound):
                cuts.add(b)
                new = b
            elif any(block_ctx.get(p) != block_ctx.get(b) for p in preds[b]) \
                    or block_ctx.get(b) is None:
                new = b
            else:
                new = min(inbound, key=lambda h: dt.depth[h])
            if hsca.get(b) != new:
                hsca[b] = new
                changed = True
        if not changed:
            break
    return cuts


def _rename(f, succs, preds, rpo, live_in, cuts):
    """Reaching-name dataflow; returns (names at entry, conflicting blocks)."""
    defs = {}
    for b in f.blocks:
        d = {p for p, _ in b.params}
        d.update(i.result for i in b.insts if i.result is not None)
        defs[b.label] = d
    at_entry = {}
    at_exit = {}
    fparams = {p for p, _ in f.params}
    changed = True
    while changed:
        changed = False
        for b in rpo:
            live = live_in[b]
            if b == f.entry:
                cur = {n: n for n in live if n in fparams}
            elif b in cuts:
                cur = {n: f"{n}.{b}" for n in live}
            else:
                cur = {}
                for p in preds[b]:
                    po = at_exit.get(p)
                    if po is None:
                        continue
                    for n in live:
                        if n in po and n not in cur:
                            cur[n] = po[n]
            out = dict(cur)
            for d in defs[b]:
                out[d] = d
            if at_entry.get(b) != cur or at_exit.get(b) != out:
                at_entry[b], at_exit[b] = cur, out
                changed = True
    conflicts = set()
    for b in rpo:
        if b == f.entry or b in cuts:
            continue
        for n in live_in[b]:
            seen = {at_exit[p].get(n) for p in preds[b] if p in at_exit}
            if len(seen) > 1:
                conflicts.add(b)
                break
    return at_entry, conflicts


def repair(f: Function, block_ctx: dict = None, mode: str = "hsca", sigs: dict = None):
    """Return ``(repaired function, RepairStats)``.

    ``sigs`` maps callee names to ``(param types, result type)``; it is only
    needed when a value produced by a call must become a block parameter.
    """
    if mode not in ("hsca", "naive"):
        raise ValueError(f"unknown SSA repair mode {mode!r}")
    succs = successors(f)
    preds = predecessors(f, succs)
    dt = DomTree(f.entry, succs, preds)
    rpo = dt.rpo
    live_in = liveness(f, succs)
    if mode == "naive":
        cuts = set(rpo) - {f.entry}
    else:
        cuts = hsca_cut_points(f, block_ctx or {}, dt, preds)
    promotions = 0
    while True:
        at_entry, conflicts = _rename(f, succs, preds, rpo, live_in, cuts)
        if not conflicts:
            break
        promotions += len(conflicts)
        cuts |= conflicts
    fparams = {p for p, _ in f.params}
    entry_live = live_in[f.entry] - fparams
    if entry_live:
        raise RepairError(f"values live into the entry block: {sorted(entry_live)}")

    added = {b: sorted(live_in[b]) for b in cuts}
    types = value_types(f, sigs or {}) if any(added.values()) else {}
    out = []
    for b in f.blocks:
        if b.label not in at_entry:
            continue  # unreachable
        names = dict(at_entry[b.label])

        def m(a):
            if isinstance(a, Const):
                return a
            if a not in names:
                raise RepairError(f"%{a} has no reaching definition in ^{b.label}")
            return names[a]

        params = list(b.params)
        if b.label in cuts:
            params += [(names[n], types[n]) for n in added[b.label]]
        for p, _ in b.params:
            names[p] = p
        insts = []
        for inst in b.insts:
            insts.append(Inst(inst.result, inst.op, tuple(m(a) for a in inst.args), inst.callee))
            if inst.result is not None:
                names[inst.result] = inst.result

        def tgt(t):
            args = tuple(m(a) for a in t.args)
            if t.label in cuts:
                args += tuple(m(n) for n in added[t.label])
            return Target(t.label, args)

        t = b.term
        if isinstance(t, Br):
            t = Br(tgt(t.target))
        elif isinstance(t, BrIf):
            t = BrIf(m(t.cond), tgt(t.then), tgt(t.else_))
        elif isinstance(t, BrTable):
            t = BrTable(m(t.selector), tuple(tgt(c) for c in t.cases), tgt(t.default))
        elif isinstance(t, Return) and t.value is not None:
            t = Return(m(t.value))
        out.append(Block(b.label, tuple(params), tuple(insts), t))
    nparams = sum(len(v) for v in added.values())
    stats = RepairStats(mode, len(cuts), nparams, promotions)
    return Function(f.name, f.params, f.result, tuple(out), f.entry), stats


def ssa_repair(f: Function, cutinfo, sigs: dict = None) -> tuple:
    return repair(f, cutinfo.block_ctx, "hsca", sigs)


def ssa_repair_naive(f: Function, sigs: dict = None) -> tuple:
    return repair(f, None, "naive", sigs)
