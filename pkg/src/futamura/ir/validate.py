"""Structural validator: SSA, dominance, arities, types, memory layout."""
from __future__ import annotations

from dataclasses import dataclass

from . import opcodes
from .cfg import domtree
from .types import Br, BrIf, BrTable, Const, Module, Return


@dataclass(frozen=True)
class Diagnostic:
    where: str
    message: str

    def __str__(self):
        return f"{self.where}: {self.message}"


def validate(m: Module) -> list:
    """Return a list of :class:`Diagnostic`; empty iff the module is well formed."""
    diags = []
    names = [f.name for f in m.functions]
    seen = set()
    for n in names:
        if n in seen:
            diags.append(Diagnostic(f"@{n}", "duplicate function name"))
        seen.add(n)
    if m.entry is not None and m.entry not in seen:
        diags.append(Diagnostic("module", f"entry function @{m.entry} not defined"))
    diags.extend(_check_memory(m.memory))
    sigs = {f.name: (tuple(t for _, t in f.params), f.result) for f in m.functions}
    for f in m.functions:
        diags.extend(validate_function(f, sigs))
    return diags


def _check_memory(mem):
    out = []
    spans = sorted((off, off + len(data)) for off, data in mem.init)
    for lo, hi in spans:
        if lo < 0 or hi > mem.size:
            out.append(Diagnostic("memory", f"segment [{lo}, {hi}) out of bounds of size {mem.size}"))
    for (a, b), (c, d) in zip(spans, spans[1:]):
        if c < b:
            out.append(Diagnostic("memory", f"segments [{a}, {b}) and [{c}, {d}) overlap"))
    return out


def validate_function(f, sigs: dict) -> list:
    diags = []
    where = f"@{f.name}"

    def diag(loc, msg):
        diags.append(Diagnostic(loc, msg))

    labels = {}
    for b in f.blocks:
        if b.label in labels:
            diag(f"{where}^{b.label}", "duplicate block label")
        labels[b.label] = b
    if not f.blocks:
        diag(where, "function has no blocks")
        return diags
    if f.entry not in labels:
        diag(where, f"entry block ^{f.entry} not defined")
        return diags
    if labels[f.entry].params:
        diag(f"{where}^{f.entry}", "entry block must not have parameters")

    # definitions: name -> (block label or None for function params, index, type)
    defs = {}
    for p, t in f.params:
        if p in defs:
            diag(where, f"%{p} defined more than once")
        defs[p] = (None, -1, t)
    for b in f.blocks:
        for p, t in b.params:
            if p in defs:
                diag(f"{where}^{b.label}", f"%{p} defined more than once")
            else:
                defs[p] = (b.label, -1, t)
        for i, inst in enumerate(b.insts):
            if inst.result is not None:
                if inst.result in defs:
                    diag(f"{where}^{b.label}", f"%{inst.result} defined more than once")
                else:
                    defs[inst.result] = (b.label, i, None)

    # result types, iterated until stable (uses may precede defs textually)
    types = {n: d[2] for n, d in defs.items() if d[2] is not None}
    pending = True
    while pending:
        pending = False
        for b in f.blocks:
            for inst in b.insts:
                if inst.result is None or inst.result in types:
                    continue
                ats = [_type_of(a, types) for a in inst.args]
                if None in ats:
                    continue
                try:
                    rt = opcodes.check_signature(inst.op, ats, sigs.get(inst.callee))
                except (opcodes.SignatureError, TypeError):
                    rt = None
                if rt is not None:
                    types[inst.result] = rt
                    pending = True

    dt = domtree(f)

    def check_use(a, blabel, idx, loc):
        if isinstance(a, Const):
            return
        if a not in defs:
            diag(loc, f"use of undefined value %{a}")
            return
        dblock, didx, _ = defs[a]
        if not dt.reachable(blabel) or dblock is None:
            return
        if dblock == blabel:
            if didx >= idx:
                diag(loc, f"%{a} used before its definition")
        elif not dt.strictly_dominates(dblock, blabel):
            diag(loc, f"use of %{a} not dominated by its definition in ^{dblock}")

    for b in f.blocks:
        bloc = f"{where}^{b.label}"
        for i, inst in enumerate(b.insts):
            loc = f"{bloc}[{i}]"
            if not opcodes.is_known_opcode(inst.op):
                diag(loc, f"unknown opcode {inst.op}")
                continue
            if inst.op == "call" and inst.callee not in sigs:
                diag(loc, f"call to undefined function @{inst.callee}")
                continue
            callee_result = sigs[inst.callee][1] if inst.op == "call" else None
            wants = opcodes.has_result(inst.op, callee_result)
            if wants and inst.result is None:
                diag(loc, f"{inst.op} result must be named")
            if not wants and inst.result is not None:
                diag(loc, f"{inst.op} produces no result")
            for a in inst.args:
                check_use(a, b.label, i, loc)
            ats = [_type_of(a, types) for a in inst.args]
            if None not in ats:
                try:
                    opcodes.check_signature(inst.op, ats, sigs.get(inst.callee))
                except opcodes.SignatureError as e:
                    diag(loc, str(e))
        tloc = f"{bloc}[term]"
        n = len(b.insts)
        t = b.term
        if isinstance(t, BrIf):
            check_use(t.cond, b.label, n, tloc)
        elif isinstance(t, BrTable):
            check_use(t.selector, b.label, n, tloc)
        elif isinstance(t, Return):
            if t.value is not None:
                check_use(t.value, b.label, n, tloc)
                if f.result is None:
                    diag(tloc, "return with a value from a function without result")
                else:
                    rt = _type_of(t.value, types)
                    if rt is not None and rt != f.result:
                        diag(tloc, f"return type {rt} does not match {f.result}")
            elif f.result is not None:
                diag(tloc, "return without a value")
        for tgt in t.targets():
            if tgt.label not in labels:
                diag(tloc, f"branch to undefined label ^{tgt.label}")
                continue
            params = labels[tgt.label].params
            if len(tgt.args) != len(params):
                diag(tloc, f"branch to ^{tgt.label} passes {len(tgt.args)} arguments, "
                           f"block takes {len(params)}")
            for a, (pname, pty) in zip(tgt.args, params):
                check_use(a, b.label, n, tloc)
                at = _type_of(a, types)
                if at is not None and at != pty:
                    diag(tloc, f"argument for %{pname} of ^{tgt.label} is {at}, expected {pty}")
    return diags


def _type_of(a, types):
    if isinstance(a, Const):
        return a.ty
    return types.get(a)


def value_types(f, sigs: dict) -> dict:
    """Map every SSA name defined in ``f`` to its scalar type."""
    types = {p: t for p, t in f.params}
    for b in f.blocks:
        types.update(dict(b.params))
    changed = True
    while changed:
        changed = False
        for b in f.blocks:
            for inst in b.insts:
                if inst.result is None or inst.result in types:
                    continue
                ats = [_type_of(a, types) for a in inst.args]
                if None in ats:
                    continue
                types[inst.result] = opcodes.check_signature(inst.op, ats, sigs.get(inst.callee))
                changed = True
    return types


def module_signatures(m: Module) -> dict:
    return {f.name: (tuple(t for _, t in f.params), f.result) for f in m.functions}
