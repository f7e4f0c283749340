"""Context-keyed worklist specialization.

A specialized block is identified by ``(ctx, generic label, start)``.  ``ctx``
is a tuple of u64 values pushed by the context intrinsics, possibly followed
by :class:`SplitElem` entries added by ``specialized_value``.  ``start`` is
the generic instruction index the block begins at: 0 normally, or the index
after a value split for the per-value resume blocks.

Specialized SSA values are either an immediate :class:`Const` or the name of
an emitted definition.  Block entry state only ever moves down the lattice
(a concrete value, then :data:`SLOT`, which turns into a fresh block
parameter), so the worklist reaches a fixpoint.
"""
from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass, field

from ..absint import UNKNOWN, ConstRanges, transfer
from ..ir import opcodes
from ..ir.types import (
    I64, Block, Br, BrIf, BrTable, Const, Function, Inst, Module, Return, Target, Trap,
)
from .errors import (
    AssertConstFailed, FixpointLimitExceeded, NonConstContext, SpecializationError,
)
from .request import RunTime, SpecializationRequest, SpecializedConst, SpecializedMemory

ZERO = Const(I64, 0)
SPLIT_TRAP = "specialized_value out of range"


@dataclass(frozen=True)
class SplitElem:
    label: str
    index: int
    value: int

    def __repr__(self):
        return f"{self.label}[{self.index}]={self.value}"


class _Slot:
    __slots__ = ()

    def __repr__(self):
        return "SLOT"


SLOT = _Slot()


@dataclass(frozen=True)
class Limits:
    max_rebuilds: int = 1000
    max_contexts: int = 100_000
    max_split: int = 256
    max_registers: int = 256


def _meet(a, b):
    if a is SLOT or b is SLOT:
        return SLOT
    return a if a == b else SLOT


@dataclass(frozen=True)
class EdgeRec:
    """One outgoing edge with the virtual state at the branch."""

    key: tuple
    args: tuple
    regs: dict
    locals: dict  # index -> (addr, value, dirty)
    stack: tuple  # ((addr, value, dirty), ...) bottom first
    env: dict = None  # inherited generic env, resume blocks only


@dataclass
class EntryState:
    params: list
    regs: dict
    locals: dict
    stack: list
    inherited: dict = None

    @classmethod
    def from_edge(cls, e: EdgeRec):
        regs = {i: v for i, v in e.regs.items() if v != ZERO}
        return cls(list(e.args), regs, dict(e.locals), list(e.stack),
                   dict(e.env) if e.env is not None else None)

    def meet(self, e: EdgeRec) -> "EntryState":
        params = [_meet(a, b) for a, b in zip(self.params, e.args)]
        regs = {}
        for i in self.regs.keys() | e.regs.keys():
            v = _meet(self.regs.get(i, ZERO), e.regs.get(i, ZERO))
            if v != ZERO:
                regs[i] = v
        locals_ = {}
        for i, (addr, val, dirty) in self.locals.items():
            o = e.locals.get(i)
            if o is not None and o[0] == addr and o[2] == dirty:
                locals_[i] = (addr, _meet(val, o[1]), dirty)
        if len(self.stack) == len(e.stack) and all(
                a[0] == b[0] for a, b in zip(self.stack, e.stack)):
            stack = [(a[0], _meet(a[1], b[1]), a[2] or b[2]) for a, b in zip(self.stack, e.stack)]
        else:
            stack = []
        # a resume block has exactly one predecessor; its latest env wins
        inherited = dict(e.env) if self.inherited is not None else None
        return EntryState(params, regs, locals_, stack, inherited)


@dataclass
class SpecBlock:
    key: tuple
    label: str
    entry: EntryState
    params: list = field(default_factory=list)
    layout: list = field(default_factory=list)  # how each param is fed: (kind, index)
    insts: list = field(default_factory=list)
    term: object = None
    edges: list = field(default_factory=list)
    defs: dict = field(default_factory=dict)  # generic name -> specialized value
    cross: list = field(default_factory=list)  # (generic name, value) read from other blocks
    out_ctx: tuple = ()
    builds: int = 0
    enqueues: int = 0
    built: bool = False


@dataclass
class CutInfo:
    """Per-block facts for SSA repair; ``block_ctx`` maps label -> context."""

    block_ctx: dict
    entry: str


@dataclass
class Stats:
    blocks_created: int = 0
    builds: int = 0
    contexts: int = 0


class _Cursor:
    """Mutable per-build state: current context, local env, virtual state."""

    __slots__ = ("ctx", "env", "inherited", "regs", "locals", "stack", "insts", "edges", "cross")

    def __init__(self, ctx, inherited):
        self.ctx = ctx
        self.env = {}
        self.inherited = inherited
        self.regs = {}
        self.locals = {}
        self.stack = []
        self.insts = []
        self.edges = []
        self.cross = []


def _strip_splits(ctx):
    while ctx and isinstance(ctx[-1], SplitElem):
        ctx = ctx[:-1]
    return ctx


def _need_const(v, what, where, exc=SpecializationError):
    if not isinstance(v, Const):
        raise exc(f"{what} is not a compile-time constant", where)
    return v


class Specializer:
    """One specialization request against one module.

    Call :meth:`run` to reach the fixpoint and :meth:`finalize` to obtain
    the (pre-repair) specialized function.
    """

    def __init__(self, module: Module, request: SpecializationRequest, limits: Limits = None):
        self.m = module
        self.req = request
        self.limits = limits or Limits()
        if not module.has_function(request.target):
            raise SpecializationError(f"target function @{request.target} not found")
        self.f = f = module.function(request.target)
        if len(request.arg_modes) != len(f.params):
            raise SpecializationError(
                f"request gives {len(request.arg_modes)} argument modes, "
                f"@{f.name} takes {len(f.params)}")
        self.gblocks = f.block_map()
        self.root = {}
        ranges = []
        for (pname, ty), mode in zip(f.params, request.arg_modes):
            if isinstance(mode, RunTime):
                self.root[pname] = pname
            elif isinstance(mode, SpecializedConst):
                self.root[pname] = Const(ty, mode.value)
            elif isinstance(mode, SpecializedMemory):
                if ty != I64:
                    raise SpecializationError(f"memory argument %{pname} must be i64")
                if mode.address + mode.length > module.memory.size:
                    raise SpecializationError(
                        f"constant memory [{mode.address}, {mode.address + mode.length}) "
                        f"exceeds memory size {module.memory.size}")
                self.root[pname] = Const(I64, mode.address)
                if mode.length:
                    ranges.append((mode.address, mode.length))
            else:
                raise SpecializationError(f"unknown argument mode {mode!r}")
        self.ranges = ConstRanges(tuple(sorted(ranges)))
        try:
            self.ranges.check(module.memory)
        except ValueError as e:
            raise SpecializationError(str(e)) from None

        self.blocks = {}
        self.order = []
        self.valuemap = {((), p): v for p, v in self.root.items()}
        self.deps = defaultdict(set)
        self.contexts = {()}
        self.worklist = deque()
        self.queued = set()
        self.trap_label = None
        self._nlabels = 0
        self.stats = Stats()
        self.entry_key = ((), f.entry, 0)
        self.start_edge = EdgeRec(self.entry_key, (), {}, {}, ())

    # -- worklist ----------------------------------------------------------

    def _label(self) -> str:
        self._nlabels += 1
        return f"b{self._nlabels - 1}"

    def _enqueue(self, key):
        if key not in self.queued:
            self.queued.add(key)
            self.worklist.append(key)
            self.blocks[key].enqueues += 1

    def evaluate_target(self, edge: EdgeRec) -> str:
        """Create or find the block for ``edge.key`` and meet the edge into it."""
        key = edge.key
        sb = self.blocks.get(key)
        if sb is None:
            ctx = key[0]
            if ctx not in self.contexts:
                self.contexts.add(ctx)
                self.stats.contexts = len(self.contexts)
                if len(self.contexts) > self.limits.max_contexts:
                    raise FixpointLimitExceeded(
                        f"more than {self.limits.max_contexts} contexts", self._where(key))
            sb = SpecBlock(key, self._label(), EntryState.from_edge(edge))
            self.stats.blocks_created += 1
            self.blocks[key] = sb
            self.order.append(key)
            self._enqueue(key)
        else:
            new = sb.entry.meet(edge)
            if new != sb.entry:
                sb.entry = new
                self._enqueue(key)
        return sb.label

    def run(self):
        self.evaluate_target(self.start_edge)
        while self.worklist:
            key = self.worklist.popleft()
            self.queued.discard(key)
            self.specialize_block(key)
        return self

    # -- lookup -------------------------------------------------------------

    def _where(self, key, idx=None):
        ctx, label, _ = key
        loc = f"@{self.f.name} ^{label}"
        if idx is not None:
            loc += f"[{idx}]" if idx >= 0 else "[term]"
        return f"{loc} in context {list(ctx)}"

    def _lookup(self, cur, key, name):
        v = cur.env.get(name)
        if v is not None:
            return v
        if cur.inherited is not None:
            v = cur.inherited.get(name)
            if v is not None:
                return v
        ctx = key[0]
        while True:
            k = (ctx, name)
            v = self.valuemap.get(k)
            if v is not None:
                self.deps[k].add(key)
                cur.cross.append((name, v))
                return v
            if not ctx:
                break
            ctx = ctx[:-1]
        raise SpecializationError(f"%{name} has no specialized value here", self._where(key))

    def _operand(self, cur, key, a):
        return a if isinstance(a, Const) else self._lookup(cur, key, a)

    # -- block specialization ------------------------------------------------

    def specialize_block(self, key):
        """Rebuild the specialized block for ``key`` from scratch."""
        sb = self.blocks[key]
        sb.builds += 1
        self.stats.builds += 1
        if sb.builds > self.limits.max_rebuilds:
            raise FixpointLimitExceeded(
                f"block rebuilt more than {self.limits.max_rebuilds} times", self._where(key))
        ctx, label, start = key
        g = self.gblocks[label]
        lbl = sb.label
        entry = sb.entry
        cur = _Cursor(ctx, entry.inherited)
        params, layout = [], []
        defs = {}
        if start == 0:
            for i, ((pname, ty), v) in enumerate(zip(g.params, entry.params)):
                if v is SLOT:
                    v = f"{pname}.{lbl}"
                    params.append((v, ty))
                    layout.append(("p", i))
                cur.env[pname] = v
                defs[pname] = v
        else:
            res = g.insts[start - 1].result
            if res is not None:
                defs[res] = cur.inherited[res]
        for i in sorted(entry.regs):
            v = entry.regs[i]
            if v is SLOT:
                v = f"{lbl}.reg{i}"
                params.append((v, I64))
                layout.append(("r", i))
            cur.regs[i] = v
        for i in sorted(entry.locals):
            addr, v, dirty = entry.locals[i]
            if v is SLOT:
                v = f"{lbl}.loc{i}"
                params.append((v, I64))
                layout.append(("l", i))
            cur.locals[i] = (addr, v, dirty)
        for d, (addr, v, dirty) in enumerate(entry.stack):
            if v is SLOT:
                v = f"{lbl}.stk{d}"
                params.append((v, I64))
                layout.append(("s", d))
            cur.stack.append((addr, v, dirty))

        term = None
        for idx in range(start, len(g.insts)):
            inst = g.insts[idx]
            term = self._inst(sb, cur, inst, idx)
            if inst.result is not None and inst.result in cur.env:
                defs[inst.result] = cur.env[inst.result]
            if term is not None:
                break
        if term is None:
            term = self._terminator(sb, cur, g.term)

        sb.params, sb.layout = params, layout
        sb.insts, sb.term, sb.edges = cur.insts, term, cur.edges
        sb.cross, sb.defs, sb.out_ctx = cur.cross, defs, cur.ctx
        sb.built = True
        self._commit(key, ctx, defs)
        if cur.ctx != ctx:
            self._commit(key, cur.ctx, defs)

    def _commit(self, key, ctx, defs):
        for name, v in defs.items():
            k = (ctx, name)
            old = self.valuemap.get(k)
            if old != v:
                self.valuemap[k] = v
                if old is not None:
                    for dep in self.deps.get(k, ()):
                        if dep != key:
                            self._enqueue(dep)

    def _emit(self, cur, result, op, args, callee=None):
        cur.insts.append(Inst(result, op, tuple(args), callee))

    def _inst(self, sb, cur, inst, idx):
        key = sb.key
        op = inst.op
        res = inst.result
        lbl = sb.label
        if op in opcodes.CONSTS:
            cur.env[res] = inst.args[0]
            return None
        args = [self._operand(cur, key, a) for a in inst.args]
        if op in opcodes.PURE or op in opcodes.LOADS:
            if op == "select" and isinstance(args[0], Const):
                cur.env[res] = args[1] if args[0].value != 0 else args[2]
                return None
            if op == "select" and args[1] == args[2]:
                cur.env[res] = args[1]
                return None
            abstract = [a if isinstance(a, Const) else UNKNOWN for a in args]
            r = transfer(op, abstract, self.ranges, self.m.memory)
            if r is not UNKNOWN:
                cur.env[res] = r
                return None
            name = f"{res}.{lbl}"
            self._emit(cur, name, op, args)
            cur.env[res] = name
            return None
        if op in opcodes.STORES or op == "print.i64":
            self._emit(cur, None, op, args)
            return None
        if op == "call":
            name = f"{res}.{lbl}" if res is not None else None
            self._emit(cur, name, op, args, inst.callee)
            if res is not None:
                cur.env[res] = name
            return None
        iname = opcodes.intrinsic_name(op)
        if iname is None or iname not in opcodes.INTRINSICS:
            raise SpecializationError(f"unknown opcode {op}", self._where(key, idx))
        return self._intrinsic(sb, cur, iname, args, res, idx)

    def _intrinsic(self, sb, cur, name, args, res, idx):
        key = sb.key
        where = self._where(key, idx)
        lbl = sb.label
        if name == "push_context":
            v = _need_const(args[0], "push_context argument", where, NonConstContext)
            cur.ctx = cur.ctx + (v.value,)
        elif name == "update_context":
            v = _need_const(args[0], "update_context argument", where, NonConstContext)
            ctx = _strip_splits(cur.ctx)
            cur.ctx = (ctx[:-1] if ctx else ()) + (v.value,)
        elif name == "pop_context":
            ctx = _strip_splits(cur.ctx)
            if not ctx:
                raise SpecializationError("pop_context on an empty context stack", where)
            cur.ctx = ctx[:-1]
        elif name == "assert_const":
            _need_const(args[0], "assert_const argument", where, AssertConstFailed)
        elif name == "specialized_value":
            return self._split(sb, cur, args, res, idx)
        elif name == "load_register":
            i = self._reg_index(args[0], where)
            cur.env[res] = cur.regs.get(i, ZERO)
        elif name == "store_register":
            i = self._reg_index(args[0], where)
            cur.regs[i] = args[1]
        elif name == "local_read":
            i = _need_const(args[0], "local index", where).value
            addr = args[1]
            hit = cur.locals.get(i)
            if hit is not None and hit[0] == addr:
                cur.env[res] = hit[1]
            else:
                if hit is not None and hit[2]:
                    self._emit(cur, None, "store.64", (hit[0], hit[1]))
                v = f"{res}.{lbl}"
                self._emit(cur, v, "load.64", (addr,))
                cur.locals[i] = (addr, v, False)
                cur.env[res] = v
        elif name == "local_write":
            i = _need_const(args[0], "local index", where).value
            addr, v = args[1], args[2]
            hit = cur.locals.get(i)
            if hit is not None and hit[0] != addr and hit[2]:
                self._emit(cur, None, "store.64", (hit[0], hit[1]))
            cur.locals[i] = (addr, v, True)
        elif name == "stack_push":
            cur.stack.append((args[0], args[1], True))
        elif name == "stack_pop":
            addr = args[0]
            if cur.stack and cur.stack[-1][0] == addr:
                cur.env[res] = cur.stack.pop()[1]
            else:
                self._spill_stack(cur, clear=True)
                v = f"{res}.{lbl}"
                self._emit(cur, v, "load.64", (addr,))
                cur.env[res] = v
        elif name == "stack_read":
            d = _need_const(args[0], "stack depth", where).value
            addr = args[1]
            n = len(cur.stack)
            if d < n and cur.stack[n - 1 - d][0] == addr:
                cur.env[res] = cur.stack[n - 1 - d][1]
            else:
                self._spill_stack(cur, clear=d < n)
                v = f"{res}.{lbl}"
                self._emit(cur, v, "load.64", (addr,))
                cur.env[res] = v
        elif name == "stack_write":
            d = _need_const(args[0], "stack depth", where).value
            addr, v = args[1], args[2]
            n = len(cur.stack)
            if d < n and cur.stack[n - 1 - d][0] == addr:
                cur.stack[n - 1 - d] = (addr, v, True)
            else:
                self._spill_stack(cur, clear=d < n)
                self._emit(cur, None, "store.64", (addr, v))
        elif name == "flush":
            self._flush(cur)
        return None

    def _reg_index(self, a, where):
        i = _need_const(a, "register index", where).value
        if i >= self.limits.max_registers:
            raise SpecializationError(f"register index {i} out of range", where)
        return i

    def _spill_stack(self, cur, clear):
        """Write back dirty stack entries; drop them all if ``clear``."""
        out = []
        for addr, v, dirty in cur.stack:
            if dirty:
                self._emit(cur, None, "store.64", (addr, v))
            out.append((addr, v, False))
        cur.stack = [] if clear else out

    def _flush(self, cur):
        for i in sorted(cur.locals):
            addr, v, dirty = cur.locals[i]
            if dirty:
                self._emit(cur, None, "store.64", (addr, v))
                cur.locals[i] = (addr, v, False)
        self._spill_stack(cur, clear=False)

    def _split(self, sb, cur, args, res, idx):
        key = sb.key
        where = self._where(key, idx)
        v = args[0]
        lo = _need_const(args[1], "specialized_value lower bound", where).value
        hi = _need_const(args[2], "specialized_value upper bound", where).value
        if lo > hi:
            raise SpecializationError(f"specialized_value range [{lo}, {hi}] is empty", where)
        if isinstance(v, Const):
            if not lo <= v.value <= hi:
                return Trap(SPLIT_TRAP)
            cur.env[res] = v
            return None
        n = hi - lo + 1
        if n == 1:
            cur.env[res] = Const(I64, lo)
            return None
        if n > self.limits.max_split:
            raise SpecializationError(
                f"specialized_value range of {n} values exceeds {self.limits.max_split}", where)
        sel = v
        if lo:
            sel = f"{sb.label}.split"
            self._emit(cur, sel, "isub", (v, Const(I64, lo)))
        env = dict(cur.inherited or {})
        env.update(cur.env)
        label = key[1]
        cases = []
        for k in range(n):
            env[res] = Const(I64, lo + k)
            rkey = (cur.ctx + (SplitElem(label, idx, lo + k),), label, idx + 1)
            cases.append(Target(self._edge(cur, rkey, (), dict(env)), ()))
        if self.trap_label is None:
            self.trap_label = self._label()
        return BrTable(sel, tuple(cases), Target(self.trap_label, ()))

    def _edge(self, cur, key, args, env=None) -> str:
        e = EdgeRec(key, tuple(args), dict(cur.regs), dict(cur.locals), tuple(cur.stack), env)
        cur.edges.append(e)
        return self.evaluate_target(e)

    def _target(self, sb, cur, t: Target) -> Target:
        args = [self._operand(cur, sb.key, a) for a in t.args]
        return Target(self._edge(cur, (cur.ctx, t.label, 0), args), ())

    def _terminator(self, sb, cur, t):
        key = sb.key
        if isinstance(t, Br):
            return Br(self._target(sb, cur, t.target))
        if isinstance(t, BrIf):
            c = self._operand(cur, key, t.cond)
            if isinstance(c, Const):
                return Br(self._target(sb, cur, t.then if c.value != 0 else t.else_))
            return BrIf(c, self._target(sb, cur, t.then), self._target(sb, cur, t.else_))
        if isinstance(t, BrTable):
            s = self._operand(cur, key, t.selector)
            if isinstance(s, Const):
                chosen = t.cases[s.value] if s.value < len(t.cases) else t.default
                return Br(self._target(sb, cur, chosen))
            cases = tuple(self._target(sb, cur, c) for c in t.cases)
            return BrTable(s, cases, self._target(sb, cur, t.default))
        if isinstance(t, Return):
            return Return(self._operand(cur, key, t.value) if t.value is not None else None)
        if isinstance(t, Trap):
            return t
        raise SpecializationError(f"unknown terminator {t!r}", self._where(key, -1))

    # -- output -----------------------------------------------------------------

    def _reachable(self):
        seen = {self.entry_key}
        todo = [self.entry_key]
        while todo:
            sb = self.blocks[todo.pop()]
            for e in sb.edges:
                if e.key not in seen:
                    seen.add(e.key)
                    todo.append(e.key)
        return [k for k in self.order if k in seen]

    def _edge_args(self, e: EdgeRec, target: SpecBlock):
        out = []
        for kind, i in target.layout:
            if kind == "p":
                out.append(e.args[i])
            elif kind == "r":
                out.append(e.regs.get(i, ZERO))
            elif kind == "l":
                out.append(e.locals[i][1])
            else:
                out.append(e.stack[i][1])
        return tuple(out)

    def _edge_flushes(self, e: EdgeRec, target: SpecBlock):
        """Dirty entries the target does not keep: (sort key, addr, value)."""
        out = []
        kept = target.entry.locals
        for i, (addr, v, dirty) in e.locals.items():
            if dirty and i not in kept:
                out.append(((0, i), addr, v))
        if e.stack and not target.entry.stack:
            for d, (addr, v, dirty) in enumerate(e.stack):
                if dirty:
                    out.append(((1, d), addr, v))
        return out

    def check_context_flow(self, keys):
        """Reject outputs where a value read from another block could have
        been produced by a different specialization of its definition.

        Forward dataflow over the final CFG: for every generic value that some
        block reads across a block boundary, the set of specialized values its
        most recent definition may have produced.
        """
        tracked = {name for k in keys for name, _ in self.blocks[k].cross}
        if not tracked:
            return
        succ = {k: [e.key for e in self.blocks[k].edges] for k in keys}
        start = {p: frozenset([v]) for p, v in self.root.items() if p in tracked}
        ins = {self.entry_key: dict(start)}
        outs = {}
        todo = deque([self.entry_key])
        queued = {self.entry_key}
        while todo:
            k = todo.popleft()
            queued.discard(k)
            sb = self.blocks[k]
            out = dict(ins.get(k, {}))
            for name, v in sb.defs.items():
                if name in tracked:
                    out[name] = frozenset([v])
            if outs.get(k) == out:
                continue
            outs[k] = out
            for s in succ[k]:
                cur = ins.setdefault(s, {})
                changed = False
                for name, vs in out.items():
                    old = cur.get(name, frozenset())
                    if not vs <= old:
                        cur[name] = old | vs
                        changed = True
                if changed or s not in outs:
                    if s not in queued:
                        queued.add(s)
                        todo.append(s)
        for k in keys:
            sb = self.blocks[k]
            seen = ins.get(k, {})
            for name, v in sb.cross:
                if seen.get(name) != frozenset([v]):
                    raise SpecializationError(
                        f"%{name} reaches this block from more than one specialization of its "
                        "definition; pass it as a block parameter across the context change",
                        self._where(k))

    def finalize(self):
        """Assemble the specialized function (before SSA repair)."""
        keys = self._reachable()
        self.check_context_flow(keys)
        preds = defaultdict(int)
        for k in keys:
            for e in self.blocks[k].edges:
                preds[e.key] += 1
        out_blocks = []
        block_ctx = {}
        trap_used = False
        entry_sb = self.blocks[self.entry_key]
        trampoline = preds[self.entry_key] > 0 or bool(entry_sb.params)
        if trampoline:
            args = self._edge_args(self.start_edge, entry_sb)
            out_blocks.append(_block("entry", (), (), Br(Target(entry_sb.label, args))))
            block_ctx["entry"] = ()
        for k in keys:
            sb = self.blocks[k]
            flushes = {}
            targets = []
            for e in sb.edges:
                t = self.blocks[e.key]
                targets.append(Target(t.label, self._edge_args(e, t)))
                for sk, addr, v in self._edge_flushes(e, t):
                    flushes[sk] = (addr, v)
            insts = list(sb.insts)
            for sk in sorted(flushes):
                insts.append(Inst(None, "store.64", flushes[sk]))
            term = _retarget(sb.term, targets)
            if isinstance(term, BrTable) and term.default.label == self.trap_label:
                trap_used = True
            out_blocks.append(_block(sb.label, sb.params, insts, term))
            block_ctx[sb.label] = sb.key[0]
        if trap_used:
            out_blocks.append(_block(self.trap_label, (), (), Trap(SPLIT_TRAP)))
            block_ctx[self.trap_label] = None
        f = Function(self.req.output_name, self.f.params, self.f.result, tuple(out_blocks))
        return f, CutInfo(block_ctx, f.entry)


def _block(label, params, insts, term):
    return Block(label, tuple(params), tuple(insts), term)


def _retarget(term, targets):
    """Fill in edge arguments; ``targets`` follows the order edges were made."""
    it = iter(targets)
    if isinstance(term, Br):
        return Br(next(it))
    if isinstance(term, BrIf):
        return BrIf(term.cond, next(it), next(it))
    if isinstance(term, BrTable):
        cases = tuple(next(it) for _ in term.cases)
        # a value split's default goes to the shared trap block, not an edge
        default = term.default if len(targets) == len(cases) else next(it)
        return BrTable(term.selector, cases, default)
    return term


def specialize_raw(m: Module, req: SpecializationRequest, limits: Limits = None):
    """Run the worklist and return ``(function, cutinfo, specializer)`` without SSA repair."""
    sp = Specializer(m, req, limits).run()
    f, info = sp.finalize()
    return f, info, sp
