"""Core data types of the SSA control-flow-graph IR.

Everything here is an immutable dataclass built from tuples, so structural
equality (``==``) is exactly the round-trip notion used by the printer and
parser tests.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

I32 = "i32"
I64 = "i64"
SCALAR_TYPES = (I32, I64)

MASK = {I32: 0xFFFF_FFFF, I64: 0xFFFF_FFFF_FFFF_FFFF}
BITS = {I32: 32, I64: 64}


@dataclass(frozen=True)
class Const:
    """A typed integer scalar.

    Used as an immediate operand in instructions, as the concrete value type
    of the executor's scalar evaluator, and as the ``Const`` element of the
    constant-propagation lattice.  The payload is always stored unsigned and
    already wrapped to the type's width.
    """

    ty: str
    value: int

    def __post_init__(self):
        if self.ty not in MASK:
            raise ValueError(f"unknown scalar type {self.ty!r}")
        object.__setattr__(self, "value", self.value & MASK[self.ty])

    def signed(self) -> int:
        bits = BITS[self.ty]
        v = self.value
        return v - (1 << bits) if v >> (bits - 1) else v

    def __repr__(self):
        return f"Const({self.ty}, {self.value})"


# An operand is either the name of an SSA value (without the ``%`` sigil)
# or an immediate.
Operand = Union[str, Const]


@dataclass(frozen=True)
class Inst:
    result: Optional[str]
    op: str
    args: tuple = ()
    callee: Optional[str] = None


@dataclass(frozen=True)
class Target:
    label: str
    args: tuple = ()


@dataclass(frozen=True)
class Br:
    target: Target

    def targets(self):
        return (self.target,)


@dataclass(frozen=True)
class BrIf:
    cond: Operand
    then: Target
    else_: Target

    def targets(self):
        return (self.then, self.else_)


@dataclass(frozen=True)
class BrTable:
    selector: Operand
    cases: tuple
    default: Target

    def targets(self):
        return self.cases + (self.default,)


@dataclass(frozen=True)
class Return:
    value: Optional[Operand] = None

    def targets(self):
        return ()


@dataclass(frozen=True)
class Trap:
    message: str

    def targets(self):
        return ()


Terminator = Union[Br, BrIf, BrTable, Return, Trap]


@dataclass(frozen=True)
class Block:
    label: str
    params: tuple  # ((name, type), ...)
    insts: tuple
    term: Terminator


@dataclass(frozen=True)
class Function:
    name: str
    params: tuple  # ((name, type), ...)
    result: Optional[str]
    blocks: tuple
    entry: str = ""

    def __post_init__(self):
        if not self.entry and self.blocks:
            object.__setattr__(self, "entry", self.blocks[0].label)

    def block(self, label: str) -> Block:
        for b in self.blocks:
            if b.label == label:
                return b
        raise KeyError(label)

    def block_map(self) -> dict:
        return {b.label: b for b in self.blocks}


@dataclass(frozen=True)
class MemoryImage:
    size: int
    init: tuple = ()  # ((offset, bytes), ...)

    def to_bytearray(self) -> bytearray:
        mem = bytearray(self.size)
        for off, data in self.init:
            mem[off:off + len(data)] = data
        return mem

    def to_bytes(self) -> bytes:
        return bytes(self.to_bytearray())

    def read(self, addr: int, size: int) -> bytes:
        """Bytes ``[addr, addr+size)`` of the initial image."""
        out = bytearray(size)
        end = addr + size
        for off, data in self.init:
            lo, hi = max(off, addr), min(off + len(data), end)
            if lo < hi:
                out[lo - addr:hi - addr] = data[lo - off:hi - off]
        return bytes(out)

    @classmethod
    def from_bytes(cls, data: bytes) -> "MemoryImage":
        """Compact image: one segment per run of non-zero bytes."""
        segs = []
        i, n = 0, len(data)
        while i < n:
            if data[i] == 0:
                i += 1
                continue
            j = i
            while j < n and data[j] != 0:
                j += 1
            segs.append((i, bytes(data[i:j])))
            i = j
        return cls(n, tuple(segs))


@dataclass(frozen=True)
class Module:
    functions: tuple = ()
    memory: MemoryImage = field(default_factory=lambda: MemoryImage(0))
    entry: Optional[str] = None

    def function(self, name: str) -> Function:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def has_function(self, name: str) -> bool:
        return any(f.name == name for f in self.functions)

    def with_function(self, f: Function) -> "Module":
        return Module(self.functions + (f,), self.memory, self.entry)

    def replace_function(self, f: Function) -> "Module":
        funcs = tuple(f if g.name == f.name else g for g in self.functions)
        return Module(funcs, self.memory, self.entry)
