"""Two-level constant-propagation lattice and per-opcode transfer functions.

Lattice elements are :class:`~futamura.ir.Const` (a known scalar) and the
singleton :data:`UNKNOWN`.  The order is ``Const <= Unknown``.
"""
from __future__ import annotations

import contextlib
import logging
from dataclasses import dataclass

from .executor.scalar import eval_scalar
from .ir import opcodes
from .ir.types import Const, MemoryImage

log = logging.getLogger(__name__)


class _Unknown:
    __slots__ = ()

    def __repr__(self):
        return "Unknown"

    def __reduce__(self):
        return "UNKNOWN"


UNKNOWN = _Unknown()


def is_const(v) -> bool:
    return isinstance(v, Const)


def meet(a, b):
    if a is UNKNOWN or b is UNKNOWN:
        return UNKNOWN
    if a.ty != b.ty:
        log.warning("meet of differently typed constants %r and %r", a, b)
        return UNKNOWN
    return a if a.value == b.value else UNKNOWN


def leq(a, b) -> bool:
    """Lattice order: every element is below Unknown; consts only below themselves."""
    return b is UNKNOWN or a == b


@dataclass(frozen=True)
class ConstRanges:
    """Byte ranges ``(start, length)`` promised immutable for one specialization."""

    ranges: tuple = ()

    def covers(self, addr: int, size: int) -> bool:
        for start, length in self.ranges:
            if start <= addr and addr + size <= start + length:
                return True
        return False

    def check(self, memory: MemoryImage):
        spans = sorted(self.ranges)
        for start, length in spans:
            if start < 0 or length < 0 or start + length > memory.size:
                raise ValueError(f"constant range [{start}, {start + length}) out of bounds")
        for (a, la), (b, _) in zip(spans, spans[1:]):
            if b < a + la:
                raise ValueError("constant ranges overlap")


NO_RANGES = ConstRanges()

# opcodes whose folding is deliberately broken; only for fuzz harness self-checks
_faulty = set()


@contextlib.contextmanager
def injected_fault(op: str):
    """Make constant folding of ``op`` off by one while the context is active."""
    _faulty.add(op)
    try:
        yield
    finally:
        _faulty.discard(op)


def fold_load(op: str, addr: Const, ranges: ConstRanges, memory: MemoryImage):
    size, ty = opcodes.LOADS[op]
    if not ranges.covers(addr.value, size):
        return UNKNOWN
    return Const(ty, int.from_bytes(memory.read(addr.value, size), "little"))


def transfer(op: str, args, ranges: ConstRanges = NO_RANGES, memory: MemoryImage = None):
    """Abstract result of ``op`` on abstract ``args``.

    ``const.*`` takes its immediate as the single argument.  Loads fold only
    when the address is known and the whole accessed span lies inside one
    constant range.  Side-effecting opcodes always yield Unknown.
    """
    if op == "select":
        c, a, b = args
        if c is UNKNOWN:
            return a if a is not UNKNOWN and a == b else UNKNOWN
        return a if c.value != 0 else b
    if op in opcodes.PURE:
        if any(a is UNKNOWN for a in args):
            return UNKNOWN
        r = eval_scalar(op, args)
        if op in _faulty:
            r = Const(r.ty, r.value + 1)
        return r
    if op in opcodes.LOADS:
        addr = args[0]
        if addr is UNKNOWN or memory is None:
            return UNKNOWN
        return fold_load(op, addr, ranges, memory)
    return UNKNOWN
