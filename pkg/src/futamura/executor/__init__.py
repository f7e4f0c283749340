"""Reference executor for the IR: the semantic oracle for every transform.

The inner loop lives in a kernel module.  The compiled ``_kernel`` (Cython)
is used when it is importable; ``_kernel_py`` is the pure-Python fallback.
Set ``FUTAMURA_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

from ..ir.types import MASK, Const, MemoryImage, Module
from . import _kernel_py
from .lower import Lowered, LoweringError, lower_module
from .scalar import eval_scalar

try:
    if os.environ.get("FUTAMURA_PURE_PYTHON"):
        raise ImportError("pure Python kernel requested")
    from . import _kernel as _default_kernel
except ImportError:
    _default_kernel = _kernel_py

BACKEND = _default_kernel.BACKEND
KERNELS = {"python": _kernel_py}
if _default_kernel is not _kernel_py:
    KERNELS[_default_kernel.BACKEND] = _default_kernel

DEFAULT_FUEL = 100_000_000


@dataclass
class ExecMetrics:
    insts_executed: int = 0
    loads: int = 0
    stores: int = 0
    loads_in_range: dict = field(default_factory=dict)
    branches: int = 0
    prints: list = field(default_factory=list)


@dataclass
class ExecResult:
    value: Optional[int]
    trap: Optional[str]
    metrics: ExecMetrics
    final_memory: MemoryImage

    @property
    def returned(self) -> bool:
        return self.trap is None

    def outcome(self):
        return ("trap", self.trap) if self.trap is not None else ("return", self.value)

    def observable(self):
        """Return value or trap message plus the print trace."""
        return self.outcome(), tuple(self.metrics.prints)


def lowered(m: Module, func: str) -> Lowered:
    # modules are immutable, so the lowering is cached on the instance
    cache = m.__dict__.get("_lowered")
    if cache is None:
        cache = {}
        object.__setattr__(m, "_lowered", cache)
    low = cache.get(func)
    if low is None:
        low = cache[func] = lower_module(m, func)
    return low


def run(m: Module, func: str, args=(), watch_ranges=None, fuel: int = DEFAULT_FUEL,
        backend: Optional[str] = None, max_depth: int = 10000) -> ExecResult:
    """Execute ``func`` with concrete ``args``.

    ``watch_ranges`` maps a label to ``(start, length)``; loads overlapping a
    range are counted in ``metrics.loads_in_range[label]``.  Raises
    :class:`LoweringError` if the function (or a callee) still contains
    intrinsics, and ``ValueError`` on an argument count mismatch.
    """
    f = m.function(func)
    if len(args) != len(f.params):
        raise ValueError(f"@{func} takes {len(f.params)} arguments, got {len(args)}")
    vals = []
    for a, (_, ty) in zip(args, f.params):
        v = a.value if isinstance(a, Const) else int(a)
        vals.append(v & MASK[ty])
    kernel = KERNELS[backend] if backend else _default_kernel
    low = lowered(m, func)
    watch_ranges = watch_ranges or {}
    labels = list(watch_ranges)
    lo = [watch_ranges[k][0] for k in labels]
    hi = [watch_ranges[k][0] + watch_ranges[k][1] for k in labels]
    mem = m.memory.to_bytearray()
    (status, value, message, insts, loads, stores, branches, prints,
     wcounts) = kernel.execute(low, low.index[func], vals, mem, lo, hi, fuel, max_depth)
    metrics = ExecMetrics(insts, loads, stores, dict(zip(labels, wcounts)), branches, list(prints))
    final = MemoryImage(len(mem), ((0, bytes(mem)),) if mem else ())
    if status == 0:
        return ExecResult(value, None, metrics, final)
    return ExecResult(None, message, metrics, final)


__all__ = [
    "BACKEND", "DEFAULT_FUEL", "ExecMetrics", "ExecResult", "KERNELS",
    "LoweringError", "eval_scalar", "run",
]
