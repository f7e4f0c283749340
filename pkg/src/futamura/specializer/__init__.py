"""Specialize a generic function (typically an interpreter) against a request."""
from __future__ import annotations

from dataclasses import dataclass

from ..ir import module_signatures, validate
from ..ir.types import Function, Module
from .core import SLOT, Limits, SplitElem, Specializer, specialize_raw
from .errors import (
    AssertConstFailed, FixpointLimitExceeded, NonConstContext, SpecializationError,
)
from .polyfill import CONTEXT_ONLY, PolyfillError, polyfill_intrinsics, polyfill_module
from .request import (
    RequestError, RunTime, SpecializationRequest, SpecializedConst, SpecializedMemory,
    parse_request, parse_requests,
)
from .ssa_repair import RepairError, RepairStats, repair, ssa_repair, ssa_repair_naive

REPAIR_MODES = ("hsca", "naive")


@dataclass
class SpecializationResult:
    function: Function
    repair: RepairStats
    specializer: Specializer


def specialize_function(m: Module, req: SpecializationRequest, ssa_repair: str = "hsca",
                        limits: Limits = None, check_input: bool = True) -> SpecializationResult:
    """Specialize and repair, returning the new function without appending it."""
    if ssa_repair not in REPAIR_MODES:
        raise ValueError(f"unknown SSA repair mode {ssa_repair!r}")
    if check_input:
        diags = validate(m)
        if diags:
            raise SpecializationError(f"input module does not validate: {diags[0]}")
    if m.has_function(req.output_name):
        raise SpecializationError(f"output name @{req.output_name} already exists")
    f, info, sp = specialize_raw(m, req, limits)
    sigs = module_signatures(m)
    f, stats = repair(f, info.block_ctx, ssa_repair, sigs)
    diags = validate(m.with_function(f))
    if diags:
        raise SpecializationError(f"specialized output does not validate: {diags[0]}")
    return SpecializationResult(f, stats, sp)


def specialize(m: Module, req: SpecializationRequest, ssa_repair: str = "hsca",
               limits: Limits = None) -> Module:
    """Return ``m`` with the specialized function appended."""
    return m.with_function(specialize_function(m, req, ssa_repair, limits).function)


def specialize_all(m: Module, reqs, ssa_repair: str = "hsca", limits: Limits = None) -> Module:
    """Apply requests in order; each runs against the original module."""
    out = m
    for req in reqs:
        if out.has_function(req.output_name):
            raise SpecializationError(f"output name @{req.output_name} already exists")
        out = out.with_function(specialize_function(m, req, ssa_repair, limits).function)
    return out


__all__ = [
    "AssertConstFailed", "CONTEXT_ONLY", "FixpointLimitExceeded", "Limits", "NonConstContext",
    "PolyfillError", "REPAIR_MODES", "RepairError", "RepairStats", "RequestError", "RunTime",
    "SLOT", "SpecializationError", "SpecializationRequest", "SpecializationResult",
    "SpecializedConst", "SpecializedMemory", "SplitElem", "Specializer", "parse_request",
    "parse_requests", "polyfill_intrinsics", "polyfill_module", "repair", "specialize",
    "specialize_all", "specialize_function", "specialize_raw", "ssa_repair", "ssa_repair_naive",
]
