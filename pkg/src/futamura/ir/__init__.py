from .types import (
    BITS, I32, I64, MASK, Block, Br, BrIf, BrTable, Const, Function, Inst,
    MemoryImage, Module, Return, Target, Trap,
)
from .text import ParseError, format_function, parse_module, print_module
from .validate import Diagnostic, module_signatures, validate, value_types

__all__ = [
    "BITS", "I32", "I64", "MASK", "Block", "Br", "BrIf", "BrTable", "Const",
    "Function", "Inst", "MemoryImage", "Module", "Return", "Target", "Trap",
    "ParseError", "format_function", "parse_module", "print_module",
    "Diagnostic", "module_signatures", "validate", "value_types",
]
