"""Min register machine: ISA, assembler, annotated interpreters, benchmarks."""
from .interp import (
    BYTECODE_BASE, JMPNZ_STYLES, REGISTER_BASE, REGISTER_BYTES, VARIANTS, build_min_interpreter,
    bytecode_range, interp_name, interpreter_text, load_program, min_module, min_request,
    module_text, shipped_module,
)
from .isa import AsmError, MinProgram, assemble, decode, disassemble

__all__ = [
    "AsmError", "BYTECODE_BASE", "JMPNZ_STYLES", "MinProgram", "REGISTER_BASE",
    "REGISTER_BYTES", "VARIANTS", "assemble", "build_min_interpreter", "bytecode_range",
    "decode", "disassemble", "interp_name", "interpreter_text", "load_program", "min_module",
    "min_request", "module_text", "shipped_module",
]
