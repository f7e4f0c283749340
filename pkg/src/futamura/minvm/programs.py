"""Bundled Min programs and the benchmark suite."""
from __future__ import annotations

from importlib import resources

from .isa import MinProgram, assemble

# programs used by the benchmark and erasure checks
SUITE = ("sum", "nested", "regpressure", "factorial", "fib", "add_only")


def program_names() -> list:
    root = resources.files(__package__).joinpath("programs")
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".min"))


def program_source(name: str) -> str:
    return resources.files(__package__).joinpath("programs", f"{name}.min").read_text()


def load(name: str) -> MinProgram:
    return assemble(program_source(name))


def sum_source(n: int) -> str:
    """Sum of 1..n, printed and returned."""
    return f"""\
        LOAD_IMMEDIATE {n}
        STORE_REG 0
        LOAD_IMMEDIATE 0
        STORE_REG 1
        LOAD_IMMEDIATE 1
        STORE_REG 2
loop:   LOAD_REG 1
        ADD 0
        STORE_REG 1
        LOAD_REG 0
        SUB 2
        STORE_REG 0
        JMPNZ loop
        LOAD_REG 1
        PRINT
        HALT
"""


def sum_program(n: int) -> MinProgram:
    return assemble(sum_source(n))
