"""Random structurally valid Min programs and the differential harness.

Programs are generated at the assembler level from a few templates:
straight-line register traffic, forward conditional skips, forward jumps
over dead code, and counted loops (nesting depth at most 2) whose counters
live in registers the loop bodies never write.  Every program terminates.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..executor import run
from ..specializer import polyfill_module, specialize_function
from ..specializer.errors import SpecializationError
from .interp import BYTECODE_BASE, interp_name, load_program, min_request, shipped_module
from .isa import assemble

DATA_REGS = tuple(range(9))  # register 8 starts out holding the input
ONE = 31
COUNTER_BASE = 16
MAX_DEPTH = 2


class ProgramGen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.lines = []
        self.nlabels = 0

    def label(self) -> str:
        self.nlabels += 1
        return f"L{self.nlabels}"

    def imm(self) -> int:
        r = self.rng.random()
        if r < 0.7:
            return self.rng.randrange(0, 11)
        if r < 0.9:
            return self.rng.randrange(0, 1000)
        return self.rng.randrange(0, 1 << 64)

    def emit(self, text: str):
        self.lines.append(f"        {text}")

    def place(self, label: str):
        self.lines.append(f"{label}:")

    def segment(self, depth: int, budget: int):
        rng = self.rng
        for _ in range(budget):
            r = rng.random()
            if r < 0.18:
                self.emit(f"LOAD_IMMEDIATE {self.imm()}")
            elif r < 0.34:
                self.emit(f"STORE_REG {rng.choice(DATA_REGS)}")
            elif r < 0.48:
                self.emit(f"LOAD_REG {rng.choice(DATA_REGS)}")
            elif r < 0.68:
                op = rng.choice(("ADD", "ADD", "SUB", "MUL"))
                self.emit(f"{op} {rng.choice(DATA_REGS)}")
            elif r < 0.76:
                self.emit("PRINT")
            elif r < 0.86:
                skip = self.label()
                self.emit(f"JMPNZ {skip}")
                self.segment(depth, rng.randrange(1, 4))
                self.place(skip)
            elif r < 0.90:
                over = self.label()
                self.emit(f"JMP {over}")
                self.segment(depth, rng.randrange(1, 3))
                self.place(over)
            elif depth < MAX_DEPTH:
                self.loop(depth)

    def loop(self, depth: int):
        counter = COUNTER_BASE + depth
        head = self.label()
        self.emit(f"LOAD_IMMEDIATE {self.rng.randrange(1, 5)}")
        self.emit(f"STORE_REG {counter}")
        self.place(head)
        self.segment(depth + 1, self.rng.randrange(1, 6))
        self.emit(f"LOAD_REG {counter}")
        self.emit(f"SUB {ONE}")
        self.emit(f"STORE_REG {counter}")
        self.emit(f"JMPNZ {head}")

    def program(self) -> str:
        self.emit("STORE_REG 8")
        self.emit("LOAD_IMMEDIATE 1")
        self.emit(f"STORE_REG {ONE}")
        self.emit("LOAD_REG 8")
        self.segment(0, self.rng.randrange(3, 12))
        if self.rng.random() < 0.7:
            self.emit(f"LOAD_REG {self.rng.choice(DATA_REGS)}")
            self.emit("PRINT")
        self.emit("HALT")
        return "\n".join(self.lines) + "\n"


def case_seed(seed: int, index: int) -> int:
    return seed * 1_000_003 + index


def generate_program(seed: int, index: int = 0) -> str:
    return ProgramGen(random.Random(case_seed(seed, index))).program()


def case_args(seed: int, index: int) -> list:
    rng = random.Random(~case_seed(seed, index))
    return [0, rng.randrange(1, 4), rng.randrange(0, 1 << 64)]


@dataclass
class Divergence:
    index: int
    seed: int
    source: str
    detail: str

    def format(self) -> str:
        return (f"divergence in case {self.index} (seed {self.seed}): {self.detail}\n"
                f"repro: futamura fuzz --seed {self.seed} --start {self.index} --cases 1\n"
                f"program:\n{self.source}")


@dataclass
class FuzzReport:
    cases: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_program(source: str, args, variants=("plain", "state"), modes=("hsca", "naive"),
                  jmpnz: str = "backedges", module=None):
    """Compare polyfilled interpreter and specialized function; returns (checks, problems)."""
    program = assemble(source)
    base = load_program(module or shipped_module(), program)
    poly, _ = polyfill_module(base)
    size = base.memory.size
    problems = []
    checks = 0
    for variant in variants:
        name = interp_name(variant, jmpnz)
        expected = [run(poly, name, [BYTECODE_BASE, a]) for a in args]
        for mode in modes:
            out = f"{name}_fz"
            try:
                f = specialize_function(base, min_request(program, variant, jmpnz, out), mode,
                                        check_input=False).function
            except SpecializationError as e:
                problems.append(f"{variant}/{jmpnz}/{mode}: specialization failed: {e}")
                continue
            sm = base.with_function(f)
            for a, ref in zip(args, expected):
                got = run(sm, out, [BYTECODE_BASE, a])
                checks += 1
                if got.observable() != ref.observable():
                    problems.append(f"{variant}/{jmpnz}/{mode} arg={a}: interpreter "
                                    f"{ref.observable()} vs specialized {got.observable()}")
                elif got.final_memory.to_bytes()[:size] != ref.final_memory.to_bytes()[:size]:
                    problems.append(f"{variant}/{jmpnz}/{mode} arg={a}: final memory differs")
    return checks, problems


def fuzz(seed: int, cases: int, start: int = 0, variants=("plain", "state"),
         modes=("hsca", "naive"), stop_on_failure: bool = True) -> FuzzReport:
    """Run ``cases`` generated programs; odd cases use the split JMPNZ interpreters."""
    report = FuzzReport()
    module = shipped_module()
    for i in range(start, start + cases):
        source = generate_program(seed, i)
        jmpnz = "split" if i % 2 else "backedges"
        checks, problems = check_program(source, case_args(seed, i), variants, modes, jmpnz, module)
        report.cases += 1
        report.checks += checks
        if problems:
            report.failures.append(Divergence(i, seed, source, problems[0]))
            if stop_on_failure:
                break
    return report
