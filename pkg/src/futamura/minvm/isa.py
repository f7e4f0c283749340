"""Min: a 64-bit unsigned register machine with an accumulator.

Encoding: one u64 word for the opcode, followed by one u64 word per operand.
``SWITCH`` is an extension beyond the ten base instructions; only
interpreters built with ``switch=True`` accept it.
"""
from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field

LOAD_IMMEDIATE = 0
LOAD_REG = 1
STORE_REG = 2
ADD = 3
SUB = 4
MUL = 5
JMP = 6
JMPNZ = 7
PRINT = 8
HALT = 9
SWITCH = 10

# mnemonic -> (opcode, operand kinds); "imm" any u64, "reg" a register, "pc" a jump target
INSTRUCTIONS = {
    "LOAD_IMMEDIATE": (LOAD_IMMEDIATE, ("imm",)),
    "LOAD_REG": (LOAD_REG, ("reg",)),
    "STORE_REG": (STORE_REG, ("reg",)),
    "ADD": (ADD, ("reg",)),
    "SUB": (SUB, ("reg",)),
    "MUL": (MUL, ("reg",)),
    "JMP": (JMP, ("pc",)),
    "JMPNZ": (JMPNZ, ("pc",)),
    "PRINT": (PRINT, ()),
    "HALT": (HALT, ()),
    "SWITCH": (SWITCH, ("pc", "pc", "pc", "pc")),
}
MNEMONICS = {op: name for name, (op, _) in INSTRUCTIONS.items()}
BASE_OPCODES = tuple(range(10))
NUM_REGISTERS = 256
U64 = (1 << 64) - 1


class AsmError(Exception):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass
class MinProgram:
    words: list
    labels: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.words)

    def to_bytes(self) -> bytes:
        return struct.pack(f"<{len(self.words)}Q", *self.words)

    @classmethod
    def from_bytes(cls, data: bytes) -> "MinProgram":
        if len(data) % 8:
            raise AsmError("program image length is not a multiple of 8")
        return cls(list(struct.unpack(f"<{len(data) // 8}Q", data)))

    def uses_extension(self) -> bool:
        return any(op == SWITCH for _, op, _ in decode(self.words))


def decode(words):
    """Yield ``(pc, opcode, operands)``; raises on a truncated or unknown instruction."""
    pc = 0
    while pc < len(words):
        op = words[pc]
        if op not in MNEMONICS:
            raise AsmError(f"unknown opcode {op} at pc {pc}")
        n = len(INSTRUCTIONS[MNEMONICS[op]][1])
        if pc + 1 + n > len(words):
            raise AsmError(f"truncated {MNEMONICS[op]} at pc {pc}")
        yield pc, op, list(words[pc + 1:pc + 1 + n])
        pc += 1 + n


def disassemble(words) -> str:
    lines = []
    for pc, op, operands in decode(words):
        text = " ".join([MNEMONICS[op]] + [str(x) for x in operands])
        lines.append(f"{text:<28}; pc {pc}")
    return "\n".join(lines) + "\n"


_LABEL = re.compile(r"^([A-Za-z_.$][\w.$]*)\s*:\s*(.*)$")


def _number(tok):
    try:
        v = int(tok, 0)
    except ValueError:
        return None
    if v < -(1 << 63) or v > U64:
        raise ValueError(tok)
    return v & U64


def assemble(text: str) -> MinProgram:
    """Assemble Min text: one instruction per line, ``LABEL:`` definitions, ``;`` comments."""
    items = []  # (line, mnemonic, operand tokens, pc)
    labels = {}
    pc = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].strip()
        while line:
            mt = _LABEL.match(line)
            if not mt:
                break
            name = mt.group(1)
            if name in labels:
                raise AsmError(f"label {name!r} defined twice", lineno)
            if name.upper() in INSTRUCTIONS:
                raise AsmError(f"label {name!r} shadows a mnemonic", lineno)
            labels[name] = pc
            line = mt.group(2).strip()
        if not line:
            continue
        toks = line.replace(",", " ").split()
        mnem = toks[0].upper()
        if mnem not in INSTRUCTIONS:
            raise AsmError(f"unknown mnemonic {toks[0]!r}", lineno)
        kinds = INSTRUCTIONS[mnem][1]
        if len(toks) - 1 != len(kinds):
            raise AsmError(f"{mnem} takes {len(kinds)} operand(s), got {len(toks) - 1}", lineno)
        items.append((lineno, mnem, toks[1:], pc))
        pc += 1 + len(kinds)
    if not items:
        raise AsmError("empty program")

    boundaries = {it[3] for it in items}
    words = []
    for lineno, mnem, toks, ipc in items:
        op, kinds = INSTRUCTIONS[mnem]
        words.append(op)
        for kind, tok in zip(kinds, toks):
            try:
                v = _number(tok)
            except ValueError:
                raise AsmError(f"operand {tok!r} out of u64 range", lineno) from None
            if kind == "pc":
                if v is None:
                    if tok not in labels:
                        raise AsmError(f"undefined label {tok!r}", lineno)
                    v = labels[tok]
                if v not in boundaries:
                    raise AsmError(f"jump target {v} is not an instruction boundary", lineno)
            elif v is None:
                raise AsmError(f"expected a number, got {tok!r}", lineno)
            elif kind == "reg" and v >= NUM_REGISTERS:
                raise AsmError(f"register {v} out of range (0..{NUM_REGISTERS - 1})", lineno)
            words.append(v)
    last = items[-1]
    if last[1] not in ("HALT", "JMP"):
        raise AsmError(f"execution can fall off the end after {last[1]}", last[0])
    return MinProgram(words, labels)
