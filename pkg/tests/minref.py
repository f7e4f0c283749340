"""Direct Python model of Min, independent of the IR interpreters."""
from futamura.minvm.isa import INSTRUCTIONS

M = (1 << 64) - 1
OPS = {op: name for name, (op, _) in INSTRUCTIONS.items()}


def run_min(words, acc=0, fuel=1_000_000):
    """Return ``(outcome, prints)`` with outcome ``("return", acc)`` or ``("trap", msg)``."""
    regs = [0] * 256
    prints = []
    pc = 0
    for _ in range(fuel):
        if pc >= len(words) or words[pc] not in OPS:
            return ("trap", "bad opcode"), prints
        name = OPS[words[pc]]
        arg = words[pc + 1] if pc + 1 < len(words) else None
        if name == "LOAD_IMMEDIATE":
            acc, pc = arg, pc + 2
        elif name == "LOAD_REG":
            acc, pc = regs[arg], pc + 2
        elif name == "STORE_REG":
            regs[arg], pc = acc, pc + 2
        elif name == "ADD":
            acc, pc = (acc + regs[arg]) & M, pc + 2
        elif name == "SUB":
            acc, pc = (acc - regs[arg]) & M, pc + 2
        elif name == "MUL":
            acc, pc = (acc * regs[arg]) & M, pc + 2
        elif name == "JMP":
            pc = arg
        elif name == "JMPNZ":
            pc = arg if acc else pc + 2
        elif name == "PRINT":
            prints.append(acc)
            pc += 1
        elif name == "HALT":
            return ("return", acc), prints
        else:  # SWITCH
            pc = words[pc + 1 + acc] if acc < 4 else pc + 5
    return ("trap", "out of fuel"), prints
