"""Pure-Python execution kernel (fallback for the compiled ``_kernel``).

Slots start as ``None`` so a read of an undefined SSA value surfaces as a
trap instead of silently producing garbage; the compiled kernel cannot
detect that case.
"""
from .lower import (
    ADD, AND, BR, BRIF, BRTABLE, CALL, EQ, LOAD8, LOAD32, LOAD64, LTS, LTU,
    MOV, MUL, NE, OR, PRINT, RET, SELECT, SHL, SHR, STORE8, STORE32, STORE64,
    SUB, TRAP, TRUNC, XOR,
)

M64 = 0xFFFF_FFFF_FFFF_FFFF
M32 = 0xFFFF_FFFF

BACKEND = "python"


class _Trap(Exception):
    pass


def execute(low, fidx, args, mem, watch_lo, watch_hi, fuel, max_depth=10000):
    """Run function ``fidx`` of a lowered module.

    Returns ``(status, value, message, insts, loads, stores, branches,
    prints, watch_counts)`` with status 0 for a return and 1 for a trap.
    """
    code, edges, funcs, cslots, cvals = low.as_lists()
    memsize = len(mem)
    nwatch = len(watch_lo)
    wcounts = [0] * nwatch
    prints = []
    insts = loads = stores = branches = 0
    frames = []

    def new_frame(fi, vals):
        base = fi * 5
        sl = [None] * funcs[base + 1]
        sl[:len(vals)] = vals
        k0 = funcs[base + 3]
        for k in range(k0, k0 + funcs[base + 4]):
            sl[cslots[k]] = cvals[k]
        return sl

    def watch(a, size):
        for i in range(nwatch):
            if a < watch_hi[i] and a + size > watch_lo[i]:
                wcounts[i] += 1

    slots = new_frame(fidx, list(args))
    pc = funcs[fidx * 5]
    status, value, message = 1, None, None
    try:
        while True:
            if insts >= fuel:
                raise _Trap("out of fuel")
            insts += 1
            op = code[pc]
            if op <= LTS:
                a = slots[code[pc + 2]]
                b = slots[code[pc + 3]]
                m = M64 if code[pc + 4] == 64 else M32
                if op == ADD:
                    r = (a + b) & m
                elif op == SUB:
                    r = (a - b) & m
                elif op == MUL:
                    r = (a * b) & m
                elif op == AND:
                    r = a & b
                elif op == OR:
                    r = a | b
                elif op == XOR:
                    r = a ^ b
                elif op == SHL:
                    r = (a << (b & (code[pc + 4] - 1))) & m
                elif op == SHR:
                    r = a >> (b & (code[pc + 4] - 1))
                elif op == EQ:
                    r = int(a == b)
                elif op == NE:
                    r = int(a != b)
                elif op == LTU:
                    r = int(a < b)
                else:
                    sb = 1 << (code[pc + 4] - 1)
                    r = int((a ^ sb) < (b ^ sb))
                slots[code[pc + 1]] = r
                pc += 5
            elif op == BR:
                branches += 1
                e = code[pc + 1]
                n = edges[e + 1]
                if n:
                    vals = [slots[x] for x in edges[e + 2:e + 2 + n]]
                    for d, v in zip(edges[e + 2 + n:e + 2 + 2 * n], vals):
                        slots[d] = v
                pc = edges[e]
            elif op == LOAD64 or op == LOAD32 or op == LOAD8:
                a = slots[code[pc + 2]]
                size = 8 if op == LOAD64 else 4 if op == LOAD32 else 1
                if a + size > memsize:
                    raise _Trap("out of bounds memory access")
                loads += 1
                if nwatch:
                    watch(a, size)
                slots[code[pc + 1]] = int.from_bytes(mem[a:a + size], "little")
                pc += 3
            elif op == STORE64 or op == STORE32 or op == STORE8:
                a = slots[code[pc + 1]]
                v = slots[code[pc + 2]]
                size = 8 if op == STORE64 else 4 if op == STORE32 else 1
                if a + size > memsize:
                    raise _Trap("out of bounds memory access")
                stores += 1
                mem[a:a + size] = (v & ((1 << (8 * size)) - 1)).to_bytes(size, "little")
                pc += 3
            elif op == BRIF or op == BRTABLE:
                branches += 1
                sel = slots[code[pc + 1]]
                if op == BRIF:
                    e = code[pc + 2] if sel != 0 else code[pc + 3]
                else:
                    n = code[pc + 2]
                    e = code[pc + 3 + sel] if sel < n else code[pc + 3 + n]
                n = edges[e + 1]
                if n:
                    vals = [slots[x] for x in edges[e + 2:e + 2 + n]]
                    for d, v in zip(edges[e + 2 + n:e + 2 + 2 * n], vals):
                        slots[d] = v
                pc = edges[e]
                if sel is None:
                    raise TypeError
            elif op == MOV:
                slots[code[pc + 1]] = slots[code[pc + 2]]
                pc += 3
            elif op == SELECT:
                c = slots[code[pc + 2]]
                if c is None:
                    raise TypeError
                slots[code[pc + 1]] = slots[code[pc + 3]] if c != 0 else slots[code[pc + 4]]
                pc += 5
            elif op == TRUNC:
                slots[code[pc + 1]] = slots[code[pc + 2]] & M32
                pc += 3
            elif op == PRINT:
                v = slots[code[pc + 1]]
                if v is None:
                    raise TypeError
                prints.append(v)
                pc += 2
            elif op == CALL:
                nargs = code[pc + 3]
                vals = [slots[x] for x in code[pc + 4:pc + 4 + nargs]]
                if len(frames) >= max_depth:
                    raise _Trap("call stack exhausted")
                frames.append((slots, pc + 4 + nargs, code[pc + 1]))
                fi = code[pc + 2]
                slots = new_frame(fi, vals)
                pc = funcs[fi * 5]
            elif op == RET:
                x = code[pc + 1]
                v = slots[x] if x >= 0 else None
                if x >= 0 and v is None:
                    raise TypeError
                if not frames:
                    status, value = 0, v
                    break
                slots, pc, dst = frames.pop()
                if dst >= 0:
                    slots[dst] = v
            elif op == TRAP:
                raise _Trap(low.messages[code[pc + 1]])
            else:
                raise RuntimeError(f"bad opcode {op} at {pc}")
    except _Trap as t:
        message = str(t)
    except (TypeError, AttributeError):
        message = "undefined SSA value"
    return status, value, message, insts, loads, stores, branches, prints, wcounts
