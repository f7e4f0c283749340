# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled execution kernel; same contract as ``_kernel_py.execute``."""
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memcpy
from libc.stdint cimport uint64_t, uint32_t, uint8_t

cdef enum:
    ADD = 0
    SUB = 1
    MUL = 2
    AND = 3
    OR = 4
    XOR = 5
    SHL = 6
    SHR = 7
    EQ = 8
    NE = 9
    LTU = 10
    LTS = 11
    SELECT = 12
    MOV = 13
    TRUNC = 14
    LOAD8 = 15
    LOAD32 = 16
    LOAD64 = 17
    STORE8 = 18
    STORE32 = 19
    STORE64 = 20
    PRINT = 21
    CALL = 22
    BR = 23
    BRIF = 24
    BRTABLE = 25
    RET = 26
    TRAP = 27

BACKEND = "cython"
OPCODE_COUNT = 28

DEF FUNC_FIELDS = 5

cdef uint64_t M32 = 0xFFFFFFFFULL


def execute(low, long long fidx, args, unsigned char[::1] mem, watch_lo, watch_hi,
            long long fuel, long long max_depth=10000):
    cdef long long[::1] code = low.code
    cdef long long[::1] edges = low.edges if len(low.edges) else _EMPTY_Q
    cdef long long[::1] funcs = low.funcs
    cdef long long[::1] cslots = low.const_slots if len(low.const_slots) else _EMPTY_Q
    cdef unsigned long long[::1] cvals = low.const_vals if len(low.const_vals) else _EMPTY_UQ
    cdef uint64_t memsize = mem.shape[0]
    cdef unsigned char* mp = &mem[0] if memsize > 0 else NULL
    cdef long long nwatch = len(watch_lo)
    cdef uint64_t* wlo = <uint64_t*>malloc(sizeof(uint64_t) * (nwatch + 1))
    cdef uint64_t* whi = <uint64_t*>malloc(sizeof(uint64_t) * (nwatch + 1))
    cdef long long* wcnt = <long long*>malloc(sizeof(long long) * (nwatch + 1))
    cdef long long i
    for i in range(nwatch):
        wlo[i] = watch_lo[i]
        whi[i] = watch_hi[i]
        wcnt[i] = 0

    cdef long long cap = 4096
    cdef uint64_t* vals = <uint64_t*>malloc(sizeof(uint64_t) * cap)
    cdef long long fcap = 64
    cdef long long* fr_base = <long long*>malloc(sizeof(long long) * fcap)
    cdef long long* fr_ret = <long long*>malloc(sizeof(long long) * fcap)
    cdef long long* fr_dst = <long long*>malloc(sizeof(long long) * fcap)
    cdef long long depth = 0
    cdef long long base = 0
    cdef long long top
    cdef uint64_t* sl
    cdef long long pc, op, e, n, k, fi, nslots, nargs, dst, x
    cdef long long insts = 0, loads = 0, stores = 0, branches = 0
    cdef uint64_t a, b, r, m, sb, v, size
    cdef uint64_t tmp[64]
    cdef uint64_t* tmpbuf
    cdef uint64_t sel
    cdef int status = 1
    cdef object value = None
    cdef object message = None
    cdef uint32_t v32
    prints = []

    # first frame
    fi = fidx
    nslots = funcs[fi * FUNC_FIELDS + 1]
    while nslots > cap:
        cap *= 2
    vals = <uint64_t*>realloc(vals, sizeof(uint64_t) * cap)
    sl = vals
    for i in range(nslots):
        sl[i] = 0
    for i, av in enumerate(args):
        sl[i] = av
    k = funcs[fi * FUNC_FIELDS + 3]
    for i in range(k, k + funcs[fi * FUNC_FIELDS + 4]):
        sl[cslots[i]] = cvals[i]
    top = nslots
    pc = funcs[fi * FUNC_FIELDS]

    try:
        while True:
            if insts >= fuel:
                message = "out of fuel"
                break
            insts += 1
            op = code[pc]
            if op <= LTS:
                a = sl[code[pc + 2]]
                b = sl[code[pc + 3]]
                m = 0xFFFFFFFFFFFFFFFFULL if code[pc + 4] == 64 else M32
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
                    r = (a << (b & <uint64_t>(code[pc + 4] - 1))) & m
                elif op == SHR:
                    r = a >> (b & <uint64_t>(code[pc + 4] - 1))
                elif op == EQ:
                    r = a == b
                elif op == NE:
                    r = a != b
                elif op == LTU:
                    r = a < b
                else:
                    sb = (<uint64_t>1) << (code[pc + 4] - 1)
                    r = (a ^ sb) < (b ^ sb)
                sl[code[pc + 1]] = r
                pc += 5
            elif op == BR or op == BRIF or op == BRTABLE:
                branches += 1
                if op == BR:
                    e = code[pc + 1]
                elif op == BRIF:
                    e = code[pc + 2] if sl[code[pc + 1]] != 0 else code[pc + 3]
                else:
                    sel = sl[code[pc + 1]]
                    n = code[pc + 2]
                    e = code[pc + 3 + <long long>sel] if sel < <uint64_t>n else code[pc + 3 + n]
                n = edges[e + 1]
                if n == 1:
                    sl[edges[e + 3]] = sl[edges[e + 2]]
                elif n > 1:
                    if n <= 64:
                        tmpbuf = &tmp[0]
                    else:
                        tmpbuf = <uint64_t*>malloc(sizeof(uint64_t) * n)
                    for i in range(n):
                        tmpbuf[i] = sl[edges[e + 2 + i]]
                    for i in range(n):
                        sl[edges[e + 2 + n + i]] = tmpbuf[i]
                    if n > 64:
                        free(tmpbuf)
                pc = edges[e]
            elif op == LOAD64 or op == LOAD32 or op == LOAD8:
                a = sl[code[pc + 2]]
                size = 8 if op == LOAD64 else (4 if op == LOAD32 else 1)
                if a > memsize or memsize - a < size:
                    message = "out of bounds memory access"
                    break
                loads += 1
                for i in range(nwatch):
                    if a < whi[i] and a + size > wlo[i]:
                        wcnt[i] += 1
                if op == LOAD64:
                    memcpy(&v, mp + a, 8)
                elif op == LOAD32:
                    memcpy(&v32, mp + a, 4)
                    v = v32
                else:
                    v = mp[a]
                sl[code[pc + 1]] = v
                pc += 3
            elif op == STORE64 or op == STORE32 or op == STORE8:
                a = sl[code[pc + 1]]
                v = sl[code[pc + 2]]
                size = 8 if op == STORE64 else (4 if op == STORE32 else 1)
                if a > memsize or memsize - a < size:
                    message = "out of bounds memory access"
                    break
                stores += 1
                if op == STORE64:
                    memcpy(mp + a, &v, 8)
                elif op == STORE32:
                    v32 = <uint32_t>v
                    memcpy(mp + a, &v32, 4)
                else:
                    mp[a] = <uint8_t>v
                pc += 3
            elif op == MOV:
                sl[code[pc + 1]] = sl[code[pc + 2]]
                pc += 3
            elif op == SELECT:
                sl[code[pc + 1]] = sl[code[pc + 3]] if sl[code[pc + 2]] != 0 else sl[code[pc + 4]]
                pc += 5
            elif op == TRUNC:
                sl[code[pc + 1]] = sl[code[pc + 2]] & M32
                pc += 3
            elif op == PRINT:
                prints.append(sl[code[pc + 1]])
                pc += 2
            elif op == CALL:
                if depth >= max_depth:
                    message = "call stack exhausted"
                    break
                nargs = code[pc + 3]
                fi = code[pc + 2]
                nslots = funcs[fi * FUNC_FIELDS + 1]
                if top + nslots > cap:
                    while top + nslots > cap:
                        cap *= 2
                    vals = <uint64_t*>realloc(vals, sizeof(uint64_t) * cap)
                    sl = vals + base
                if depth + 1 >= fcap:
                    fcap *= 2
                    fr_base = <long long*>realloc(fr_base, sizeof(long long) * fcap)
                    fr_ret = <long long*>realloc(fr_ret, sizeof(long long) * fcap)
                    fr_dst = <long long*>realloc(fr_dst, sizeof(long long) * fcap)
                for i in range(nslots):
                    vals[top + i] = 0
                for i in range(nargs):
                    vals[top + i] = sl[code[pc + 4 + i]]
                k = funcs[fi * FUNC_FIELDS + 3]
                for i in range(k, k + funcs[fi * FUNC_FIELDS + 4]):
                    vals[top + cslots[i]] = cvals[i]
                fr_base[depth] = base
                fr_ret[depth] = pc + 4 + nargs
                fr_dst[depth] = code[pc + 1]
                depth += 1
                base = top
                top = base + nslots
                sl = vals + base
                pc = funcs[fi * FUNC_FIELDS]
            elif op == RET:
                x = code[pc + 1]
                v = sl[x] if x >= 0 else 0
                if depth == 0:
                    status = 0
                    value = v if x >= 0 else None
                    break
                depth -= 1
                top = base
                base = fr_base[depth]
                sl = vals + base
                pc = fr_ret[depth]
                dst = fr_dst[depth]
                if dst >= 0:
                    sl[dst] = v
            elif op == TRAP:
                message = low.messages[code[pc + 1]]
                break
            else:
                raise RuntimeError("bad opcode %d at %d" % (op, pc))
        wcounts = [wcnt[i] for i in range(nwatch)]
    finally:
        free(vals)
        free(fr_base)
        free(fr_ret)
        free(fr_dst)
        free(wlo)
        free(whi)
        free(wcnt)
    return status, value, message, insts, loads, stores, branches, prints, wcounts


from array import array as _array
_EMPTY_Q = _array("q", [0])
_EMPTY_UQ = _array("Q", [0])
