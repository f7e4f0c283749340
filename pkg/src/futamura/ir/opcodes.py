"""Opcode table: arity, operand types and result types."""
from __future__ import annotations

from .types import I32, I64

BINARY = ("iadd", "isub", "imul", "iand", "ior", "ixor", "ishl", "ishr_u")
ICMP = ("icmp.eq", "icmp.ne", "icmp.lt_u", "icmp.lt_s")
LOADS = {"load.8u": (1, I64), "load.32": (4, I32), "load.64": (8, I64)}
STORES = {"store.8": (1, I64), "store.32": (4, I32), "store.64": (8, I64)}
CONSTS = {"const.i64": I64, "const.i32": I32}

PURE = frozenset(BINARY + ICMP + ("select", "zext", "trunc") + tuple(CONSTS))

# name -> (number of operands, produces a result)
INTRINSICS = {
    "push_context": (1, False),
    "update_context": (1, False),
    "pop_context": (0, False),
    "assert_const": (1, False),
    "specialized_value": (3, True),
    "load_register": (1, True),
    "store_register": (2, False),
    "local_read": (2, True),
    "local_write": (3, False),
    "stack_push": (2, False),
    "stack_pop": (1, True),
    "stack_read": (2, True),
    "stack_write": (3, False),
    "flush": (0, False),
}
CONTEXT_INTRINSICS = ("push_context", "update_context", "pop_context")
INTRINSIC_PREFIX = "intrinsic."


def intrinsic_name(op: str):
    if op.startswith(INTRINSIC_PREFIX):
        return op[len(INTRINSIC_PREFIX):]
    return None


def is_known_opcode(op: str) -> bool:
    if op in PURE or op in LOADS or op in STORES or op in ("call", "print.i64"):
        return True
    name = intrinsic_name(op)
    return name is not None and name in INTRINSICS


def has_result(op: str, callee_result=None) -> bool:
    if op in PURE or op in LOADS:
        return True
    if op == "call":
        return callee_result is not None
    name = intrinsic_name(op)
    if name is not None:
        return INTRINSICS[name][1]
    return False


class SignatureError(Exception):
    pass


def check_signature(op: str, arg_types: list, callee=None):
    """Return the result type (or None) of ``op`` applied to ``arg_types``.

    ``callee`` is ``(param_types, result_type)`` for calls.  Raises
    :class:`SignatureError` on arity or type mismatch.
    """
    n = len(arg_types)

    def need(k):
        if n != k:
            raise SignatureError(f"{op} expects {k} operands, got {n}")

    if op in CONSTS:
        need(1)
        if arg_types[0] != CONSTS[op]:
            raise SignatureError(f"{op} immediate must be {CONSTS[op]}")
        return CONSTS[op]
    if op in BINARY:
        need(2)
        if arg_types[0] != arg_types[1]:
            raise SignatureError(f"{op} operand types differ: {arg_types[0]} vs {arg_types[1]}")
        return arg_types[0]
    if op in ICMP:
        need(2)
        if arg_types[0] != arg_types[1]:
            raise SignatureError(f"{op} operand types differ: {arg_types[0]} vs {arg_types[1]}")
        return I32
    if op == "select":
        need(3)
        if arg_types[1] != arg_types[2]:
            raise SignatureError("select arms have different types")
        return arg_types[1]
    if op == "zext":
        need(1)
        if arg_types[0] != I32:
            raise SignatureError("zext expects an i32 operand")
        return I64
    if op == "trunc":
        need(1)
        if arg_types[0] != I64:
            raise SignatureError("trunc expects an i64 operand")
        return I32
    if op in LOADS:
        need(1)
        if arg_types[0] != I64:
            raise SignatureError(f"{op} address must be i64")
        return LOADS[op][1]
    if op in STORES:
        need(2)
        if arg_types[0] != I64:
            raise SignatureError(f"{op} address must be i64")
        if arg_types[1] != STORES[op][1]:
            raise SignatureError(f"{op} value must be {STORES[op][1]}")
        return None
    if op == "print.i64":
        need(1)
        if arg_types[0] != I64:
            raise SignatureError("print.i64 expects an i64 operand")
        return None
    if op == "call":
        params, result = callee
        need(len(params))
        for i, (a, p) in enumerate(zip(arg_types, params)):
            if a != p:
                raise SignatureError(f"call argument {i} is {a}, callee expects {p}")
        return result
    name = intrinsic_name(op)
    if name in INTRINSICS:
        arity, res = INTRINSICS[name]
        need(arity)
        if name != "assert_const":
            for a in arg_types:
                if a != I64:
                    raise SignatureError(f"{op} operands must be i64")
        return I64 if res else None
    raise SignatureError(f"unknown opcode {op}")
