"""Specialization requests and their line-oriented text format.

::

    target min_interp
    output min_sum
    arg 0 memory 4096 64
    arg 1 runtime

``arg`` lines take ``runtime``, ``const <u64>`` or ``memory <addr> <len>``.
A file may hold several requests, each introduced by ``target``.
"""
from __future__ import annotations

from dataclasses import dataclass


class RequestError(Exception):
    pass


@dataclass(frozen=True)
class RunTime:
    def __str__(self):
        return "runtime"


@dataclass(frozen=True)
class SpecializedConst:
    value: int

    def __str__(self):
        return f"const {self.value}"


@dataclass(frozen=True)
class SpecializedMemory:
    address: int
    length: int

    def __str__(self):
        return f"memory {self.address} {self.length}"


@dataclass(frozen=True)
class SpecializationRequest:
    target: str
    arg_modes: tuple
    output_name: str

    def format(self) -> str:
        lines = [f"target {self.target}", f"output {self.output_name}"]
        lines += [f"arg {i} {mode}" for i, mode in enumerate(self.arg_modes)]
        return "\n".join(lines) + "\n"


def _int(tok: str, lineno: int) -> int:
    try:
        v = int(tok, 0)
    except ValueError:
        raise RequestError(f"line {lineno}: expected an integer, got {tok!r}") from None
    if v < 0 or v >= 1 << 64:
        raise RequestError(f"line {lineno}: {v} is not a u64")
    return v


def _finish(cur, lineno):
    if cur["output"] is None:
        raise RequestError(f"request for @{cur['target']} has no output line (ends at line {lineno})")
    args = cur["args"]
    n = len(args)
    for i in range(n):
        if i not in args:
            raise RequestError(f"request for @{cur['target']} is missing arg {i}")
    return SpecializationRequest(cur["target"], tuple(args[i] for i in range(n)), cur["output"])


def parse_requests(text: str) -> list:
    reqs = []
    cur = None
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split(";", 1)[0].split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        kw = toks[0]
        if kw == "target":
            if len(toks) != 2:
                raise RequestError(f"line {lineno}: usage: target <func>")
            if cur is not None:
                reqs.append(_finish(cur, lineno))
            cur = {"target": toks[1].lstrip("@"), "output": None, "args": {}}
            continue
        if cur is None:
            raise RequestError(f"line {lineno}: {kw!r} before any target line")
        if kw == "output":
            if len(toks) != 2:
                raise RequestError(f"line {lineno}: usage: output <name>")
            cur["output"] = toks[1].lstrip("@")
        elif kw == "arg":
            if len(toks) < 3:
                raise RequestError(f"line {lineno}: usage: arg <i> runtime|const <v>|memory <addr> <len>")
            i = _int(toks[1], lineno)
            if i in cur["args"]:
                raise RequestError(f"line {lineno}: arg {i} given twice")
            mode = toks[2]
            if mode == "runtime" and len(toks) == 3:
                cur["args"][i] = RunTime()
            elif mode == "const" and len(toks) == 4:
                cur["args"][i] = SpecializedConst(_int(toks[3], lineno))
            elif mode == "memory" and len(toks) == 5:
                cur["args"][i] = SpecializedMemory(_int(toks[3], lineno), _int(toks[4], lineno))
            else:
                raise RequestError(f"line {lineno}: bad arg mode {' '.join(toks[2:])!r}")
        else:
            raise RequestError(f"line {lineno}: unknown keyword {kw!r}")
    if cur is not None:
        reqs.append(_finish(cur, lineno))
    return reqs


def parse_request(text: str) -> SpecializationRequest:
    reqs = parse_requests(text)
    if len(reqs) != 1:
        raise RequestError(f"expected exactly one request, found {len(reqs)}")
    return reqs[0]
