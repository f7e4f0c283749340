"""Textual IR: line-oriented parser and canonical printer.

Grammar sketch::

    memory <size>
    data <offset> <hex-bytes>
    entry @<name>
    func @<name>(%p: i64, ...) [-> i64] [entry ^<label>] {
    block ^<label>[(%v: i64, ...)]:
      [%x =] <opcode> <operands>
      <terminator>
    }

Immediates are decimal or ``0x`` hex integers, typed ``i64`` unless
suffixed ``:i32``.  ``;`` starts a comment.
"""
from __future__ import annotations

import json
import re

from . import opcodes
from .types import (
    I32, I64, SCALAR_TYPES, Block, Br, BrIf, BrTable, Const, Function, Inst,
    MemoryImage, Module, Return, Target, Trap,
)


class ParseError(Exception):
    def __init__(self, message, line, col):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


_NAME = r"[A-Za-z0-9_.$]+"
_TOKEN = re.compile(
    rf"""
    (?P<ws>\s+)
  | (?P<comment>;.*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<val>%{_NAME})
  | (?P<func>@{_NAME})
  | (?P<label>\^{_NAME})
  | (?P<num>-?(?:0x[0-9a-fA-F]+|[0-9]+)(?::i(?:32|64))?)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<punct>[()\[\],:={{}}])
    """,
    re.VERBOSE,
)


class _Tok:
    __slots__ = ("kind", "text", "col")

    def __init__(self, kind, text, col):
        self.kind, self.text, self.col = kind, text, col


def _tokenize(line: str, lineno: int):
    toks = []
    pos = 0
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise ParseError(f"unexpected character {line[pos]!r}", lineno, pos + 1)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), pos + 1))
        pos = m.end()
    return toks


class _Line:
    def __init__(self, toks, lineno, length):
        self.toks = toks
        self.i = 0
        self.lineno = lineno
        self.length = length

    def error(self, msg, tok=None):
        tok = tok if tok is not None else self.peek()
        col = tok.col if tok is not None else self.length + 1
        return ParseError(msg, self.lineno, col)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def at(self, text):
        t = self.peek()
        return t is not None and t.text == text

    def next(self, what="token"):
        t = self.peek()
        if t is None:
            raise self.error(f"expected {what}, found end of line")
        self.i += 1
        return t

    def expect(self, text):
        t = self.next(repr(text))
        if t.text != text:
            raise self.error(f"expected {text!r}, found {t.text!r}", t)
        return t

    def expect_kind(self, kind, what):
        t = self.next(what)
        if t.kind != kind:
            raise self.error(f"expected {what}, found {t.text!r}", t)
        return t

    def done(self):
        if self.peek() is not None:
            raise self.error(f"unexpected trailing token {self.peek().text!r}")


def _parse_int(text: str) -> int:
    neg = text.startswith("-")
    body = text[1:] if neg else text
    v = int(body, 16) if body.startswith("0x") else int(body)
    return -v if neg else v


def _num_const(tok, ln, default_ty=I64) -> Const:
    text, ty = tok.text, default_ty
    if ":" in text:
        text, ty = text.split(":")
    return Const(ty, _parse_int(text))


def _operand(ln: _Line):
    t = ln.next("operand")
    if t.kind == "val":
        return t.text[1:]
    if t.kind == "num":
        return _num_const(t, ln)
    raise ln.error(f"expected value or immediate, found {t.text!r}", t)


def _typed_params(ln: _Line):
    params = []
    ln.expect("(")
    if ln.at(")"):
        ln.next()
        return tuple(params)
    while True:
        name = ln.expect_kind("val", "parameter name").text[1:]
        ln.expect(":")
        ty = ln.next("type")
        if ty.text not in SCALAR_TYPES:
            raise ln.error(f"unknown type {ty.text!r}", ty)
        params.append((name, ty.text))
        t = ln.next("',' or ')'")
        if t.text == ")":
            return tuple(params)
        if t.text != ",":
            raise ln.error(f"expected ',' or ')', found {t.text!r}", t)


def _arg_list(ln: _Line):
    args = []
    ln.expect("(")
    if ln.at(")"):
        ln.next()
        return tuple(args)
    while True:
        args.append(_operand(ln))
        t = ln.next("',' or ')'")
        if t.text == ")":
            return tuple(args)
        if t.text != ",":
            raise ln.error(f"expected ',' or ')', found {t.text!r}", t)


def _target(ln: _Line, refs: list):
    t = ln.expect_kind("label", "block label")
    args = _arg_list(ln) if ln.at("(") else ()
    refs.append((t.text[1:], ln.lineno, t.col))
    return Target(t.text[1:], args)


_TERMINATORS = ("br", "br_if", "br_table", "return", "trap")


def _terminator(ln: _Line, kw: str, refs: list):
    if kw == "br":
        return Br(_target(ln, refs))
    if kw == "br_if":
        cond = _operand(ln)
        ln.expect(",")
        then = _target(ln, refs)
        ln.expect(",")
        return BrIf(cond, then, _target(ln, refs))
    if kw == "br_table":
        sel = _operand(ln)
        ln.expect(",")
        ln.expect("[")
        cases = []
        if not ln.at("]"):
            while True:
                cases.append(_target(ln, refs))
                if ln.at("]"):
                    break
                ln.expect(",")
        ln.expect("]")
        ln.expect(",")
        return BrTable(sel, tuple(cases), _target(ln, refs))
    if kw == "return":
        return Return(_operand(ln) if ln.peek() is not None else None)
    s = ln.expect_kind("str", "trap message")
    return Trap(json.loads(s.text))


def _instruction(ln: _Line, result):
    optok = ln.expect_kind("ident", "opcode")
    op = optok.text
    if not opcodes.is_known_opcode(op):
        raise ln.error(f"unknown opcode {op!r}", optok)
    if op in opcodes.CONSTS:
        t = ln.expect_kind("num", "immediate")
        c = _num_const(t, ln, opcodes.CONSTS[op])
        return Inst(result, op, (Const(opcodes.CONSTS[op], c.value),))
    if op == "call":
        callee = ln.expect_kind("func", "callee").text[1:]
        return Inst(result, op, _arg_list(ln), callee)
    args = []
    if ln.peek() is not None:
        while True:
            args.append(_operand(ln))
            if ln.peek() is None:
                break
            ln.expect(",")
    return Inst(result, op, tuple(args))


class _FuncBuilder:
    def __init__(self, name, params, result, entry, lineno):
        self.name, self.params, self.result, self.entry = name, params, result, entry
        self.lineno = lineno
        self.blocks = []
        self.labels = {}
        self.cur = None  # [label, params, insts, term]
        self.refs = []
        self.defs = {p for p, _ in params}


def parse_module(text: str) -> Module:
    """Parse textual IR into a :class:`Module`; raises :class:`ParseError`."""
    functions = []
    fnames = set()
    memsize = 0
    segments = []
    entry = None
    fb = None
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, 1):
        toks = _tokenize(raw, lineno)
        if not toks:
            continue
        ln = _Line(toks, lineno, len(raw))
        head = ln.next()
        if fb is None:
            if head.text == "memory":
                memsize = _parse_int(ln.expect_kind("num", "size").text)
                ln.done()
            elif head.text == "data":
                parts = raw.split(";")[0].split()
                if len(parts) != 3:
                    raise ln.error("expected: data <offset> <hex-bytes>", head)
                try:
                    segments.append((_parse_int(parts[1]), bytes.fromhex(parts[2])))
                except ValueError:
                    raise ln.error("malformed data segment", head)
            elif head.text == "entry":
                entry = ln.expect_kind("func", "function name").text[1:]
                ln.done()
            elif head.text == "func":
                ftok = ln.expect_kind("func", "function name")
                name = ftok.text[1:]
                if name in fnames:
                    raise ln.error(f"duplicate function @{name}", ftok)
                fnames.add(name)
                params = _typed_params(ln)
                result = None
                if ln.at("->"):
                    ln.next()
                    rt = ln.next("result type")
                    if rt.text not in SCALAR_TYPES:
                        raise ln.error(f"unknown type {rt.text!r}", rt)
                    result = rt.text
                fentry = ""
                if ln.at("entry"):
                    ln.next()
                    fentry = ln.expect_kind("label", "entry label").text[1:]
                ln.expect("{")
                ln.done()
                names = [p for p, _ in params]
                if len(set(names)) != len(names):
                    raise ln.error(f"duplicate parameter in @{name}", ftok)
                fb = _FuncBuilder(name, params, result, fentry, lineno)
            else:
                raise ln.error(f"unexpected {head.text!r} at module level", head)
            continue

        # inside a function body
        if head.text == "}":
            ln.done()
            if fb.cur is not None:
                raise ln.error(f"block ^{fb.cur[0]} has no terminator", head)
            functions.append(_finish(fb))
            fb = None
        elif head.text == "block":
            if fb.cur is not None:
                raise ln.error(f"block ^{fb.cur[0]} has no terminator", head)
            lt = ln.expect_kind("label", "block label")
            label = lt.text[1:]
            if label in fb.labels:
                raise ln.error(f"duplicate block ^{label}", lt)
            params = _typed_params(ln) if ln.at("(") else ()
            ln.expect(":")
            ln.done()
            for p, _ in params:
                _define(fb, p, ln, lt)
            fb.labels[label] = lineno
            fb.cur = [label, params, []]
        elif fb.cur is None:
            raise ln.error("instruction outside of a block", head)
        elif head.kind == "ident" and head.text in _TERMINATORS:
            term = _terminator(ln, head.text, fb.refs)
            ln.done()
            label, params, insts = fb.cur
            fb.blocks.append(Block(label, params, tuple(insts), term))
            fb.cur = None
        else:
            result = None
            if head.kind == "val":
                ln.expect("=")
                result = head.text[1:]
                _define(fb, result, ln, head)
            else:
                ln.i -= 1
            inst = _instruction(ln, result)
            ln.done()
            fb.cur[2].append(inst)
    if fb is not None:
        raise ParseError(f"unterminated function @{fb.name}", len(lines) + 1, 1)
    return Module(tuple(functions), MemoryImage(memsize, tuple(segments)), entry)


def _define(fb, name, ln, tok):
    if name in fb.defs:
        raise ln.error(f"duplicate definition of %{name}", tok)
    fb.defs.add(name)


def _finish(fb) -> Function:
    for label, line, col in fb.refs:
        if label not in fb.labels:
            raise ParseError(f"branch to undefined label ^{label}", line, col)
    if fb.entry and fb.entry not in fb.labels:
        raise ParseError(f"entry label ^{fb.entry} is not defined", fb.lineno, 1)
    if not fb.blocks:
        raise ParseError(f"function @{fb.name} has no blocks", fb.lineno, 1)
    return Function(fb.name, fb.params, fb.result, tuple(fb.blocks), fb.entry)


# ---------------------------------------------------------------------------
# printing


def format_operand(a) -> str:
    if isinstance(a, Const):
        return str(a.value) if a.ty == I64 else f"{a.value}:{a.ty}"
    return "%" + a


def _fmt_target(t: Target) -> str:
    if not t.args:
        return "^" + t.label
    return "^%s(%s)" % (t.label, ", ".join(format_operand(a) for a in t.args))


def _fmt_params(params) -> str:
    return ", ".join(f"%{n}: {t}" for n, t in params)


def format_inst(inst: Inst) -> str:
    lhs = f"%{inst.result} = " if inst.result is not None else ""
    if inst.op in opcodes.CONSTS:
        return f"{lhs}{inst.op} {inst.args[0].value}"
    if inst.op == "call":
        args = ", ".join(format_operand(a) for a in inst.args)
        return f"{lhs}call @{inst.callee}({args})"
    if inst.args:
        return f"{lhs}{inst.op} " + ", ".join(format_operand(a) for a in inst.args)
    return f"{lhs}{inst.op}"


def format_terminator(t) -> str:
    if isinstance(t, Br):
        return "br " + _fmt_target(t.target)
    if isinstance(t, BrIf):
        return "br_if %s, %s, %s" % (format_operand(t.cond), _fmt_target(t.then), _fmt_target(t.else_))
    if isinstance(t, BrTable):
        cases = ", ".join(_fmt_target(c) for c in t.cases)
        return "br_table %s, [%s], %s" % (format_operand(t.selector), cases, _fmt_target(t.default))
    if isinstance(t, Return):
        return "return" if t.value is None else "return " + format_operand(t.value)
    return "trap " + json.dumps(t.message)


def format_function(f: Function) -> str:
    out = []
    head = f"func @{f.name}({_fmt_params(f.params)})"
    if f.result is not None:
        head += f" -> {f.result}"
    if f.blocks and f.entry != f.blocks[0].label:
        head += f" entry ^{f.entry}"
    out.append(head + " {")
    for b in f.blocks:
        if b.params:
            out.append(f"block ^{b.label}({_fmt_params(b.params)}):")
        else:
            out.append(f"block ^{b.label}:")
        for inst in b.insts:
            out.append("  " + format_inst(inst))
        out.append("  " + format_terminator(b.term))
    out.append("}")
    return "\n".join(out)


def print_module(m: Module) -> str:
    out = [f"memory {m.memory.size}"]
    for off, data in m.memory.init:
        out.append(f"data {off} {data.hex()}")
    if m.entry is not None:
        out.append(f"entry @{m.entry}")
    for f in m.functions:
        out.append("")
        out.append(format_function(f))
    return "\n".join(out) + "\n"
