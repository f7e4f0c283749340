"""Command-line driver.

Exit codes: 0 success, 1 semantic or transform error, 2 usage or I/O error,
3 runtime trap.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from pathlib import Path

from . import absint
from .executor import BACKEND, DEFAULT_FUEL, KERNELS, LoweringError, run
from .ir import ParseError, parse_module, print_module, validate
from .minvm import AsmError, assemble, load_program, min_request, shipped_module
from .minvm.bench import CONFIGS, bench
from .minvm.fuzz import fuzz
from .minvm.interp import JMPNZ_STYLES, VARIANTS
from .specializer import (
    REPAIR_MODES, Limits, PolyfillError, RequestError, SpecializationError, parse_requests,
    polyfill_module, specialize_function,
)

OK, FAILED, USAGE, TRAPPED = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror or e}") from None


def _write(path: str, data):
    try:
        p = Path(path)
        if isinstance(data, bytes):
            p.write_bytes(data)
        else:
            p.write_text(data)
    except OSError as e:
        raise UsageError(f"cannot write {path}: {e.strerror or e}") from None


def _load_module(path: str):
    text = _read(path)
    try:
        return parse_module(text)
    except ParseError as e:
        raise UsageError(f"{path}:{e}") from None


def _load_program(path: str):
    try:
        return assemble(_read(path))
    except AsmError as e:
        raise UsageError(f"{path}: {e}") from None


def _int(text: str) -> int:
    try:
        return int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _limits(args) -> Limits:
    return Limits(max_rebuilds=args.max_rebuilds, max_contexts=args.max_contexts,
                  max_split=args.max_split)


def _data_span(m):
    segs = [(off, len(data)) for off, data in m.memory.init if data]
    if not segs:
        raise UsageError("module has no data segments to watch")
    lo = min(off for off, _ in segs)
    hi = max(off + n for off, n in segs)
    return lo, hi - lo


def _watch_ranges(specs, m) -> dict:
    out = {}
    for spec in specs or ():
        name, sep, rng = spec.partition("=")
        if not sep:
            # bare label: the span of the module's initialized data
            out[name] = _data_span(m)
            continue
        start, sep, length = rng.partition(":")
        try:
            if not sep:
                raise ValueError
            out[name] = (int(start, 0), int(length, 0))
        except ValueError:
            raise UsageError(f"bad --watch {spec!r}; expected name=start:len") from None
    return out


def cmd_validate(args) -> int:
    m = _load_module(args.module)
    diags = validate(m)
    for d in diags:
        print(f"{args.module}: {d}")
    if not diags:
        print(f"{args.module}: ok ({len(m.functions)} functions)")
    return FAILED if diags else OK


def cmd_specialize(args) -> int:
    m = _load_module(args.module)
    try:
        reqs = parse_requests(_read(args.request))
    except RequestError as e:
        raise UsageError(f"{args.request}: {e}") from None
    diags = validate(m)
    if diags:
        for d in diags:
            print(f"{args.module}: {d}", file=sys.stderr)
        return FAILED
    out = m
    mapping = []
    limits = _limits(args)
    for req in reqs:
        try:
            if out.has_function(req.output_name):
                raise SpecializationError(f"output name @{req.output_name} already exists")
            res = specialize_function(m, req, args.ssa_repair, limits, check_input=False)
        except SpecializationError as e:
            print(f"error: specializing @{req.target}: {e}", file=sys.stderr)
            return FAILED
        out = out.with_function(res.function)
        st = res.repair
        mapping.append({"target": req.target, "output": req.output_name,
                        "args": [str(a) for a in req.arg_modes],
                        "blocks": len(res.function.blocks), "cut_points": st.cut_points,
                        "added_params": st.added_params})
        print(f"@{req.target} -> @{req.output_name}: {len(res.function.blocks)} blocks, "
              f"{st.cut_points} cut points, {st.added_params} added params ({st.mode})")
    _write(args.output, print_module(out))
    sidecar = args.map or args.output + ".map"
    _write(sidecar, json.dumps({"ssa_repair": args.ssa_repair, "functions": mapping}, indent=2) + "\n")
    return OK


def cmd_run(args) -> int:
    m = _load_module(args.module)
    if not m.has_function(args.func):
        raise UsageError(f"no function @{args.func} in {args.module}")
    f = m.function(args.func)
    if len(args.args) != len(f.params):
        raise UsageError(f"@{args.func} takes {len(f.params)} arguments, got {len(args.args)}")
    diags = validate(m)
    if diags:
        for d in diags:
            print(f"{args.module}: {d}", file=sys.stderr)
        return FAILED
    watch = _watch_ranges(args.watch, m)
    if args.polyfill:
        try:
            m, _ = polyfill_module(m)
        except PolyfillError as e:
            print(f"error: {e}", file=sys.stderr)
            return FAILED
    try:
        res = run(m, args.func, args.args, watch, args.fuel, args.backend)
    except LoweringError as e:
        print(f"error: {e} (use --polyfill to run annotated functions)", file=sys.stderr)
        return FAILED
    mt = res.metrics
    if res.returned:
        print(f"return {res.value}")
    else:
        print(f'trap "{res.trap}"')
    print("prints:", " ".join(str(p) for p in mt.prints) if mt.prints else "(none)")
    print(f"insts {mt.insts_executed}  loads {mt.loads}  stores {mt.stores}  branches {mt.branches}")
    for label, n in mt.loads_in_range.items():
        print(f"loads[{label}] {n}")
    return OK if res.returned else TRAPPED


def cmd_bench(args) -> int:
    m = _load_module(args.module)
    program = _load_program(args.program)
    try:
        report = bench(program, args.configs or CONFIGS, args.arg, args.jmpnz, args.ssa_repair,
                       args.fuel, module=m)
    except (SpecializationError, KeyError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return FAILED
    if args.json:
        print(json.dumps(report.as_dicts(), indent=2))
    else:
        sys.stdout.write(report.format_text())
    return OK


def cmd_asm(args) -> int:
    program = _load_program(args.program)
    _write(args.output, program.to_bytes())
    if args.module:
        _write(args.module, print_module(load_program(shipped_module(), program)))
    if args.request:
        _write(args.request, min_request(program, args.variant, args.jmpnz).format())
    print(f"{len(program)} words")
    return OK


def cmd_fuzz(args) -> int:
    with contextlib.ExitStack() as stack:
        for op in args.inject_fault or ():
            stack.enter_context(absint.injected_fault(op))
        report = fuzz(args.seed, args.cases, args.start)
    if report.failures:
        print(report.failures[0].format(), end="")
        return FAILED
    print(f"fuzz: {report.cases} programs, {report.checks} checks, all agree (seed {args.seed})")
    return OK


def _add_limits(p):
    d = Limits()
    p.add_argument("--max-contexts", type=int, default=d.max_contexts)
    p.add_argument("--max-rebuilds", type=int, default=d.max_rebuilds)
    p.add_argument("--max-split", type=int, default=d.max_split)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="futamura", description="Interpreter specializer toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a module for structural errors")
    p.add_argument("module")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("specialize", help="apply specialization requests to a module")
    p.add_argument("module")
    p.add_argument("request")
    p.add_argument("output")
    p.add_argument("--ssa-repair", choices=REPAIR_MODES, default="hsca")
    p.add_argument("--map", help="sidecar mapping path (default OUTPUT.map)")
    _add_limits(p)
    p.set_defaults(fn=cmd_specialize)

    p = sub.add_parser("run", help="execute a function in the reference executor")
    p.add_argument("module")
    p.add_argument("func")
    p.add_argument("args", nargs="*", type=_int)
    p.add_argument("--watch", action="append", metavar="NAME=START:LEN",
                   help="count loads in a range; a bare NAME watches the module's data")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--polyfill", action="store_true", help="lower intrinsics before running")
    p.add_argument("--backend", choices=sorted(KERNELS), default=BACKEND)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("bench", help="compare the four Min execution strategies")
    p.add_argument("module")
    p.add_argument("program")
    p.add_argument("--configs", nargs="+", choices=CONFIGS)
    p.add_argument("--arg", type=_int, default=0, help="initial accumulator")
    p.add_argument("--jmpnz", choices=JMPNZ_STYLES, default="backedges")
    p.add_argument("--ssa-repair", choices=REPAIR_MODES, default="hsca")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_bench)

    p = sub.add_parser("asm", help="assemble a Min program to a word image")
    p.add_argument("program")
    p.add_argument("output")
    p.add_argument("--module", help="also write the interpreter module with the program loaded")
    p.add_argument("--request", help="also write a specialization request for it")
    p.add_argument("--variant", choices=VARIANTS, default="plain")
    p.add_argument("--jmpnz", choices=JMPNZ_STYLES, default="backedges")
    p.set_defaults(fn=cmd_asm)

    p = sub.add_parser("fuzz", help="differential test on random Min programs")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--start", type=int, default=0, help="first case index")
    p.add_argument("--inject-fault", action="append", metavar="OPCODE", help=argparse.SUPPRESS)
    p.set_defaults(fn=cmd_fuzz)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else USAGE
    try:
        return args.fn(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
