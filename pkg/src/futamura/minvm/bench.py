"""Run a Min program under the four execution strategies and compare metrics."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from ..executor import DEFAULT_FUEL, run
from ..specializer import polyfill_module, specialize_function
from .interp import BYTECODE_BASE, bytecode_range, interp_name, load_program, min_request, shipped_module
from .isa import MinProgram

CONFIGS = ("interp-plain", "interp-state", "specialized-plain", "specialized-state")
COLUMNS = ("config", "insts", "loads", "stores", "bytecode_loads", "ratio")


@dataclass
class BenchRow:
    config: str
    insts: int
    loads: int
    stores: int
    bytecode_loads: int
    ratio: float
    outcome: tuple
    prints: tuple


@dataclass
class BenchReport:
    rows: list

    def row(self, config: str) -> BenchRow:
        for r in self.rows:
            if r.config == config:
                return r
        raise KeyError(config)

    def format_text(self) -> str:
        table = [COLUMNS]
        for r in self.rows:
            table.append((r.config, str(r.insts), str(r.loads), str(r.stores),
                          str(r.bytecode_loads), f"{r.ratio:.2f}"))
        widths = [max(len(row[i]) for row in table) for i in range(len(COLUMNS))]
        lines = []
        for row in table:
            cells = [row[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(row[1:], widths[1:])]
            lines.append("  ".join(cells))
        return "\n".join(lines) + "\n"

    def as_dicts(self) -> list:
        return [{k: asdict(r)[k] for k in COLUMNS} for r in self.rows]


def bench(program: MinProgram, configs=CONFIGS, arg: int = 0, jmpnz: str = "backedges",
          ssa_repair: str = "hsca", fuel: int = DEFAULT_FUEL, module=None) -> BenchReport:
    """Metrics per config; ``ratio`` is interp-plain insts divided by this config's insts."""
    for c in configs:
        if c not in CONFIGS:
            raise ValueError(f"unknown bench config {c!r}")
    base = load_program(module or shipped_module(), program)
    watch = {"bytecode": bytecode_range(program)}
    results = {}
    for c in configs:
        kind, variant = c.split("-")
        name = interp_name(variant, jmpnz)
        if kind == "interp":
            m, _ = polyfill_module(base)
            res = run(m, name, [BYTECODE_BASE, arg], watch, fuel)
        else:
            out = f"{name}_bench"
            f = specialize_function(base, min_request(program, variant, jmpnz, out), ssa_repair).function
            res = run(base.with_function(f), out, [BYTECODE_BASE, arg], watch, fuel)
        results[c] = res
    ref = results.get("interp-plain")
    rows = []
    for c in configs:
        r = results[c]
        mt = r.metrics
        ratio = ref.metrics.insts_executed / mt.insts_executed if ref and mt.insts_executed else 1.0
        rows.append(BenchRow(c, mt.insts_executed, mt.loads, mt.stores,
                             mt.loads_in_range["bytecode"], ratio, r.outcome(), tuple(mt.prints)))
    return BenchReport(rows)
