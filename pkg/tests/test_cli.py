import json

import pytest

from futamura.cli import main
from futamura.executor import run
from futamura.ir import parse_module
from futamura.minvm import BYTECODE_BASE
from futamura.minvm.programs import program_source, sum_source


@pytest.fixture
def sum_files(tmp_path):
    src = tmp_path / "sum.min"
    src.write_text(program_source("sum"))
    ir, req = tmp_path / "sum.ir", tmp_path / "sum.req"
    assert main(["asm", str(src), str(tmp_path / "sum.bin"), "--module", str(ir),
                 "--request", str(req)]) == 0
    return tmp_path, src, ir, req


def test_validate(sum_files, capsys):
    tmp, _, ir, _ = sum_files
    assert main(["validate", str(ir)]) == 0
    bad = tmp / "bad.ir"
    bad.write_text("func @f(%c: i64) -> i64 {\nblock ^e:\n  br_if %c, ^l, ^r\nblock ^l:\n"
                   "  %x = iadd %c, 1\n  br ^j\nblock ^r:\n  br ^j\nblock ^j:\n  return %x\n}\n")
    capsys.readouterr()
    assert main(["validate", str(bad)]) == 1
    assert "dominat" in capsys.readouterr().out
    assert main(["validate", str(tmp / "missing.ir")]) == 2


def test_parse_error_is_usage_error(tmp_path):
    p = tmp_path / "x.ir"
    p.write_text("func @f( {\n")
    assert main(["validate", str(p)]) == 2


def test_specialize_and_run(sum_files, capsys):
    tmp, _, ir, req = sum_files
    out = tmp / "out.ir"
    assert main(["specialize", str(ir), str(req), str(out)]) == 0
    assert main(["validate", str(out)]) == 0
    sidecar = json.loads((tmp / "out.ir.map").read_text())
    assert sidecar["functions"][0]["output"] == "min_plain_spec"
    capsys.readouterr()
    assert main(["run", str(out), "min_plain_spec", str(BYTECODE_BASE), "0",
                 "--watch", "bytecode"]) == 0
    text = capsys.readouterr().out
    assert "return 55" in text and "loads[bytecode] 0" in text


def test_naive_output_equivalent(sum_files):
    tmp, _, ir, req = sum_files
    a, b = tmp / "a.ir", tmp / "b.ir"
    assert main(["specialize", str(ir), str(req), str(a)]) == 0
    assert main(["specialize", str(ir), str(req), str(b), "--ssa-repair=naive"]) == 0
    ra = run(parse_module(a.read_text()), "min_plain_spec", [BYTECODE_BASE, 3])
    rb = run(parse_module(b.read_text()), "min_plain_spec", [BYTECODE_BASE, 3])
    assert ra.observable() == rb.observable()


def test_specialize_missing_function(sum_files):
    tmp, _, ir, req = sum_files
    bad = tmp / "bad.req"
    bad.write_text(req.read_text().replace("target min_plain", "target nope"))
    assert main(["specialize", str(ir), str(bad), str(tmp / "o.ir")]) == 1


def test_context_ceiling_flag(sum_files):
    tmp, _, ir, req = sum_files
    assert main(["specialize", str(ir), str(req), str(tmp / "o.ir"), "--max-contexts", "3"]) == 1


def test_run_exit_codes(sum_files, capsys):
    tmp, _, ir, _ = sum_files
    long = tmp / "long.min"
    long.write_text(sum_source(100000))
    lir = tmp / "long.ir"
    assert main(["asm", str(long), str(tmp / "l.bin"), "--module", str(lir)]) == 0
    capsys.readouterr()
    code = main(["run", str(lir), "min_plain", str(BYTECODE_BASE), "0", "--polyfill",
                 "--fuel", "10"])
    assert code == 3
    assert 'trap "out of fuel"' in capsys.readouterr().out
    assert main(["run", str(ir), "min_plain", str(BYTECODE_BASE)]) == 2
    assert main(["run", str(ir), "min_plain", str(BYTECODE_BASE), "0"]) == 1  # intrinsics
    assert main(["run", str(ir), "min_plain", "1", "2", "--watch", "x=oops"]) == 2


def test_unknown_flag_rejected(sum_files):
    _, _, ir, _ = sum_files
    assert main(["validate", str(ir), "--frobnicate"]) == 2
    assert main([]) == 2


def test_bench(sum_files, capsys):
    _, src, ir, _ = sum_files
    capsys.readouterr()
    assert main(["bench", str(ir), str(src), "--json"]) == 0
    rows = json.loads(capsys.readouterr().out)
    assert [r["config"] for r in rows] == ["interp-plain", "interp-state",
                                           "specialized-plain", "specialized-state"]
    assert rows[2]["bytecode_loads"] == 0


def test_asm_is_deterministic(sum_files):
    tmp, src, _, _ = sum_files
    assert main(["asm", str(src), str(tmp / "again.bin")]) == 0
    assert (tmp / "again.bin").read_bytes() == (tmp / "sum.bin").read_bytes()
    bad = tmp / "bad.min"
    bad.write_text("JMP nowhere\nHALT\n")
    assert main(["asm", str(bad), str(tmp / "x.bin")]) == 2


def test_fuzz_small(capsys):
    assert main(["fuzz", "--cases", "6", "--seed", "1"]) == 0
    assert "all agree" in capsys.readouterr().out


def test_fuzz_with_broken_transfer_reports_repro(capsys):
    assert main(["fuzz", "--cases", "20", "--seed", "1", "--inject-fault", "iadd"]) == 1
    out = capsys.readouterr().out
    assert "repro: futamura fuzz --seed 1 --start" in out
