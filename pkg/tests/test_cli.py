"""Command-line pipeline behavior and exit codes."""

from pathlib import Path

import pytest

from aigsynt.aiger import AigerDoc, read_aiger, write_aiger
from aigsynt.cli import main

from test_game import doc_with

BENCH = Path(__file__).resolve().parent.parent / "benchmarks" / "huffman4"


@pytest.fixture
def spec_aag(tmp_path):
    out = tmp_path / "spec.aag"
    code = main(["spec2aag", str(BENCH / "huffman4.smv"), "-o", str(out),
                 "--extended"])
    assert code == 0
    return out


def test_spec2aag_extended_sections(spec_aag, capsys):
    text = spec_aag.read_text()
    header = text.splitlines()[0].split()
    assert header[0] == "aag"
    b, c, j = int(header[6]), int(header[7]), int(header[8])
    assert b == 3 and c == 2 and j == 1


def test_spec2aag_standard_needs_k(tmp_path, capsys):
    out = tmp_path / "spec.aag"
    code = main(["spec2aag", str(BENCH / "huffman4.smv"), "-o", str(out),
                 "--standard"])
    assert code == 2
    assert "needs --k" in capsys.readouterr().err


def test_spec2aag_standard_with_k(tmp_path):
    out = tmp_path / "std.aag"
    code = main(["spec2aag", str(BENCH / "huffman4.smv"), "-o", str(out),
                 "--standard", "--k", "3"])
    assert code == 0
    header = out.read_text().splitlines()[0].split()
    assert len(header) == 6  # old format
    assert int(header[4]) == 1  # single output


def test_synth_unrealizable_exits_one(tmp_path, capsys):
    doc = doc_with(bad=lambda aig, u, c, l: 1)
    path = tmp_path / "bad.aag"
    path.write_text(write_aiger(doc))
    code = main(["synth", str(path), "-o", str(tmp_path / "model.aag")])
    assert code == 1
    assert "UNREALIZABLE" in capsys.readouterr().out


def test_full_pipeline(tmp_path, spec_aag, capsys):
    model = tmp_path / "model.aag"
    assert main(["synth", str(spec_aag), "-o", str(model)]) == 0
    assert "REALIZABLE" in capsys.readouterr().out

    assert main(["mc", str(model)]) == 0
    assert "SAFETY: holds; JUSTICE: holds" in capsys.readouterr().out

    hwmcc = tmp_path / "hwmcc.aag"
    assert main(["synt2hwmcc", str(model), "-o", str(hwmcc)]) == 0
    capsys.readouterr()
    assert main(["mc", str(hwmcc), "--existential"]) == 0
    assert "NO FAIR TRACE" in capsys.readouterr().out


def test_just2safe_then_synth(tmp_path, spec_aag, capsys):
    k3 = tmp_path / "k3.aag"
    assert main(["just2safe", str(spec_aag), "-o", str(k3), "--k", "3"]) == 0
    assert main(["synth", str(k3), "--print-realizability-only"]) == 0
    capsys.readouterr()
    k2 = tmp_path / "k2.aag"
    assert main(["just2safe", str(spec_aag), "-o", str(k2), "--k", "2"]) == 0
    assert main(["synth", str(k2), "--print-realizability-only"]) == 1


def test_mc_violated_model_exits_one(tmp_path, capsys):
    # closed model whose single bad literal is immediately true
    doc = AigerDoc(fmt="new")
    l = doc.add_latch("l")
    doc.set_latch_next(l, l)
    doc.bad.append((l ^ 1, None))
    path = tmp_path / "violated.aag"
    path.write_text(write_aiger(doc))
    code = main(["mc", str(path)])
    assert code == 1
    captured = capsys.readouterr()
    assert "VIOLATED (safety)" in captured.out
    assert "# inputs:" in captured.err


def test_usage_error_exits_two(tmp_path, capsys):
    assert main(["spec2aag"]) == 2


def test_missing_file_exits_two(tmp_path, capsys):
    assert main(["synth", str(tmp_path / "nope.aag")]) == 2
    assert "error:" in capsys.readouterr().err


def test_outputs_idempotent(tmp_path):
    a = tmp_path / "a.aag"
    b = tmp_path / "b.aag"
    for target in (a, b):
        assert main(["spec2aag", str(BENCH / "huffman4.smv"),
                     "-o", str(target), "--extended"]) == 0
    assert a.read_bytes() == b.read_bytes()
    ma = tmp_path / "ma.aag"
    mb = tmp_path / "mb.aag"
    for src, target in ((a, ma), (b, mb)):
        assert main(["synth", str(src), "-o", str(target)]) == 0
    assert ma.read_bytes() == mb.read_bytes()


def test_spec2aag_on_module_hierarchy_spec(tmp_path):
    """A spec shaped like the format's reference example (helper module,
    controllable var, two guarantees and two assumptions with one
    negation each) compiles to an extended file with B, C and J
    sections."""
    from test_smv_parser import LISTING_STYLE
    from test_automata import gff

    (tmp_path / "spec.smv").write_text(LISTING_STYLE)
    # guarantee 1: done recurs (deterministic liveness automaton)
    (tmp_path / "guarantee1.gff").write_text(gff(
        ["0", "1"], "0",
        [("0", "~done", "0"), ("0", "done", "1"),
         ("1", "done", "1"), ("1", "~done", "0")], ["1"]))
    # guarantee 2, negated: complement of "writtenA eventually holds"
    (tmp_path / "guarantee2.gff").write_text(gff(
        ["w", "f"], "w",
        [("w", "~writtenA", "w"), ("w", "writtenA", "f"),
         ("f", "True", "f")], ["f"]))
    # assumption 1: CPUread and CPUwrite never together
    (tmp_path / "assumption1.gff").write_text(gff(
        ["ok"], "ok",
        [("ok", "~CPUread", "ok"), ("ok", "CPUread ~CPUwrite", "ok")], ["ok"]))
    # assumption 2, negated: complement of "valueIn eventually holds",
    # which is the safety property "valueIn never holds"
    (tmp_path / "assumption2.gff").write_text(gff(
        ["w", "f"], "w",
        [("w", "~valueIn", "w"), ("w", "valueIn", "f"),
         ("f", "True", "f")], ["f"]))

    out = tmp_path / "spec.aag"
    assert main(["spec2aag", str(tmp_path / "spec.smv"), "-o", str(out),
                 "--extended"]) == 0
    header = out.read_text().splitlines()[0].split()
    b, c, j = int(header[6]), int(header[7]), int(header[8])
    assert b == 2 and c == 2 and j == 1
    doc = read_aiger(out.read_text())
    assert [n for _, n in doc.controllable_inputs()] == [
        "controllable_valueOut"]


def test_automaton_paths_resolve_relative_to_spec(tmp_path):
    # copy the spec into a nested directory along with its automata
    nested = tmp_path / "specs" / "inner"
    nested.mkdir(parents=True)
    for f in BENCH.iterdir():
        (nested / f.name).write_text(f.read_text())
    out = tmp_path / "out.aag"
    assert main(["spec2aag", str(nested / "huffman4.smv"),
                 "-o", str(out), "--extended"]) == 0
