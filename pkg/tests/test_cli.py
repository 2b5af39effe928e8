import json
import shutil
from pathlib import Path

import pytest

from mpstlab.cli import main, parse_semantics_spec
from mpstlab.config import CommModel, MergeCriterion, preset
from mpstlab.examples import example_text, list_examples


@pytest.fixture()
def protocols(tmp_path):
    for name in list_examples():
        (tmp_path / f"{name}.mpst").write_text(example_text(name), encoding="utf-8")
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_check_gating_failure(protocols, capsys):
    code, out, _ = run(capsys, "check", str(protocols / "work_loop_star.mpst"),
                       "--preset", "VeryGentleIntroMPST")
    assert code == 1
    assert "KleeneStarForbidden" in out
    assert "[c, w]" in out


def test_check_pass(protocols, capsys):
    code, out, _ = run(capsys, "check", str(protocols / "controller_workers.mpst"),
                       "--preset", "ST4MP")
    assert code == 0
    assert "all checks passed" in out


def test_check_flag_overrides_preset(protocols, capsys):
    code, _, _ = run(capsys, "check", str(protocols / "work_loop_star.mpst"),
                     "--preset", "VeryGentleIntroMPST", "--allow-star")
    assert code == 0


def test_check_missing_file(capsys):
    code, _, err = run(capsys, "check", "missing.mpst")
    assert code == 2
    assert "cannot read" in err


def test_project_work_loop(protocols, capsys):
    code, out, _ = run(capsys, "project", str(protocols / "work_loop.mpst"),
                       "--preset", "GentleIntroMPAsyncST")
    assert code == 0
    assert "controller: rec X . worker!{Work ; worker?Done ; X, Quit}" in out
    assert "worker: rec X . controller?{Work ; controller!Done ; X, Quit}" in out


def test_project_merge_failure_verbatim(protocols, capsys):
    code, out, _ = run(capsys, "project", str(protocols / "branching_tasks.mpst"),
                       "--preset", "GentleIntroMPAsyncST")
    assert code == 1
    assert "[Plain Merge] - projection undefined for [pC] in [" in out


def test_project_empty(protocols, capsys):
    code, out, _ = run(capsys, "project", str(protocols / "empty.mpst"))
    assert code == 0
    assert out.strip() == ""


def test_run_trace_clean(protocols, capsys):
    code, out, _ = run(capsys, "run", str(protocols / "work_loop.mpst"),
                       "--preset", "GentleIntroMPAsyncST",
                       "--trace", "controllerworker!Quit", "controllerworker?Quit")
    assert code == 0
    assert "terminal: clean" in out


def test_run_trace_not_enabled(protocols, capsys):
    code, _, err = run(capsys, "run", str(protocols / "work_loop.mpst"),
                       "--preset", "GentleIntroMPAsyncST",
                       "--trace", "controllerworker?Quit")
    assert code == 1
    assert "NotEnabled" in err


def test_run_interactive(protocols, capsys, monkeypatch):
    lines = iter(["1", "q"])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(lines))
    code, out, _ = run(capsys, "run", str(protocols / "parallel_tasks.mpst"),
                       "--preset", "APIGenInScala3", "--interactive")
    assert code == 0
    assert "1." in out and "2." in out


def test_lts_counts_and_dot(protocols, capsys, tmp_path):
    out_file = tmp_path / "out.dot"
    code, out, _ = run(capsys, "lts", str(protocols / "empty.mpst"),
                       "--dot", str(out_file))
    assert code == 0
    assert "1 state, 0 edges" in out
    assert out_file.read_text().startswith("digraph")


def test_msc_file_output(protocols, capsys, tmp_path):
    target = tmp_path / "chart.mmd"
    code, _, _ = run(capsys, "msc", str(protocols / "controller_workers.mpst"),
                     "--mmd", str(target))
    assert code == 0
    assert target.read_text().startswith("sequenceDiagram")


def test_locals_fsm_directory(protocols, capsys, tmp_path):
    out_dir = tmp_path / "fsms"
    code, out, _ = run(capsys, "locals-fsm", str(protocols / "parallel_tasks.mpst"),
                       "--preset", "APIGenInScala3", "--dot-dir", str(out_dir))
    assert code == 0
    assert sorted(p.name for p in out_dir.iterdir()) == ["pA.dot", "pB.dot"]


def test_bisim_matching(protocols, capsys):
    code, out, _ = run(capsys, "bisim", str(protocols / "parallel_tasks.mpst"),
                       "--a", "APIGenInScala3", "--b", "ST4MP")
    assert code == 0
    assert "verdict: bisimilar" in out


def test_bisim_diverging(protocols, capsys):
    code, out, _ = run(capsys, "bisim", str(protocols / "parallel_tasks.mpst"),
                       "--a", "APIGenInScala3", "--b", "UnorderedChoreo")
    assert code == 1
    assert "verdict: notBisimilar" in out
    assert "evidence" in out


def test_bisim_side_error(protocols, capsys):
    code, out, _ = run(capsys, "bisim", str(protocols / "branching_tasks.mpst"),
                       "--a", "VeryGentleIntroMPST", "--b", "GentleIntroMPAsyncST")
    assert code == 1
    assert "semantics A:" in out
    assert "pC: (pB?TaskA + pB?TaskB)" in out
    assert "[Plain Merge] - projection undefined for [pC]" in out


def test_json_mode_agrees_with_text(protocols, capsys):
    code_text, out_text, _ = run(capsys, "bisim", str(protocols / "parallel_tasks.mpst"),
                                 "--a", "APIGenInScala3", "--b", "UnorderedChoreo")
    code_json, out_json, _ = run(capsys, "bisim", str(protocols / "parallel_tasks.mpst"),
                                 "--a", "APIGenInScala3", "--b", "UnorderedChoreo", "--json")
    assert code_text == code_json == 1
    response = json.loads(out_json)
    assert response["payload"]["verdict"]["result"] == "notBisimilar"
    assert "notBisimilar" in out_text


def test_json_mode_on_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.mpst"
    bad.write_text("a->b:", encoding="utf-8")
    code, out, _ = run(capsys, "check", str(bad), "--json")
    assert code == 2
    response = json.loads(out)
    assert response["ok"] is False
    assert response["error"]["kind"] == "ParseError"


def test_named_example_selection(tmp_path, capsys):
    session = tmp_path / "multi.mpst"
    session.write_text('example "ping": a->b:m\nexample "pong": b->a:n\n', encoding="utf-8")
    code, out, _ = run(capsys, "project", str(session), "--example", "pong")
    assert code == 0
    assert "a: b?n" in out
    code, _, err = run(capsys, "project", str(session))
    assert code == 2
    assert "pick one with --example" in err


def test_examples_listing(capsys):
    code, out, _ = run(capsys, "examples")
    assert code == 0
    assert "work_loop" in out.split()
    code, out, _ = run(capsys, "examples", "--show", "empty")
    assert code == 0
    assert "skip" in out


def test_parse_semantics_spec_forms():
    assert parse_semantics_spec("ST4MP") == preset("ST4MP")
    custom = parse_semantics_spec("ST4MP,comm=unordered,merge=full")
    assert custom.comm_model is CommModel.UNORDERED
    assert custom.merge is MergeCriterion.FULL
    bare = parse_semantics_spec("merge=full,star=false,depth=7")
    assert bare.merge is MergeCriterion.FULL
    assert not bare.allow_kleene_star
    assert bare.bisim_depth_bound == 7


def test_parse_semantics_spec_rejects_junk():
    from mpstlab.cli import UsageError
    with pytest.raises(UsageError):
        parse_semantics_spec("NotAPreset")
    with pytest.raises(UsageError):
        parse_semantics_spec("merge")
    with pytest.raises(UsageError):
        parse_semantics_spec("turbo=true")


def test_usage_error_exit_code(capsys):
    assert main(["bisim", "whatever.mpst", "--a", "Nope", "--b", "ST4MP"]) == 2
    capsys.readouterr()
