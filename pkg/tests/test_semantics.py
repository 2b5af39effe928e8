import pytest

import oracle
from mpstlab.config import CommModel, MergeCriterion, SemanticsConfig, preset
from mpstlab.equivalence import bounded_traces
from mpstlab.parser import parse_global, print_local
from mpstlab.projection import project_all
from mpstlab.semantics import (
    ActionLabel, BagBuffer, Configuration, FifoBuffer, NotEnabledError,
    SyncBuffer, build_lts, canon_state, enabled, enabled_local, initial, step,
    terminal_kind,
)
from mpstlab.terms import CommTriple, LRec, LRecv, LSend, LSeq, LSkip, LSKIP, LVar

SYNC = SemanticsConfig(merge=MergeCriterion.FULL, comm_model=CommModel.SYNC)
ORDERED = SYNC.with_overrides(comm_model=CommModel.ORDERED)
UNORDERED = SYNC.with_overrides(comm_model=CommModel.UNORDERED)

WORK_LOOP = parse_global("rec X . controller->worker:{Work ; worker->controller:Done ; X, Quit}")
PARALLEL_TASKS = parse_global("pA->pB:TaskA || pA->pB:TaskB")


def labels(moves):
    return sorted(str(label) for label, _ in moves)


def test_initial_buffers_match_model():
    locals_ = project_all(WORK_LOOP, SYNC)
    assert isinstance(initial(locals_, SYNC).buffer, SyncBuffer)
    assert isinstance(initial(locals_, ORDERED).buffer, FifoBuffer)
    assert isinstance(initial(locals_, UNORDERED).buffer, BagBuffer)
    assert initial({}, SYNC).session == ()


def test_enabled_local_offers_branches():
    locals_ = project_all(WORK_LOOP, SYNC)
    intents = enabled_local(locals_["worker"], {})
    offers = {(i.polarity, i.sender, i.receiver, i.label) for i in intents}
    assert offers == {("?", "controller", "worker", "Work"),
                      ("?", "controller", "worker", "Quit")}
    assert enabled_local(LSKIP, {}) == []


def test_enabled_local_parallel_preserves_sibling():
    locals_ = project_all(PARALLEL_TASKS, SYNC)
    intents = enabled_local(locals_["pA"], {})
    assert len(intents) == 2
    conts = {print_local(i.continuation) for i in intents}
    assert conts == {"pB!TaskA", "pB!TaskB"}


def test_sync_enabled_initial_work_loop():
    locals_ = project_all(WORK_LOOP, SYNC)
    moves = enabled(initial(locals_, SYNC), SYNC)
    assert labels(moves) == ["controller→worker:Quit", "controller→worker:Work"]


def test_sync_quit_reaches_clean_terminal():
    locals_ = project_all(WORK_LOOP, SYNC)
    state = step(initial(locals_, SYNC), "controller→worker:Quit", SYNC)
    assert terminal_kind(state, SYNC) == "clean"


def test_step_not_enabled():
    locals_ = project_all(PARALLEL_TASKS, ORDERED)
    state = initial(locals_, ORDERED)
    with pytest.raises(NotEnabledError):
        step(state, "pBpA!Done", ORDERED)


def test_ordered_send_appends_to_queue():
    locals_ = project_all(PARALLEL_TASKS, ORDERED)
    state = step(initial(locals_, ORDERED), "pApB!TaskA", ORDERED)
    assert state.buffer.queues == ((("pA", "pB"), ("TaskA",)),)


def test_fifo_head_only_receive():
    locals_ = project_all(PARALLEL_TASKS, ORDERED)
    state = initial(locals_, ORDERED)
    state = step(state, "pApB!TaskA", ORDERED)
    state = step(state, "pApB!TaskB", ORDERED)
    receives = [text for text in labels(enabled(state, ORDERED)) if "?" in text]
    assert receives == ["pApB?TaskA"]


def test_bag_receives_any_order():
    locals_ = project_all(PARALLEL_TASKS, UNORDERED)
    state = initial(locals_, UNORDERED)
    state = step(state, "pApB!TaskA", UNORDERED)
    state = step(state, "pApB!TaskB", UNORDERED)
    receives = [text for text in labels(enabled(state, UNORDERED)) if "?" in text]
    assert receives == ["pApB?TaskA", "pApB?TaskB"]


def test_work_loop_sync_state_space():
    locals_ = project_all(WORK_LOOP, SYNC)
    lts = build_lts(locals_, SYNC)
    assert len(lts.states) == 3
    assert not lts.truncated
    done_edges = [(i, j) for i, label, j in lts.edges if label.label == "Done"]
    assert done_edges == [(2, 0)] or done_edges == [(1, 0)]
    # the Done edge returns to the initial state
    assert all(j == 0 for _, j in done_edges)


def test_parallel_tasks_sync_diamond():
    locals_ = project_all(PARALLEL_TASKS, SYNC)
    lts = build_lts(locals_, SYNC)
    assert len(lts.states) == 4
    assert len(lts.edges) == 4


def test_skip_only_session():
    lts = build_lts({"a": LSKIP}, SYNC)
    assert len(lts.states) == 1 and len(lts.edges) == 0
    assert terminal_kind(lts.states[0], SYNC) == "clean"


def test_stuck_configuration_detected():
    # one receiver waiting forever on a message nobody sends
    waiting = {"b": LRecv("b", "a", (("m", LSkip()),))}
    lts = build_lts(waiting, SYNC)
    assert terminal_kind(lts.states[0], SYNC) == "stuck"


def test_live_configuration_not_terminal():
    locals_ = project_all(PARALLEL_TASKS, SYNC)
    assert terminal_kind(initial(locals_, SYNC), SYNC) is None


def test_truncation_reported():
    locals_ = project_all(parse_global("(a->b:m)*"), ORDERED.with_overrides(
        exploration_max_states=3))
    lts = build_lts(locals_, ORDERED.with_overrides(exploration_max_states=3))
    assert lts.truncated
    assert len(lts.states) == 3
    assert lts.incomplete


def test_canon_state_resolves_variable_loops():
    rec = LRec("X", LSend("a", "b", (("m", LVar("X")),)))
    local, env = canon_state(LVar("X"), {"X": rec})
    assert local == rec
    assert env == {}


def test_determinism_of_build():
    locals_ = project_all(WORK_LOOP, ORDERED)
    a = build_lts(locals_, ORDERED)
    b = build_lts(locals_, ORDERED)
    assert a == b


def test_bag_conservation_along_paths():
    locals_ = project_all(PARALLEL_TASKS, UNORDERED)
    lts = build_lts(locals_, UNORDERED)
    # replay every edge path by BFS, tracking sends minus receives
    from collections import deque
    counts = {0: {}}
    queue = deque([0])
    adjacency = {}
    for i, label, j in lts.edges:
        adjacency.setdefault(i, []).append((label, j))
    while queue:
        i = queue.popleft()
        for label, j in adjacency.get(i, []):
            expected = dict(counts[i])
            triple = CommTriple(label.sender, label.receiver, label.label)
            if label.kind == "send":
                expected[triple] = expected.get(triple, 0) + 1
            elif label.kind == "recv":
                expected[triple] -= 1
                if not expected[triple]:
                    del expected[triple]
            actual = {t: n for t, n in lts.states[j].buffer.messages}
            assert actual == expected
            if j not in counts:
                counts[j] = expected
                queue.append(j)


def _engine_traces(locals_, cfg, depth):
    return bounded_traces(build_lts(locals_, cfg), depth)


def test_engine_matches_oracle_on_work_loop():
    locals_ = project_all(WORK_LOOP, SYNC)
    for cfg, model in ((SYNC, "sync"), (ORDERED, "ordered"), (UNORDERED, "unordered")):
        assert _engine_traces(locals_, cfg, 6) == oracle.traces(locals_, model, 6)


def test_sync_edges_have_async_counterparts():
    locals_ = project_all(WORK_LOOP, SYNC)
    sync_traces = _engine_traces(locals_, SYNC, 4)
    ordered_traces = _engine_traces(locals_, ORDERED, 8)
    for trace in sync_traces:
        expanded = []
        for text in trace:
            sender, rest = text.split("→")
            receiver, label = rest.split(":")
            expanded += [f"{sender}{receiver}!{label}", f"{sender}{receiver}?{label}"]
        assert tuple(expanded) in ordered_traces
