import random

import pytest

from astgen import PARTICIPANTS, random_local, random_wellformed_global
from mpstlab.config import MergeCriterion, SemanticsConfig, preset
from mpstlab.parser import parse_global, print_local
from mpstlab.projection import (
    MergeUndefined, ProjectionError, first_actions, merge_locals, project,
    project_all,
)
from mpstlab.terms import (
    LRecv, LSend, LSeq, LSkip, LSKIP, participants, subjects, terminable,
)
from mpstlab.wellformed import check_core

PLAIN = SemanticsConfig(merge=MergeCriterion.PLAIN)
FULL = SemanticsConfig(merge=MergeCriterion.FULL)


def test_work_loop_projections():
    g = parse_global("rec X . controller->worker:{Work ; worker->controller:Done ; X, Quit}")
    locals_ = project_all(g, PLAIN)
    assert print_local(locals_["controller"]) == "rec X . worker!{Work ; worker?Done ; X, Quit}"
    assert print_local(locals_["worker"]) == "rec X . controller?{Work ; controller!Done ; X, Quit}"


def test_controller_workers_projections():
    g = parse_global(
        "controller->worker_A:Work ; controller->worker_B:Work ; "
        "(worker_A->controller:Done || worker_B->controller:Done)"
    )
    locals_ = project_all(g, PLAIN)
    assert print_local(locals_["controller"]) == (
        "worker_A!Work ; worker_B!Work ; (worker_A?Done || worker_B?Done)"
    )
    assert print_local(locals_["worker_A"]) == "controller?Work ; controller!Done"
    assert print_local(locals_["worker_B"]) == "controller?Work ; controller!Done"


def test_projection_drops_non_participants():
    g = parse_global("a->b:m ; (c->d:n)* ; rec X . c->d:{go ; X, stop}")
    local = project(g, "a", PLAIN)
    assert print_local(local) == "b!m"


def test_project_all_on_skip_is_empty():
    assert project_all(parse_global("skip"), PLAIN) == {}


def test_branching_tasks_plain_fails_for_pC():
    g = parse_global("(pA->pB:TaskA ; pB->pC:TaskA) + (pA->pB:TaskB ; pB->pC:TaskB)")
    with pytest.raises(ProjectionError) as err:
        project_all(g, PLAIN)
    assert err.value.kind == "mergeUndefined"
    assert err.value.participant == "pC"
    assert err.value.message.startswith("[Plain Merge] - projection undefined for [pC] in [")


def test_branching_tasks_full_succeeds():
    g = parse_global("(pA->pB:TaskA ; pB->pC:TaskA) + (pA->pB:TaskB ; pB->pC:TaskB)")
    locals_ = project_all(g, FULL)
    assert print_local(locals_["pA"]) == "(pB!TaskA + pB!TaskB)"
    assert print_local(locals_["pB"]) == "(pA?TaskA ; pC!TaskA + pA?TaskB ; pC!TaskB)"
    assert print_local(locals_["pC"]) == "(pB?TaskA + pB?TaskB)"


def test_merge_identity():
    rng = random.Random(5)
    for _ in range(50):
        l = random_local(rng, "alice", ["bob", "carol"])
        assert merge_locals([l, l], MergeCriterion.PLAIN) == l
        assert merge_locals([l, l], MergeCriterion.FULL) == l


def test_full_merge_unites_disjoint_receives():
    a = LRecv("pC", "pB", (("TaskA", LSKIP),))
    b = LRecv("pC", "pB", (("TaskB", LSKIP),))
    merged = merge_locals([a, b], MergeCriterion.FULL)
    assert merged == LRecv("pC", "pB", (("TaskA", LSKIP), ("TaskB", LSKIP)))
    with pytest.raises(MergeUndefined):
        merge_locals([a, b], MergeCriterion.PLAIN)


def test_full_merge_rejects_distinct_sends():
    a = LSend("pB", "pC", (("TaskA", LSKIP),))
    b = LSend("pB", "pC", (("TaskB", LSKIP),))
    with pytest.raises(MergeUndefined):
        merge_locals([a, b], MergeCriterion.FULL)


def test_merge_normalises_branch_shorthand():
    cont = LSend("c", "w", (("ok", LSKIP),))
    folded = LRecv("c", "b", (("m", cont),))
    sequenced = LSeq(LRecv("c", "b", (("m", LSKIP),)), cont)
    assert merge_locals([folded, sequenced], MergeCriterion.PLAIN) == folded


def test_full_merge_shared_label_recurses():
    a = LRecv("c", "b", (("m", LRecv("c", "b", (("x", LSKIP),))),))
    b = LRecv("c", "b", (("m", LRecv("c", "b", (("y", LSKIP),))),))
    merged = merge_locals([a, b], MergeCriterion.FULL)
    assert merged == LRecv("c", "b", (("m", LRecv("c", "b", (("x", LSKIP), ("y", LSKIP)))),))


def test_kp_violation_names_first_failing_participant():
    g = parse_global("(a->b:m ; b->c:mP)* ; c->d:mPP")
    with pytest.raises(ProjectionError) as err:
        project_all(g, PLAIN)
    assert err.value.kind == "kpViolation"
    assert err.value.participant == "c"


def test_kp_accepts_bare_loop():
    g = parse_global("(c->w:Work ; w->c:Done)*")
    locals_ = project_all(g, PLAIN)
    assert print_local(locals_["c"]) == "(w!Work ; w?Done)*"
    assert print_local(locals_["w"]) == "(c?Work ; c!Done)*"


def test_kp_accepts_decider_signalled_exit():
    g = parse_global("(a->b:m)* ; a->b:n")
    locals_ = project_all(g, PLAIN)
    assert print_local(locals_["b"]) == "(a?m)* ; a?n"


def test_kp_rejects_loop_sender_who_does_not_decide():
    g = parse_global("(a->b:m ; c->b:k)* ; a->b:n")
    with pytest.raises(ProjectionError) as err:
        project_all(g, PLAIN)
    assert err.value.kind == "kpViolation"
    assert err.value.participant == "c"


def test_first_actions():
    g = parse_global("(a->b:m)* ; a->b:n")
    assert first_actions(g, "b") == {("?", "a", "m"), ("?", "a", "n")}
    assert first_actions(g, "a") == {("!", "b", "m"), ("!", "b", "n")}


def test_projection_deterministic():
    g = parse_global("(pA->pB:TaskA ; pB->pC:TaskA) + (pA->pB:TaskB ; pB->pC:TaskB)")
    first_error = None
    for _ in range(2):
        try:
            project_all(g, PLAIN)
        except ProjectionError as exc:
            if first_error is None:
                first_error = exc.message
            else:
                assert exc.message == first_error


def test_participant_soundness_on_random_wellformed():
    rng = random.Random(99)
    defined = 0
    for _ in range(300):
        g = random_wellformed_global(rng, depth=3)
        if not check_core(g).ok:
            continue
        try:
            locals_ = project_all(g, FULL)
        except ProjectionError:
            continue
        defined += 1
        for r, local in locals_.items():
            assert subjects(local) <= {r}
            if r not in participants(g):
                assert terminable(local)
    assert defined > 100  # the property must be exercised on real cases


def test_plain_defined_implies_full_equal():
    rng = random.Random(123)
    checked = 0
    for _ in range(400):
        owner = "alice"
        ls = [random_local(rng, owner, ["bob", "carol"], depth=2) for _ in range(2)]
        if rng.random() < 0.4:
            ls[1] = ls[0]
        try:
            plain = merge_locals(ls, MergeCriterion.PLAIN)
        except MergeUndefined:
            continue
        checked += 1
        full = merge_locals(ls, MergeCriterion.FULL)
        assert full == plain
    assert checked > 50


def test_non_participants_vanish():
    g = parse_global("rec X . a->b:{m ; X, n}")
    assert project(g, "zoe", PLAIN) == LSKIP
