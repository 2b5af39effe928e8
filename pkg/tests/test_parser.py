import random

import pytest

from astgen import random_global
from mpstlab.parser import (
    ParseError, parse_global, parse_session_file, print_global, print_local,
)
from mpstlab.terms import (
    GChoice, GComm, GPar, GRec, GSeq, GSkip, GStar, GVar, LChoice, LRec,
    LRecv, LSend, LSeq, LSkip, SKIP,
)


def test_single_communication():
    assert parse_global("c->w:Work") == GComm("c", "w", (("Work", SKIP),))


def test_work_loop_shape():
    g = parse_global("rec X . c->w:{Work ; w->c:Done ; X, Quit}")
    assert g == GRec("X", GComm("c", "w", (
        ("Work", GSeq(GComm("w", "c", (("Done", SKIP),)), GVar("X"))),
        ("Quit", SKIP),
    )))


def test_star_then_continuation():
    g = parse_global("(a->b:m ; b->c:mP)* ; c->d:mPP")
    assert g == GSeq(
        GStar(GSeq(GComm("a", "b", (("m", SKIP),)), GComm("b", "c", (("mP", SKIP),)))),
        GComm("c", "d", (("mPP", SKIP),)),
    )


def test_precedence_star_seq_par_choice():
    g = parse_global("a->b:m ; c->d:n || e->f:o + a->b:p")
    # ; over ||, || over +
    assert isinstance(g, GChoice)
    assert isinstance(g.left, GPar)
    assert isinstance(g.left.left, GSeq)


def test_right_associativity():
    g = parse_global("a->b:m ; a->b:n ; a->b:o")
    assert isinstance(g, GSeq) and isinstance(g.second, GSeq)


def test_comments_and_whitespace():
    g = parse_global("// intro\n  a->b:m   ; // trailing\n b->a:n\n")
    assert isinstance(g, GSeq)


def test_duplicate_labels_and_self_comm_are_not_parse_errors():
    assert parse_global("a->a:m") == GComm("a", "a", (("m", SKIP),))
    parsed = parse_global("a->b:{m, m}")
    assert len(parsed.branches) == 2


def test_shadowed_rec_var_rejected():
    with pytest.raises(ParseError) as err:
        parse_global("rec X . a->b:{m ; rec X . a->b:n, o}")
    assert "shadows" in str(err.value)


def test_parse_error_position():
    with pytest.raises(ParseError) as err:
        parse_global("a->b:\n  ;")
    assert err.value.line == 2
    assert err.value.expected


def test_unexpected_character():
    with pytest.raises(ParseError):
        parse_global("a->b:m $ c")


def test_session_file_with_named_examples():
    text = '''
    example "first": a->b:m
    example "second": rec X . a->b:{m ; X, n}
    '''
    entries = parse_session_file(text)
    assert [e.name for e in entries] == ["first", "second"]
    assert entries[0].protocol == GComm("a", "b", (("m", SKIP),))


def test_session_file_duplicate_names_rejected():
    with pytest.raises(ParseError):
        parse_session_file('example "x": skip example "x": skip')


def test_session_file_bare_protocol():
    entries = parse_session_file("a->b:m ; b->a:n")
    assert len(entries) == 1 and entries[0].name is None


def test_print_skip():
    assert print_global(SKIP) == "skip"


def test_print_star():
    assert print_global(GStar(GComm("c", "w", (("Work", SKIP),)))) == "(c->w:Work)*"


def test_print_controller_workers():
    g = parse_global(
        "controller->worker_A:Work ; controller->worker_B:Work ; "
        "(worker_A->controller:Done || worker_B->controller:Done)"
    )
    assert print_global(g) == (
        "controller->worker_A:Work ; controller->worker_B:Work ; "
        "(worker_A->controller:Done || worker_B->controller:Done)"
    )


def test_print_parenthesizes_left_nesting():
    g = GSeq(GSeq(GComm("a", "b", (("m", SKIP),)), GComm("b", "a", (("n", SKIP),))),
             GComm("a", "b", (("o", SKIP),)))
    text = print_global(g)
    assert text == "(a->b:m ; b->a:n) ; a->b:o"
    assert parse_global(text) == g


def test_print_local_abbreviates_owner():
    l = LRec("X", LSend("controller", "worker", (
        ("Work", LSeq(LRecv("controller", "worker", (("Done", LSkip()),)), LSkip())),
        ("Quit", LSkip()),
    )))
    # the seq unit is printed away by construction in projection; here keep raw
    assert print_local(l).startswith("rec X . worker!{Work ; worker?Done")


def test_print_local_skip():
    assert print_local(LSkip()) == "skip"


def test_print_local_choice_parenthesized():
    l = LChoice(LRecv("pC", "pB", (("TaskA", LSkip()),)),
                LRecv("pC", "pB", (("TaskB", LSkip()),)))
    assert print_local(l) == "(pB?TaskA + pB?TaskB)"


def test_print_local_explicit_when_owners_mixed():
    l = LSeq(LSend("a", "b", (("m", LSkip()),)), LRecv("b", "a", (("m", LSkip()),)))
    assert print_local(l) == "a!b:m ; b?a:m"


def test_roundtrip_fixed_corpus():
    for text in [
        "skip",
        "a->b:m",
        "a->b:{m, n ; b->a:o}",
        "(a->b:m)*",
        "rec X . a->b:{go ; X, stop}",
        "(a->b:m + c->d:n)",
        "a->b:m || (c->d:n ; d->c:o)",
        "((a->b:m ; b->c:n))* ; c->d:o",
    ]:
        g = parse_global(text)
        assert parse_global(print_global(g)) == g


def test_roundtrip_random_asts():
    rng = random.Random(20240817)
    for _ in range(300):
        g = random_global(rng, depth=4)
        printed = print_global(g)
        assert parse_global(printed) == g, printed
