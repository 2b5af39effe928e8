"""Projection of global types onto participants, and merging of local views.

Projection is partial: a non-involved observer of a branching interaction
only gets a local type when its views of the branches merge under the active
criterion (plain: identical continuations; full: compatible receive
branchings).  Loops written with the star operator additionally require that
every participant can tell another iteration from the continuation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .config import MergeCriterion, SemanticsConfig
from .parser import print_global, print_local
from .terms import (
    GChoice, GComm, GPar, GRec, GSeq, GSkip, GStar, GVar, GlobalType,
    LChoice, LPar, LRec, LSend, LRecv, LSeq, LSkip, LStar, LVar, LocalType,
    LSKIP, SKIP, participants, par_local, seq_global, seq_local, terminable,
)
from .wellformed import choice_endpoints, first_comms

_CRITERION_TITLE = {MergeCriterion.PLAIN: "Plain", MergeCriterion.FULL: "Full"}


class ProjectionError(Exception):
    """Projection undefined: an impossible merge or an ambiguous loop."""

    def __init__(self, kind: str, participant: str, offending: str,
                 merge_criterion: MergeCriterion, message: str):
        super().__init__(message)
        self.kind = kind  # "mergeUndefined" | "kpViolation"
        self.participant = participant
        self.offending = offending
        self.merge_criterion = merge_criterion
        self.message = message

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "participant": self.participant,
            "offending": self.offending,
            "mergeCriterion": _CRITERION_TITLE[self.merge_criterion].lower(),
            "message": self.message,
        }


class MergeUndefined(Exception):
    """Internal: two local views that do not merge; carries their printouts."""

    def __init__(self, left: LocalType, right: LocalType):
        self.left_text = print_local(left)
        self.right_text = print_local(right)
        super().__init__(f"cannot merge [{self.left_text}] with [{self.right_text}]")


def _normalize(l: LocalType) -> LocalType:
    """Merge-time normal form.

    A single-branch action followed by a sequence is folded into the branch
    (`peer?t ; L` and `peer?{t ; L}` are interchangeable shorthands), and
    skip units in sequences and parallels are dropped.
    """
    if isinstance(l, (LSend, LRecv)):
        cls = type(l)
        return cls(l.subject, l.peer, tuple((t, _normalize(c)) for t, c in l.branches))
    if isinstance(l, LSeq):
        first = _normalize(l.first)
        second = _normalize(l.second)
        if isinstance(first, (LSend, LRecv)) and len(first.branches) == 1:
            (label, cont), = first.branches
            return type(first)(first.subject, first.peer,
                               ((label, _normalize(seq_local(cont, second))),))
        return seq_local(first, second)
    if isinstance(l, LPar):
        return par_local(_normalize(l.left), _normalize(l.right))
    if isinstance(l, LChoice):
        return LChoice(_normalize(l.left), _normalize(l.right))
    if isinstance(l, LRec):
        return LRec(l.var, _normalize(l.body))
    if isinstance(l, LStar):
        return LStar(_normalize(l.body))
    return l


def _full_merge(a: LocalType, b: LocalType) -> LocalType:
    if a == b:
        return a
    if isinstance(a, LRecv) and isinstance(b, LRecv) \
            and a.subject == b.subject and a.peer == b.peer:
        merged = list(a.branches)
        index = {t: i for i, (t, _) in enumerate(merged)}
        for label, cont in b.branches:
            if label in index:
                i = index[label]
                merged[i] = (label, _full_merge(merged[i][1], cont))
            else:
                merged.append((label, cont))
        return LRecv(a.subject, a.peer, tuple(merged))
    if isinstance(a, LSeq) and isinstance(b, LSeq):
        return LSeq(_full_merge(a.first, b.first), _full_merge(a.second, b.second))
    if isinstance(a, LPar) and isinstance(b, LPar):
        return LPar(_full_merge(a.left, b.left), _full_merge(a.right, b.right))
    if isinstance(a, LChoice) and isinstance(b, LChoice):
        return LChoice(_full_merge(a.left, b.left), _full_merge(a.right, b.right))
    if isinstance(a, LRec) and isinstance(b, LRec) and a.var == b.var:
        return LRec(a.var, _full_merge(a.body, b.body))
    if isinstance(a, LStar) and isinstance(b, LStar):
        return LStar(_full_merge(a.body, b.body))
    raise MergeUndefined(a, b)


def merge_locals(locals_, criterion: MergeCriterion) -> LocalType:
    """Combine the local views of the branches of one interaction.

    Plain merge requires all views equal (modulo normalisation) and returns
    the first; full merge folds the views pairwise, uniting compatible
    receive branchings.  Raises MergeUndefined otherwise.
    """
    locals_ = list(locals_)
    if not locals_:
        raise ValueError("merge of an empty list")
    head, *rest = locals_
    if all(_normalize(head) == _normalize(other) for other in rest):
        return head
    if criterion is MergeCriterion.PLAIN:
        offender = next(o for o in rest if _normalize(head) != _normalize(o))
        raise MergeUndefined(head, offender)
    result = _normalize(head)
    for other in rest:
        result = _full_merge(result, _normalize(other))
    return result


# --- first observable actions of a participant, on the global type ---------


def _locally_terminable(g: GlobalType, r: str) -> bool:
    """Whether r's view of g can complete without r acting."""
    if isinstance(g, (GSkip, GStar)):
        return True
    if isinstance(g, GVar):
        return False
    if isinstance(g, GComm):
        if r in (g.sender, g.receiver):
            return False
        return all(_locally_terminable(c, r) for _, c in g.branches)
    if isinstance(g, GSeq):
        return _locally_terminable(g.first, r) and _locally_terminable(g.second, r)
    if isinstance(g, GPar):
        return _locally_terminable(g.left, r) and _locally_terminable(g.right, r)
    if isinstance(g, GChoice):
        return _locally_terminable(g.left, r) or _locally_terminable(g.right, r)
    if isinstance(g, GRec):
        return _locally_terminable(g.body, r)
    raise TypeError(f"not a global type: {g!r}")


def first_actions(g: GlobalType, r: str) -> frozenset:
    """r's possible first moves in g, as (direction, peer, label) triples."""
    if isinstance(g, GComm):
        if g.sender == r:
            return frozenset(("!", g.receiver, t) for t, _ in g.branches)
        if g.receiver == r:
            return frozenset(("?", g.sender, t) for t, _ in g.branches)
        out = frozenset()
        for _, c in g.branches:
            out |= first_actions(c, r)
        return out
    if isinstance(g, GSeq):
        out = first_actions(g.first, r)
        if _locally_terminable(g.first, r):
            out |= first_actions(g.second, r)
        return out
    if isinstance(g, (GPar, GChoice)):
        return first_actions(g.left, r) | first_actions(g.right, r)
    if isinstance(g, (GRec, GStar)):
        return first_actions(g.body, r)
    return frozenset()


def kp_check(body: GlobalType, continuation: GlobalType,
             criterion: MergeCriterion) -> None:
    """Loop projectability: iterating must be distinguishable from exiting.

    The sender of the loop's first communication decides; every other loop
    participant must observe the decision passively, seeing only receives
    from a single peer across loop entry and continuation, with disjoint
    first-action sets.  Raises ProjectionError for the first failing
    participant in name order.
    """
    body_parts = participants(body)
    cont_parts = participants(continuation)
    deciders = {t.sender for t in first_comms(body)}
    decider = next(iter(deciders)) if len(deciders) == 1 else None

    def fail(r: str, why: str):
        star_text = print_global(GStar(body))
        raise ProjectionError(
            "kpViolation", r, star_text, criterion,
            f"[Kleene Star] - projection undefined for [{r}] in [{star_text}]: {why}",
        )

    for r in sorted(body_parts | cont_parts):
        loop_acts = first_actions(body, r)
        cont_acts = first_actions(continuation, r) if r in cont_parts else frozenset()
        if loop_acts & cont_acts:
            fail(r, "the same first action may start another iteration or the continuation")
        if r not in body_parts or r == decider:
            continue
        acts = loop_acts | cont_acts
        if not loop_acts:
            fail(r, "no first action inside the loop")
        if any(direction != "?" for direction, _, _ in acts):
            fail(r, "cannot decide between iterating and proceeding by itself")
        if len({peer for _, peer, _ in acts}) > 1:
            fail(r, "would have to watch several peers to detect the loop exit")


# --- projection -------------------------------------------------------------


def project(g: GlobalType, r: str, cfg: SemanticsConfig) -> LocalType:
    """The Fig.-3-style projection of g onto r under cfg's merge criterion.

    Raises ProjectionError when a merge is undefined or a loop fails the
    projectability criterion.  Expects a core-well-formed global type.
    """
    criterion = cfg.merge

    def merge_here(node: GlobalType, views) -> LocalType:
        try:
            return merge_locals(views, criterion)
        except MergeUndefined:
            term = print_global(node)
            title = _CRITERION_TITLE[criterion]
            raise ProjectionError(
                "mergeUndefined", r, term, criterion,
                f"[{title} Merge] - projection undefined for [{r}] in [{term}]",
            ) from None

    def go(t: GlobalType, cont: GlobalType) -> LocalType:
        if isinstance(t, GSkip):
            return LSKIP
        if isinstance(t, GVar):
            return LVar(t.var)
        if isinstance(t, GRec):
            if r not in participants(t.body):
                return LSKIP
            return LRec(t.var, go(t.body, cont))
        if isinstance(t, GStar):
            kp_check(t.body, cont, criterion)
            if r not in participants(t.body):
                return LSKIP
            return LStar(go(t.body, SKIP))
        if isinstance(t, GComm):
            if t.sender == r:
                return LSend(r, t.receiver, tuple((lb, go(c, cont)) for lb, c in t.branches))
            if t.receiver == r:
                return LRecv(r, t.sender, tuple((lb, go(c, cont)) for lb, c in t.branches))
            return merge_here(t, [go(c, cont) for _, c in t.branches])
        if isinstance(t, GSeq):
            return seq_local(go(t.first, seq_global(t.second, cont)), go(t.second, cont))
        if isinstance(t, GPar):
            return par_local(go(t.left, cont), go(t.right, cont))
        if isinstance(t, GChoice):
            left = go(t.left, cont)
            right = go(t.right, cont)
            if isinstance(left, LSkip) and isinstance(right, LSkip):
                return LSKIP
            decider, receiver = choice_endpoints(t.left, t.right)
            if r not in (decider, receiver):
                merge_here(t, [left, right])
            return LChoice(left, right)
        raise TypeError(f"not a global type: {t!r}")

    return go(g, SKIP)


def project_all(g: GlobalType, cfg: SemanticsConfig) -> dict:
    """Projection for every participant of g, keyed by participant.

    The first failing participant (in name order) raises; an empty map for a
    protocol without communications.
    """
    return {r: project(g, r, cfg) for r in sorted(participants(g))}
