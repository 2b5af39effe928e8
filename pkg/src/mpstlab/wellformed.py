"""Static checks over protocols: core shape, construct gating, extras.

Every check returns a CheckReport whose violations are data, never raised;
an empty report means the input passes.  Reports aggregate all violations
rather than failing fast, sorted by kind then location.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .config import SemanticsConfig
from .parser import print_global, print_local
from .terms import (
    CommTriple, GChoice, GComm, GPar, GRec, GSeq, GSkip, GStar, GVar,
    GlobalType, LChoice, LPar, LRec, LSend, LRecv, LSeq, LStar, LVar,
    LocalType, comm, free_vars, participants, participants_local, subjects,
    terminable,
)


class ViolationKind(str, enum.Enum):
    SELF_COMMUNICATION = "SelfCommunication"
    DUPLICATE_LABELS = "DuplicateLabels"
    UNGUARDED_RECURSION = "UnguardedRecursion"
    UNBOUND_VARIABLE = "UnboundVariable"
    PARALLEL_FORBIDDEN = "ParallelForbidden"
    FIXED_POINT_FORBIDDEN = "FixedPointForbidden"
    KLEENE_STAR_FORBIDDEN = "KleeneStarForbidden"
    NOT_WELL_CHANNELLED = "NotWellChannelled"
    NOT_WELL_BRANCHED = "NotWellBranched"


@dataclass(frozen=True)
class Violation:
    kind: ViolationKind
    subjects: tuple
    location: str
    message: str

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "subjects": list(self.subjects),
            "location": self.location,
            "message": self.message,
        }


@dataclass(frozen=True)
class CheckReport:
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"violations": [v.to_json() for v in self.violations]}

    def __add__(self, other: "CheckReport") -> "CheckReport":
        return _report(list(self.violations) + list(other.violations))


def _report(violations) -> CheckReport:
    ordered = sorted(violations, key=lambda v: (v.kind.value, v.location, v.message))
    return CheckReport(tuple(ordered))


def _subject_list(names) -> str:
    return "[" + ", ".join(sorted(names)) + "]"


def _walk(t):
    yield t
    if isinstance(t, (GComm, LSend, LRecv)):
        for _, g in t.branches:
            yield from _walk(g)
    elif isinstance(t, (GSeq, LSeq)):
        yield from _walk(t.first)
        yield from _walk(t.second)
    elif isinstance(t, (GPar, GChoice, LPar, LChoice)):
        yield from _walk(t.left)
        yield from _walk(t.right)
    elif isinstance(t, (GRec, GStar, LRec, LStar)):
        yield from _walk(t.body)


def _initial_vars(t) -> frozenset:
    """Recursion variables reachable without first crossing a communication."""
    if isinstance(t, (GVar, LVar)):
        return frozenset({t.var})
    if isinstance(t, (GSeq, LSeq)):
        out = _initial_vars(t.first)
        if terminable(t.first):
            out |= _initial_vars(t.second)
        return out
    if isinstance(t, (GPar, GChoice, LPar, LChoice)):
        return _initial_vars(t.left) | _initial_vars(t.right)
    if isinstance(t, (GRec, LRec, GStar, LStar)):
        return _initial_vars(t.body)
    return frozenset()


def _vars_under_par(t, inside: bool = False) -> frozenset:
    """Recursion variables with a parallel composition between binder and use.

    Such recursion forks a fresh branch per iteration, so the protocol and
    some projections grow without bound.
    """
    if isinstance(t, (GVar, LVar)):
        return frozenset({t.var}) if inside else frozenset()
    if isinstance(t, (GPar, LPar)):
        return _vars_under_par(t.left, True) | _vars_under_par(t.right, True)
    if isinstance(t, (GSeq, LSeq)):
        return _vars_under_par(t.first, inside) | _vars_under_par(t.second, inside)
    if isinstance(t, (GChoice, LChoice)):
        return _vars_under_par(t.left, inside) | _vars_under_par(t.right, inside)
    if isinstance(t, (GRec, LRec)):
        return _vars_under_par(t.body, inside) - {t.var}
    if isinstance(t, (GStar, LStar)):
        return _vars_under_par(t.body, inside)
    if isinstance(t, (GComm, LSend, LRecv)):
        out = frozenset()
        for _, cont in t.branches:
            out |= _vars_under_par(cont, inside)
        return out
    return frozenset()


def check_core(g: GlobalType) -> CheckReport:
    """Self-communications, duplicate labels, recursion guardedness, binding."""
    violations = []

    for node in _walk(g):
        if isinstance(node, GComm):
            loc = print_global(node)
            if node.sender == node.receiver:
                violations.append(Violation(
                    ViolationKind.SELF_COMMUNICATION, (node.sender,), loc,
                    f"participant [{node.sender}] communicates with itself",
                ))
            labels = [t for t, _ in node.branches]
            dupes = sorted({t for t in labels if labels.count(t) > 1})
            if dupes:
                violations.append(Violation(
                    ViolationKind.DUPLICATE_LABELS,
                    tuple(sorted({node.sender, node.receiver})), loc,
                    "branch labels must be pairwise distinct; repeated: "
                    + ", ".join(dupes),
                ))
        elif isinstance(node, GRec):
            if node.var in _initial_vars(node.body):
                violations.append(Violation(
                    ViolationKind.UNGUARDED_RECURSION,
                    tuple(sorted(participants(node.body))), print_global(node),
                    f"recursion variable {node.var} can recur without crossing "
                    "a communication",
                ))
            if node.var in _vars_under_par(node.body):
                violations.append(Violation(
                    ViolationKind.UNGUARDED_RECURSION,
                    tuple(sorted(participants(node.body))), print_global(node),
                    f"recursion variable {node.var} recurs under a parallel "
                    "composition, forking a fresh branch per iteration",
                ))
        elif isinstance(node, GStar):
            if not comm(node.body):
                violations.append(Violation(
                    ViolationKind.UNGUARDED_RECURSION, (), print_global(node),
                    "loop body contains no communication",
                ))

    def unbound(t, bound):
        if isinstance(t, GVar) and t.var not in bound:
            violations.append(Violation(
                ViolationKind.UNBOUND_VARIABLE, (), t.var,
                f"recursion variable {t.var} is not bound by any rec",
            ))
        elif isinstance(t, GRec):
            unbound(t.body, bound | {t.var})
        elif isinstance(t, GComm):
            for _, c in t.branches:
                unbound(c, bound)
        elif isinstance(t, (GSeq,)):
            unbound(t.first, bound)
            unbound(t.second, bound)
        elif isinstance(t, (GPar, GChoice)):
            unbound(t.left, bound)
            unbound(t.right, bound)
        elif isinstance(t, GStar):
            unbound(t.body, bound)

    unbound(g, frozenset())
    return _report(violations)


def _gating(root, cfg: SemanticsConfig, printer, parts_of, fixed_subjects=None):
    violations = []

    def add(kind, what, node):
        names = fixed_subjects if fixed_subjects is not None else tuple(sorted(parts_of(node)))
        violations.append(Violation(
            kind, names, printer(node),
            f"{what} - present on participant {_subject_list(names)}",
        ))

    for node in _walk(root):
        if isinstance(node, (GPar, LPar)) and not cfg.allow_parallel:
            add(ViolationKind.PARALLEL_FORBIDDEN, "Parallel Composition", node)
        elif isinstance(node, (GRec, LRec)) and not cfg.allow_fixed_point:
            add(ViolationKind.FIXED_POINT_FORBIDDEN, "Recursion Fixed Point", node)
        elif isinstance(node, (GStar, LStar)) and not cfg.allow_kleene_star:
            add(ViolationKind.KLEENE_STAR_FORBIDDEN, "Recursion Kleene Star", node)
    # Recursion variables with no enclosing binder are not covered by any
    # GRec/LRec node above.
    if not cfg.allow_fixed_point:
        names = fixed_subjects if fixed_subjects is not None else ()
        for var in sorted(free_vars(root)):
            violations.append(Violation(
                ViolationKind.FIXED_POINT_FORBIDDEN, names, var,
                f"Recursion Fixed Point - present on participant {_subject_list(names)}",
            ))
    return _report(violations)


def check_gating_global(g: GlobalType, cfg: SemanticsConfig) -> CheckReport:
    """Constructs the configuration forbids, with all involved participants."""
    return _gating(g, cfg, print_global, participants)


def check_gating_local(l: LocalType, cfg: SemanticsConfig, owner: str | None = None) -> CheckReport:
    """Per-participant gating; the subject is the owning participant."""
    if owner is None:
        owned = sorted(subjects(l))
        owner = owned[0] if owned else None
    fixed = (owner,) if owner is not None else ()
    return _gating(l, cfg, print_local, participants_local, fixed_subjects=fixed)


def check_well_channelled(g: GlobalType) -> CheckReport:
    """Parallel branches must have disjoint communication-triple sets."""
    violations = []
    for node in _walk(g):
        if isinstance(node, GPar):
            overlap = comm(node.left) & comm(node.right)
            if overlap:
                triples = sorted(str(t) for t in overlap)
                names = sorted({p for t in overlap for p in (t.sender, t.receiver)})
                violations.append(Violation(
                    ViolationKind.NOT_WELL_CHANNELLED, tuple(names), print_global(node),
                    "parallel branches share communications: [" + ", ".join(triples) + "]",
                ))
    return _report(violations)


def first_comms(g: GlobalType) -> frozenset:
    """Communication triples that can occur first in g."""
    if isinstance(g, GComm):
        return frozenset(CommTriple(g.sender, g.receiver, t) for t, _ in g.branches)
    if isinstance(g, GSeq):
        out = first_comms(g.first)
        if terminable(g.first):
            out |= first_comms(g.second)
        return out
    if isinstance(g, (GPar, GChoice)):
        return first_comms(g.left) | first_comms(g.right)
    if isinstance(g, (GRec, GStar)):
        return first_comms(g.body)
    return frozenset()


def choice_endpoints(left: GlobalType, right: GlobalType):
    """(decider, informed receiver) of a relaxed choice, or (None, None).

    Defined when both sides start with communications over one common
    sender-receiver pair and their label sets are disjoint; then the sender
    picks the side and the receiver learns it from the first label.
    """
    fc_left, fc_right = first_comms(left), first_comms(right)
    if not fc_left or not fc_right:
        return None, None
    pairs = {(t.sender, t.receiver) for t in fc_left | fc_right}
    if len(pairs) != 1:
        return None, None
    labels_left = {t.label for t in fc_left}
    labels_right = {t.label for t in fc_right}
    if labels_left & labels_right:
        return None, None
    ((sender, receiver),) = pairs
    return sender, receiver


def check_well_branched(g: GlobalType) -> CheckReport:
    """Relaxed choices must be rewritable into canonical branching."""
    violations = []
    for node in _walk(g):
        if not isinstance(node, GChoice):
            continue
        loc = print_global(node)
        fc_left, fc_right = first_comms(node.left), first_comms(node.right)
        names = tuple(sorted({p for t in fc_left | fc_right for p in (t.sender, t.receiver)}))
        if not fc_left or not fc_right:
            violations.append(Violation(
                ViolationKind.NOT_WELL_BRANCHED, names, loc,
                "both sides of a choice must start with a communication",
            ))
            continue
        pairs = {(t.sender, t.receiver) for t in fc_left | fc_right}
        if len(pairs) != 1:
            listed = ", ".join(f"{p}->{q}" for p, q in sorted(pairs))
            violations.append(Violation(
                ViolationKind.NOT_WELL_BRANCHED, names, loc,
                f"choice sides start on different channels: [{listed}]",
            ))
            continue
        shared = {t.label for t in fc_left} & {t.label for t in fc_right}
        if shared:
            violations.append(Violation(
                ViolationKind.NOT_WELL_BRANCHED, names, loc,
                "choice sides share first labels: [" + ", ".join(sorted(shared)) + "]",
            ))
    return _report(violations)


def check_all(g: GlobalType, cfg: SemanticsConfig) -> CheckReport:
    """Core checks, construct gating, and the configured extra requirements."""
    report = check_core(g) + check_gating_global(g, cfg)
    if cfg.require_well_channelled:
        report = report + check_well_channelled(g)
    if cfg.require_well_branched:
        report = report + check_well_branched(g)
    return report
