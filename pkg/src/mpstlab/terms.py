"""Abstract syntax of global and local protocol types.

Global types describe a whole choreography; local types describe one
participant's view of it.  Branch lists keep their written order (printing
and projection iterate in that order) but equality treats them as
label-keyed maps, so reordered branches compare equal.

All values are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union


class CommTriple(NamedTuple):
    """A single point-to-point communication (sender, receiver, label)."""

    sender: str
    receiver: str
    label: str

    def __str__(self) -> str:
        return f"{self.sender}->{self.receiver}:{self.label}"


def _freeze_branches(branches):
    return tuple((t, g) for t, g in branches)


def _parts(t):
    """(scalar key, child terms) of a node; branch maps in label-sorted order.

    The scalar key plus the children determine a node completely, with the
    label-keyed map view of branches (order-insensitive, duplicates collapse
    last-wins), so identity built on _parts treats reordered branches equal.
    """
    if isinstance(t, (GComm, LSend, LRecv)):
        mapped = {label: cont for label, cont in t.branches}
        labels = tuple(sorted(mapped))
        if isinstance(t, GComm):
            ends = (t.sender, t.receiver)
        else:
            ends = (t.subject, t.peer)
        return ends + (labels,), tuple(mapped[label] for label in labels)
    if isinstance(t, (GSeq, LSeq)):
        return (), (t.first, t.second)
    if isinstance(t, (GPar, GChoice, LPar, LChoice)):
        return (), (t.left, t.right)
    if isinstance(t, (GRec, LRec)):
        return (t.var,), (t.body,)
    if isinstance(t, (GVar, LVar)):
        return (t.var,), ()
    if isinstance(t, (GStar, LStar)):
        return (), (t.body,)
    if isinstance(t, (GSkip, LSkip)):
        return (), ()
    raise TypeError(f"not a protocol term: {t!r}")


def _seal(t) -> None:
    scalars, kids = _parts(t)
    digest = hash((type(t).__name__, scalars, tuple(k._h for k in kids)))
    object.__setattr__(t, "_h", digest)


def _term_eq(a, b) -> bool:
    # Explicit stack: configurations grown by long executions nest deeply,
    # beyond what recursive equality could survive.
    if a is b:
        return True
    if not isinstance(b, _Term):
        return NotImplemented
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if type(x) is not type(y) or x._h != y._h:
            return False
        x_scalars, x_kids = _parts(x)
        y_scalars, y_kids = _parts(y)
        if x_scalars != y_scalars or len(x_kids) != len(y_kids):
            return False
        stack.extend(zip(x_kids, y_kids))
    return True


class _Term:
    """Structural identity: hashes cached bottom-up, equality stack-based."""

    _h: int

    def __post_init__(self):
        _seal(self)

    def __hash__(self):
        return self._h

    def __eq__(self, other):
        return _term_eq(self, other)


# ---------------------------------------------------------------------------
# Global types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GComm(_Term):
    """Communication from sender to receiver, one continuation per label."""

    sender: str
    receiver: str
    branches: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", _freeze_branches(self.branches))
        _seal(self)


@dataclass(frozen=True, eq=False)
class GSeq(_Term):
    first: "GlobalType"
    second: "GlobalType"


@dataclass(frozen=True, eq=False)
class GPar(_Term):
    left: "GlobalType"
    right: "GlobalType"


@dataclass(frozen=True, eq=False)
class GChoice(_Term):
    """Relaxed branching between two alternatives."""

    left: "GlobalType"
    right: "GlobalType"


@dataclass(frozen=True, eq=False)
class GRec(_Term):
    var: str
    body: "GlobalType"


@dataclass(frozen=True, eq=False)
class GVar(_Term):
    var: str


@dataclass(frozen=True, eq=False)
class GStar(_Term):
    """Zero or more sequential repetitions of the body."""

    body: "GlobalType"


@dataclass(frozen=True, eq=False)
class GSkip(_Term):
    pass


GlobalType = Union[GComm, GSeq, GPar, GChoice, GRec, GVar, GStar, GSkip]


# ---------------------------------------------------------------------------
# Local types
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LSend(_Term):
    """subject sends one of the branch labels to peer."""

    subject: str
    peer: str
    branches: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", _freeze_branches(self.branches))
        _seal(self)


@dataclass(frozen=True, eq=False)
class LRecv(_Term):
    """subject receives one of the branch labels from peer."""

    subject: str
    peer: str
    branches: tuple

    def __post_init__(self):
        object.__setattr__(self, "branches", _freeze_branches(self.branches))
        _seal(self)


@dataclass(frozen=True, eq=False)
class LSeq(_Term):
    first: "LocalType"
    second: "LocalType"


@dataclass(frozen=True, eq=False)
class LPar(_Term):
    left: "LocalType"
    right: "LocalType"


@dataclass(frozen=True, eq=False)
class LChoice(_Term):
    left: "LocalType"
    right: "LocalType"


@dataclass(frozen=True, eq=False)
class LRec(_Term):
    var: str
    body: "LocalType"


@dataclass(frozen=True, eq=False)
class LVar(_Term):
    var: str


@dataclass(frozen=True, eq=False)
class LStar(_Term):
    body: "LocalType"


@dataclass(frozen=True, eq=False)
class LSkip(_Term):
    pass


LocalType = Union[LSend, LRecv, LSeq, LPar, LChoice, LRec, LVar, LStar, LSkip]

SKIP = GSkip()
LSKIP = LSkip()


class UnboundVariableError(Exception):
    """A recursion variable occurs without an enclosing binder."""

    def __init__(self, var: str):
        super().__init__(f"unbound recursion variable [{var}]")
        self.var = var


def _children(t):
    if isinstance(t, (GComm, LSend, LRecv)):
        return [g for _, g in t.branches]
    if isinstance(t, (GSeq, LSeq)):
        return [t.first, t.second]
    if isinstance(t, (GPar, GChoice, LPar, LChoice)):
        return [t.left, t.right]
    if isinstance(t, (GRec, GStar, LRec, LStar)):
        return [t.body]
    return []


def participants(g: GlobalType) -> frozenset:
    """All participants occurring as sender or receiver anywhere in g."""
    out = set()
    stack = [g]
    while stack:
        t = stack.pop()
        if isinstance(t, GComm):
            out.add(t.sender)
            out.add(t.receiver)
        stack.extend(_children(t))
    return frozenset(out)


def participants_local(l: LocalType) -> frozenset:
    """All participants named by actions in l (subjects and peers)."""
    out = set()
    stack = [l]
    while stack:
        t = stack.pop()
        if isinstance(t, (LSend, LRecv)):
            out.add(t.subject)
            out.add(t.peer)
        stack.extend(_children(t))
    return frozenset(out)


def subjects(l: LocalType) -> frozenset:
    """The owning participants of the actions in l (one, for sound locals)."""
    out = set()
    stack = [l]
    while stack:
        t = stack.pop()
        if isinstance(t, (LSend, LRecv)):
            out.add(t.subject)
        stack.extend(_children(t))
    return frozenset(out)


def comm(g: GlobalType) -> frozenset:
    """The set of communication triples of g, one per branch label."""
    out = set()
    stack = [g]
    while stack:
        t = stack.pop()
        if isinstance(t, GComm):
            for label, _ in t.branches:
                out.add(CommTriple(t.sender, t.receiver, label))
        stack.extend(_children(t))
    return frozenset(out)


def free_vars(t) -> frozenset:
    """Recursion variables of t not bound by an enclosing binder."""
    out = set()
    stack = [(t, frozenset())]
    while stack:
        node, bound = stack.pop()
        if isinstance(node, (GVar, LVar)):
            if node.var not in bound:
                out.add(node.var)
        elif isinstance(node, (GRec, LRec)):
            stack.append((node.body, bound | {node.var}))
        else:
            for child in _children(node):
                stack.append((child, bound))
    return frozenset(out)


def structure_key(t) -> str:
    """Stable textual identity of a term, independent of hash seeds.

    Not meant for humans (see the printers); built iteratively so it works
    on configurations grown arbitrarily deep by long executions.
    """
    parts = []
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, str):
            parts.append(node)
            continue
        scalars, kids = _parts(node)
        parts.append(f"{type(node).__name__}{scalars!r}<")
        stack.append(">")
        stack.extend(reversed(kids))
    return "".join(parts)


def terminable(t) -> bool:
    """Whether t may be considered completed without acting.

    Total on all terms: recursion variables count as not terminable, a star
    always is (zero iterations), a choice needs one terminable side.
    Works uniformly on global and local types.
    """
    if isinstance(t, (GSkip, LSkip, GStar, LStar)):
        return True
    if isinstance(t, (GComm, LSend, LRecv, GVar, LVar)):
        return False
    if isinstance(t, (GSeq, LSeq)):
        return terminable(t.first) and terminable(t.second)
    if isinstance(t, (GPar, LPar)):
        return terminable(t.left) and terminable(t.right)
    if isinstance(t, (GChoice, LChoice)):
        return terminable(t.left) or terminable(t.right)
    if isinstance(t, (GRec, LRec)):
        return terminable(t.body)
    raise TypeError(f"not a protocol term: {t!r}")


def terminated(l: LocalType) -> bool:
    """terminable on a closed local type; raises on unbound variables."""
    free = free_vars(l)
    if free:
        raise UnboundVariableError(sorted(free)[0])
    return terminable(l)


def seq_local(a: LocalType, b: LocalType) -> LocalType:
    """Sequence two locals, dropping skip units."""
    if isinstance(a, LSkip):
        return b
    if isinstance(b, LSkip):
        return a
    return LSeq(a, b)


def par_local(a: LocalType, b: LocalType) -> LocalType:
    """Compose two locals in parallel, dropping skip units."""
    if isinstance(a, LSkip):
        return b
    if isinstance(b, LSkip):
        return a
    return LPar(a, b)


def seq_global(a: GlobalType, b: GlobalType) -> GlobalType:
    if isinstance(a, GSkip):
        return b
    if isinstance(b, GSkip):
        return a
    return GSeq(a, b)


# Tagged-dict encoding used by the bridge's state tokens.

_G_TAGS = {
    GComm: "comm", GSeq: "seq", GPar: "par", GChoice: "choice",
    GRec: "rec", GVar: "var", GStar: "star", GSkip: "skip",
}
_L_TAGS = {
    LSend: "send", LRecv: "recv", LSeq: "seq", LPar: "par", LChoice: "choice",
    LRec: "rec", LVar: "var", LStar: "star", LSkip: "skip",
}


def local_to_obj(l: LocalType):
    """Encode a local type as JSON-compatible tagged dicts."""
    if isinstance(l, (LSend, LRecv)):
        return {
            "t": _L_TAGS[type(l)],
            "subject": l.subject,
            "peer": l.peer,
            "branches": [[t, local_to_obj(g)] for t, g in l.branches],
        }
    if isinstance(l, LSeq):
        return {"t": "seq", "first": local_to_obj(l.first), "second": local_to_obj(l.second)}
    if isinstance(l, (LPar, LChoice)):
        return {"t": _L_TAGS[type(l)], "left": local_to_obj(l.left), "right": local_to_obj(l.right)}
    if isinstance(l, LRec):
        return {"t": "rec", "var": l.var, "body": local_to_obj(l.body)}
    if isinstance(l, LVar):
        return {"t": "var", "var": l.var}
    if isinstance(l, LStar):
        return {"t": "star", "body": local_to_obj(l.body)}
    if isinstance(l, LSkip):
        return {"t": "skip"}
    raise TypeError(f"not a local type: {l!r}")


def local_from_obj(obj) -> LocalType:
    """Inverse of local_to_obj."""
    tag = obj["t"]
    if tag in ("send", "recv"):
        branches = tuple((t, local_from_obj(g)) for t, g in obj["branches"])
        cls = LSend if tag == "send" else LRecv
        return cls(obj["subject"], obj["peer"], branches)
    if tag == "seq":
        return LSeq(local_from_obj(obj["first"]), local_from_obj(obj["second"]))
    if tag == "par":
        return LPar(local_from_obj(obj["left"]), local_from_obj(obj["right"]))
    if tag == "choice":
        return LChoice(local_from_obj(obj["left"]), local_from_obj(obj["right"]))
    if tag == "rec":
        return LRec(obj["var"], local_from_obj(obj["body"]))
    if tag == "var":
        return LVar(obj["var"])
    if tag == "star":
        return LStar(local_from_obj(obj["body"]))
    if tag == "skip":
        return LSKIP
    raise ValueError(f"unknown local type tag: {tag!r}")
