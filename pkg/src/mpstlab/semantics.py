"""Operational semantics of local-type compositions.

A configuration pairs one local type per participant with a pending-message
store whose shape depends on the communication model: none (synchronous),
per-pair FIFO queues (ordered asynchronous), or a multiset (unordered
asynchronous).  Recursion unfolds through a per-participant environment of
fixed points; after every step the active spine of a local is resolved and
the environment garbage-collected, so tail-recursive protocols revisit
earlier configurations instead of growing forever.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .config import CommModel, SemanticsConfig
from .parser import print_local
from .terms import (
    CommTriple, LChoice, LPar, LRec, LRecv, LSend, LSeq, LSkip, LStar, LVar,
    LocalType, LSKIP, UnboundVariableError, free_vars, par_local, seq_local,
    structure_key,
)


class NotEnabledError(Exception):
    """The requested action is not enabled at this configuration."""


class NondeterministicLabelError(Exception):
    """One printed action label leads to several distinct successors."""




@dataclass(frozen=True)
class ActionLabel:
    kind: str  # "sync" | "send" | "recv"
    sender: str
    receiver: str
    label: str

    def __str__(self) -> str:
        if self.kind == "sync":
            return f"{self.sender}→{self.receiver}:{self.label}"
        mark = "!" if self.kind == "send" else "?"
        return f"{self.sender}{self.receiver}{mark}{self.label}"


# ---------------------------------------------------------------------------
# Pending-message stores
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyncBuffer:
    """Lock-step communication keeps nothing in flight."""

    def is_empty(self) -> bool:
        return True

    def to_json(self) -> dict:
        return {"model": "sync"}


@dataclass(frozen=True)
class FifoBuffer:
    """One unbounded FIFO queue per (sender, receiver) pair; empty queues vanish."""

    queues: tuple = ()

    def _as_dict(self):
        return dict(self.queues)

    def push(self, sender: str, receiver: str, label: str) -> "FifoBuffer":
        queues = self._as_dict()
        key = (sender, receiver)
        queues[key] = queues.get(key, ()) + (label,)
        return FifoBuffer(tuple(sorted(queues.items())))

    def head(self, sender: str, receiver: str):
        queue = self._as_dict().get((sender, receiver), ())
        return queue[0] if queue else None

    def pop(self, sender: str, receiver: str) -> "FifoBuffer":
        queues = self._as_dict()
        key = (sender, receiver)
        rest = queues[key][1:]
        if rest:
            queues[key] = rest
        else:
            del queues[key]
        return FifoBuffer(tuple(sorted(queues.items())))

    def is_empty(self) -> bool:
        return not self.queues

    def to_json(self) -> dict:
        return {
            "model": "orderedAsync",
            "queues": [
                {"from": p, "to": q, "labels": list(labels)}
                for (p, q), labels in self.queues
            ],
        }


@dataclass(frozen=True)
class BagBuffer:
    """Multiset of in-flight (sender, receiver, label) triples."""

    messages: tuple = ()

    def _as_dict(self):
        return dict(self.messages)

    def add(self, triple: CommTriple) -> "BagBuffer":
        bag = self._as_dict()
        bag[triple] = bag.get(triple, 0) + 1
        return BagBuffer(tuple(sorted(bag.items())))

    def count(self, triple: CommTriple) -> int:
        return self._as_dict().get(triple, 0)

    def remove(self, triple: CommTriple) -> "BagBuffer":
        bag = self._as_dict()
        if bag[triple] > 1:
            bag[triple] -= 1
        else:
            del bag[triple]
        return BagBuffer(tuple(sorted(bag.items())))

    def is_empty(self) -> bool:
        return not self.messages

    def to_json(self) -> dict:
        return {
            "model": "unorderedAsync",
            "messages": [
                {"from": t.sender, "to": t.receiver, "label": t.label, "count": n}
                for t, n in self.messages
            ],
        }


def empty_buffer(model: CommModel):
    if model is CommModel.SYNC:
        return SyncBuffer()
    if model is CommModel.ORDERED:
        return FifoBuffer()
    return BagBuffer()


# ---------------------------------------------------------------------------
# Configurations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    """Session locals, pending store, and recursion environments."""

    session: tuple  # sorted ((participant, LocalType), ...)
    buffer: object
    envs: tuple = ()  # sorted ((participant, ((var, LocalType), ...)), ...), nonempty only

    @staticmethod
    def make(locals_: dict, buffer, envs: dict | None = None) -> "Configuration":
        envs = envs or {}
        frozen_envs = tuple(
            (p, tuple(sorted(env.items())))
            for p, env in sorted(envs.items())
            if env
        )
        return Configuration(tuple(sorted(locals_.items())), buffer, frozen_envs)

    def locals_dict(self) -> dict:
        return dict(self.session)

    def envs_dict(self) -> dict:
        return {p: dict(bindings) for p, bindings in self.envs}

    def env_of(self, participant: str) -> dict:
        for p, bindings in self.envs:
            if p == participant:
                return dict(bindings)
        return {}

    def sort_key(self) -> str:
        """Stable textual identity, independent of hash seeds."""
        locals_text = "; ".join(f"{p}: {structure_key(l)}" for p, l in self.session)
        envs_text = "; ".join(
            f"{p}[" + ", ".join(f"{v}={structure_key(l)}" for v, l in bindings) + "]"
            for p, bindings in self.envs
        )
        return f"{locals_text} | {self.buffer!r} | {envs_text}"


def _resolve_spine(l: LocalType, env: dict) -> LocalType:
    """Resolve recursion variables in active positions, drop skip units, and
    right-associate sequence chains.

    The loop shape matters: configurations grown by long runs nest far deeper
    than the interpreter recursion limit, so only structure-bounded descents
    (parallel and choice children, one sequence head) may recurse.
    """
    seen = set()
    while True:
        if isinstance(l, LVar):
            if l.var in seen or l.var not in env:
                raise UnboundVariableError(l.var)
            seen.add(l.var)
            l = env[l.var]
            continue
        if isinstance(l, LSeq):
            while isinstance(l.first, LSeq):
                l = LSeq(l.first.first, LSeq(l.first.second, l.second))
            first = _resolve_spine(l.first, env)
            if isinstance(first, LSkip):
                l = l.second
                continue
            return l if first is l.first else LSeq(first, l.second)
        if isinstance(l, LPar):
            # recursion under parallel grows the right spine; walk it flat
            parts = []
            node = l
            while isinstance(node, LPar):
                parts.append(_resolve_spine(node.left, env))
                node = node.right
            parts.append(_resolve_spine(node, env))
            out = parts.pop()
            while parts:
                out = par_local(parts.pop(), out)
            return out
        if isinstance(l, LChoice):
            left = _resolve_spine(l.left, env)
            right = _resolve_spine(l.right, env)
            if isinstance(left, LSkip) and isinstance(right, LSkip):
                return LSKIP
            return LChoice(left, right)
        return l


def canon_state(l: LocalType, env: dict):
    """Canonical (local, environment) pair: spine resolved, bindings trimmed
    to the variables the local (transitively) still mentions."""
    resolved = _resolve_spine(l, env)
    needed = set(free_vars(resolved))
    work = list(needed)
    while work:
        var = work.pop()
        if var not in env:
            raise UnboundVariableError(var)
        for other in free_vars(env[var]):
            if other not in needed:
                needed.add(other)
                work.append(other)
    return resolved, {v: env[v] for v in needed}


def terminable_env(l: LocalType, env: dict, _active: frozenset = frozenset()) -> bool:
    """terminable, unfolding recursion variables through the environment.

    Sequence chains are walked iteratively; they are the one shape that can
    outgrow the recursion limit at runtime.
    """
    while True:
        if isinstance(l, LVar):
            if l.var in _active:
                return False
            if l.var not in env:
                raise UnboundVariableError(l.var)
            _active = _active | {l.var}
            l = env[l.var]
            continue
        if isinstance(l, (LSkip, LStar)):
            return True
        if isinstance(l, (LSend, LRecv)):
            return False
        if isinstance(l, LSeq):
            if not terminable_env(l.first, env, _active):
                return False
            l = l.second
            continue
        if isinstance(l, LPar):
            if not terminable_env(l.left, env, _active):
                return False
            l = l.right
            continue
        if isinstance(l, LChoice):
            if terminable_env(l.left, env, _active):
                return True
            l = l.right
            continue
        if isinstance(l, LRec):
            _active = _active | {l.var}
            l = l.body
            continue
        raise TypeError(f"not a local type: {l!r}")


# ---------------------------------------------------------------------------
# Intents: the sends and receives one participant offers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Intent:
    polarity: str  # "!" | "?"
    sender: str
    receiver: str
    label: str
    continuation: LocalType
    env: tuple  # frozen ((var, LocalType), ...)

    def env_dict(self) -> dict:
        return dict(self.env)


def _freeze_env(env: dict) -> tuple:
    return tuple(sorted(env.items()))


def enabled_local(l: LocalType, env: dict) -> list:
    """All first actions l offers under env, with their continuations.

    Sequencing is strict (the second component acts only once the first is
    terminable), a choice is resolved by whichever action fires first, and a
    star unfolds one iteration at a time.

    Traversal is an explicit work stack: recursion under parallel or
    sequence grows configurations deeper than the interpreter stack.
    Intents are the least fixpoint, so a recursion variable re-entered
    without crossing an action contributes nothing; a participant whose
    view of a loop is guarded only by communications it never sees is
    simply stuck, which is also how the global type behaves.
    """
    intents = []
    # (node, env, continuation wrappers innermost-first, vars being expanded)
    stack = [(l, env, (), frozenset())]
    while stack:
        node, env_, frames, expanding = stack.pop()
        if isinstance(node, LSkip):
            continue
        if isinstance(node, (LSend, LRecv)):
            frozen = _freeze_env(env_)
            for label, cont in node.branches:
                rebuilt = cont
                for frame in frames:
                    rebuilt = frame(rebuilt)
                if isinstance(node, LSend):
                    intents.append(Intent("!", node.subject, node.peer, label, rebuilt, frozen))
                else:
                    intents.append(Intent("?", node.peer, node.subject, label, rebuilt, frozen))
            continue
        if isinstance(node, LSeq):
            chain = node
            while isinstance(chain, LSeq):
                head, tail = chain.first, chain.second
                wrap = (lambda c, t=tail: seq_local(c, t),) + frames
                stack.append((head, env_, wrap, expanding))
                if not terminable_env(head, env_):
                    break
                chain = tail
            else:
                stack.append((chain, env_, frames, expanding))
            continue
        if isinstance(node, LPar):
            left, right = node.left, node.right
            stack.append((left, env_, (lambda c, r=right: par_local(c, r),) + frames, expanding))
            stack.append((right, env_, (lambda c, s=left: par_local(s, c),) + frames, expanding))
            continue
        if isinstance(node, LChoice):
            stack.append((node.left, env_, frames, expanding))
            stack.append((node.right, env_, frames, expanding))
            continue
        if isinstance(node, LStar):
            wrap = (lambda c, s=node: seq_local(c, s),) + frames
            stack.append((node.body, env_, wrap, expanding))
            continue
        if isinstance(node, LRec):
            if node.var in expanding:
                continue  # cyclic re-entry offers nothing
            inner = dict(env_)
            inner[node.var] = node
            stack.append((node.body, inner, frames, expanding | {node.var}))
            continue
        if isinstance(node, LVar):
            if node.var in expanding:
                continue
            if node.var not in env_:
                raise UnboundVariableError(node.var)
            stack.append((env_[node.var], env_, frames, expanding))
            continue
        raise TypeError(f"not a local type: {node!r}")
    return intents


# ---------------------------------------------------------------------------
# Configuration-level semantics
# ---------------------------------------------------------------------------


def initial(locals_: dict, cfg: SemanticsConfig) -> Configuration:
    """Start state: given locals, empty store, empty environments."""
    canonical = {}
    for p, l in locals_.items():
        resolved, env = canon_state(l, {})
        canonical[p] = resolved
        assert not env
    return Configuration.make(canonical, empty_buffer(cfg.comm_model))


def _apply(state: Configuration, moves: dict, buffer) -> Configuration:
    """Successor with the given per-participant (continuation, env) moves."""
    locals_ = state.locals_dict()
    envs = state.envs_dict()
    for p, (cont, env) in moves.items():
        resolved, trimmed = canon_state(cont, env)
        locals_[p] = resolved
        envs[p] = trimmed
    return Configuration.make(locals_, buffer, envs)


def enabled(state: Configuration, cfg: SemanticsConfig) -> list:
    """All (ActionLabel, successor) pairs, deterministically ordered."""
    model = cfg.comm_model
    offers = {p: enabled_local(l, state.env_of(p)) for p, l in state.session}
    out = []

    if model is CommModel.SYNC:
        for p, intents in offers.items():
            for send in intents:
                if send.polarity != "!":
                    continue
                q = send.receiver
                for recv in offers.get(q, []):
                    if recv.polarity == "?" and (recv.sender, recv.label) == (p, send.label):
                        label = ActionLabel("sync", p, q, send.label)
                        succ = _apply(state, {
                            p: (send.continuation, send.env_dict()),
                            q: (recv.continuation, recv.env_dict()),
                        }, state.buffer)
                        out.append((label, succ))
    elif model is CommModel.ORDERED:
        for p, intents in offers.items():
            for intent in intents:
                if intent.polarity == "!":
                    label = ActionLabel("send", intent.sender, intent.receiver, intent.label)
                    buffer = state.buffer.push(intent.sender, intent.receiver, intent.label)
                    out.append((label, _apply(
                        state, {p: (intent.continuation, intent.env_dict())}, buffer)))
                else:
                    if state.buffer.head(intent.sender, intent.receiver) != intent.label:
                        continue
                    label = ActionLabel("recv", intent.sender, intent.receiver, intent.label)
                    buffer = state.buffer.pop(intent.sender, intent.receiver)
                    out.append((label, _apply(
                        state, {p: (intent.continuation, intent.env_dict())}, buffer)))
    else:
        for p, intents in offers.items():
            for intent in intents:
                triple = CommTriple(intent.sender, intent.receiver, intent.label)
                if intent.polarity == "!":
                    label = ActionLabel("send", *triple)
                    buffer = state.buffer.add(triple)
                else:
                    if state.buffer.count(triple) == 0:
                        continue
                    label = ActionLabel("recv", *triple)
                    buffer = state.buffer.remove(triple)
                out.append((label, _apply(
                    state, {p: (intent.continuation, intent.env_dict())}, buffer)))

    unique = sorted(set(out), key=lambda e: (str(e[0]), e[1].sort_key()))
    return unique


def ambiguous_labels(transitions) -> list:
    """Printed labels offered with more than one distinct successor."""
    by_label = {}
    for label, succ in transitions:
        by_label.setdefault(str(label), set()).add(succ)
    return sorted(text for text, succs in by_label.items() if len(succs) > 1)


def step(state: Configuration, label, cfg: SemanticsConfig) -> Configuration:
    """Apply one action by its label; the successor must be unique."""
    wanted = str(label)
    matches = [succ for lab, succ in enabled(state, cfg) if str(lab) == wanted]
    if not matches:
        raise NotEnabledError(f"action {wanted!r} is not enabled here")
    if len(set(matches)) > 1:
        raise NondeterministicLabelError(
            f"action {wanted!r} has {len(set(matches))} distinct successors")
    return matches[0]


def terminal_kind(state: Configuration, cfg: SemanticsConfig):
    """None while actions remain; otherwise "clean" (all locals terminable,
    empty store) or "stuck"."""
    if enabled(state, cfg):
        return None
    done = all(terminable_env(l, state.env_of(p)) for p, l in state.session)
    return "clean" if done and state.buffer.is_empty() else "stuck"


# ---------------------------------------------------------------------------
# State-space exploration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lts:
    """Explored transition system; state 0 is initial."""

    states: tuple
    edges: tuple  # (from_index, ActionLabel, to_index)
    truncated: bool
    incomplete: frozenset = frozenset()  # states whose successors were cut off
    diagnostics: tuple = ()  # (state_index, printed label) nondeterminism reports


def build_lts(locals_: dict, cfg: SemanticsConfig) -> Lts:
    """Breadth-first closure of enabled moves, deduplicating configurations.

    Exploration stops adding states at cfg.exploration_max_states; edges
    among already-discovered states are still recorded, and states that lost
    successors are marked incomplete.
    """
    start = initial(locals_, cfg)
    states = [start]
    index = {start: 0}
    edges = []
    incomplete = set()
    diagnostics = []
    truncated = False
    queue = deque([0])
    while queue:
        i = queue.popleft()
        transitions = enabled(states[i], cfg)
        for text in ambiguous_labels(transitions):
            diagnostics.append((i, text))
        for label, succ in transitions:
            j = index.get(succ)
            if j is None:
                if len(states) >= cfg.exploration_max_states:
                    truncated = True
                    incomplete.add(i)
                    continue
                j = len(states)
                index[succ] = j
                states.append(succ)
                queue.append(j)
            edges.append((i, label, j))
    return Lts(tuple(states), tuple(edges), truncated,
               frozenset(incomplete), tuple(diagnostics))
