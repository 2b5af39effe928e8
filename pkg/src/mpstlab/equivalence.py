"""Behavioural comparison of two explored transition systems.

The verdict engine is a signature-based partition refinement for branching
bisimulation over the disjoint union of both systems; with no internal
labels configured (the default) it coincides with strong bisimulation.
Labels are compared by their exact printed form, so systems built under
different communication models differ honestly at the first label.

Exact answers are only claimed for fully explored systems; when either side
was truncated the comparison degrades to a depth-bounded product search that
may return an inconclusive verdict.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .semantics import Lts


@dataclass(frozen=True)
class TauPolicy:
    """Printed labels treated as internal moves; empty means all visible."""

    tau_labels: frozenset = frozenset()

    def is_tau(self, label_text: str) -> bool:
        return label_text in self.tau_labels


@dataclass(frozen=True)
class Evidence:
    """A trace accepted by one side whose last label the other side refuses."""

    side: str  # "a" | "b"
    path: tuple


@dataclass(frozen=True)
class BisimVerdict:
    result: str  # "bisimilar" | "notBisimilar" | "inconclusiveDepthBound"
    depth_used: int
    evidence: Evidence | None = None
    relation: tuple = ()
    note: str | None = None

    def to_json(self) -> dict:
        return {
            "result": self.result,
            "depthUsed": self.depth_used,
            "evidence": list(self.evidence.path) if self.evidence else None,
            "evidenceSide": self.evidence.side if self.evidence else None,
            "note": self.note,
        }


def _adjacency(lts: Lts) -> dict:
    adj = {i: [] for i in range(len(lts.states))}
    for src, label, dst in lts.edges:
        adj[src].append((str(label), dst))
    for i in adj:
        adj[i].sort()
    return adj


def _labels(lts: Lts) -> frozenset:
    return frozenset(str(label) for _, label, _ in lts.edges)


def _refine(a: Lts, b: Lts, tau: TauPolicy):
    """Coarsest branching-bisimulation partition of the disjoint union.

    Returns (block of each state, refinement rounds).  States are keyed
    (side, index).
    """
    adj = {}
    for side, lts in (("a", a), ("b", b)):
        for i, targets in _adjacency(lts).items():
            adj[(side, i)] = [(label, (side, j)) for label, j in targets]
    states = sorted(adj)
    block = {s: 0 for s in states}

    def tau_block_closure(s):
        # States reachable from s by internal moves that stay in s's block.
        home = block[s]
        seen = {s}
        queue = deque([s])
        while queue:
            cur = queue.popleft()
            for label, nxt in adj[cur]:
                if tau.is_tau(label) and block[nxt] == home and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return seen

    def signature(s):
        sig = set()
        for stage in tau_block_closure(s):
            for label, nxt in adj[stage]:
                if tau.is_tau(label) and block[nxt] == block[s]:
                    continue  # inert internal move
                sig.add((label, block[nxt]))
        return frozenset(sig)

    rounds = 0
    while True:
        rounds += 1
        keys = {s: (block[s], tuple(sorted(signature(s)))) for s in states}
        fresh = {}
        new_block = {}
        for s in states:  # deterministic renumbering in state order
            key = keys[s]
            if key not in fresh:
                fresh[key] = len(fresh)
            new_block[s] = fresh[key]
        if new_block == block:
            return block, rounds
        block = new_block


def _trace_frontiers(lts: Lts, max_len: int) -> dict:
    """Map each trace (tuple of labels, length <= max_len) to the reachable
    state set; prefix-closed."""
    adj = _adjacency(lts)
    frontier = {(): frozenset({0})}
    result = dict(frontier)
    for _ in range(max_len):
        nxt = {}
        for trace, states in frontier.items():
            moves = {}
            for s in states:
                for label, t in adj[s]:
                    moves.setdefault(label, set()).add(t)
            for label, targets in moves.items():
                nxt[trace + (label,)] = frozenset(targets)
        if not nxt:
            break
        result.update(nxt)
        frontier = nxt
    return result


def _divergence_search(a: Lts, b: Lts, depth: int, require_complete: bool):
    """Shortest trace enabled on exactly one side, by product subset search.

    Returns (evidence, layers_explored, sound).  With require_complete the
    divergence only counts when every contributing state is fully explored.
    """
    adj_a, adj_b = _adjacency(a), _adjacency(b)
    start = (frozenset({0}), frozenset({0}))
    seen = {start}
    frontier = [(start, ())]
    layers = 0
    saw_unsound = False
    for layers in range(1, depth + 1):
        nxt = []
        for (set_a, set_b), trace in frontier:
            moves_a, moves_b = {}, {}
            for s in set_a:
                for label, t in adj_a[s]:
                    moves_a.setdefault(label, set()).add(t)
            for s in set_b:
                for label, t in adj_b[s]:
                    moves_b.setdefault(label, set()).add(t)
            candidates = sorted(
                [(label, "a") for label in set(moves_a) - set(moves_b)]
                + [(label, "b") for label in set(moves_b) - set(moves_a)]
            )
            if candidates:
                complete = (
                    all(i not in a.incomplete for i in set_a)
                    and all(j not in b.incomplete for j in set_b)
                )
                if complete or not require_complete:
                    label, side = candidates[0]
                    return Evidence(side, trace + (label,)), layers, True
                saw_unsound = True
                continue
            for label in sorted(set(moves_a) & set(moves_b)):
                pair = (frozenset(moves_a[label]), frozenset(moves_b[label]))
                if pair not in seen:
                    seen.add(pair)
                    nxt.append((pair, trace + (label,)))
        if not nxt:
            break
        frontier = nxt
    return None, layers, not saw_unsound


def verify_evidence(a: Lts, b: Lts, evidence: Evidence) -> bool:
    """Replay the evidence: accepted on the claimed side, last label refused
    by the other after every way of following the prefix."""
    claimed, other = (a, b) if evidence.side == "a" else (b, a)
    adj_c, adj_o = _adjacency(claimed), _adjacency(other)

    def follow(adj, trace):
        states = {0}
        for label in trace:
            states = {t for s in states for lab, t in adj[s] if lab == label}
            if not states:
                return None
        return states

    if follow(adj_c, evidence.path) is None:
        return False
    prefix = follow(adj_o, evidence.path[:-1])
    if prefix is None:
        return True  # refused even earlier
    last = evidence.path[-1]
    return all(all(lab != last for lab, _ in adj_o[s]) for s in prefix)


def branching_bisim(a: Lts, b: Lts, depth: int = 100,
                    tau: TauPolicy | None = None) -> BisimVerdict:
    """Compare two systems up to branching bisimulation.

    Fully explored systems get an exact verdict by partition refinement;
    truncated ones a depth-bounded search that may be inconclusive.  A
    notBisimilar verdict carries replay-checked evidence whenever a single
    distinguishing trace exists.
    """
    tau = tau or TauPolicy()
    notes = []
    alph_a, alph_b = _labels(a), _labels(b)
    if alph_a and alph_b and not (alph_a & alph_b):
        notes.append("label alphabets differ")

    if a == b:
        # Identical systems are bisimilar by the identity relation, even if
        # their exploration was truncated.
        relation = tuple((i, i) for i in range(len(a.states)))
        return BisimVerdict("bisimilar", 0, relation=relation,
                            note="; ".join(notes) or None)

    if a.truncated or b.truncated:
        notes.append("state-space exploration was truncated")
        evidence, layers, _ = _divergence_search(a, b, depth, require_complete=True)
        if evidence is not None and verify_evidence(a, b, evidence):
            return BisimVerdict("notBisimilar", layers, evidence,
                                note="; ".join(notes) or None)
        return BisimVerdict("inconclusiveDepthBound", min(depth, layers),
                            note="; ".join(notes) or None)

    block, rounds = _refine(a, b, tau)
    if block[("a", 0)] == block[("b", 0)]:
        relation = tuple(
            (i, j)
            for i in range(len(a.states))
            for j in range(len(b.states))
            if block[("a", i)] == block[("b", j)]
        )
        return BisimVerdict("bisimilar", rounds, relation=relation,
                            note="; ".join(notes) or None)

    # Shortest divergences visit distinct subset pairs, so the product size
    # bounds the search depth needed for an exhaustive answer.
    exhaustive = max(depth, len(a.states) * len(b.states) + 1)
    evidence, _, _ = _divergence_search(a, b, exhaustive, require_complete=False)
    if evidence is not None and not verify_evidence(a, b, evidence):
        evidence = None
    if evidence is None:
        notes.append("systems differ only in branching structure; no single "
                     "distinguishing trace exists")
    return BisimVerdict("notBisimilar", rounds, evidence,
                        note="; ".join(notes) or None)


def bounded_traces(lts: Lts, max_len: int) -> set:
    """All label sequences of length <= max_len along paths from the start."""
    return set(_trace_frontiers(lts, max_len))


def trace_diff(a: Lts, b: Lts, max_len: int, cap: int = 20) -> list:
    """Traces of bounded length accepted by exactly one side.

    Sorted lexicographically and capped; each entry names the accepting side.
    """
    traces_a = bounded_traces(a, max_len)
    traces_b = bounded_traces(b, max_len)
    diff = [("a", t) for t in traces_a - traces_b]
    diff += [("b", t) for t in traces_b - traces_a]
    diff.sort(key=lambda e: (e[1], e[0]))
    return [{"side": side, "trace": list(trace)} for side, trace in diff[:cap]]
