"""Independent strong-bisimulation decider used as an oracle.

Naive greatest-fixpoint computation over explicit state pairs: start from
all pairs and delete any pair where one side has a move the other cannot
match into a surviving pair.  Quadratic and slow on purpose; shares nothing
with the package's signature-refinement implementation.
"""

from __future__ import annotations


def _adj(lts):
    out = {i: [] for i in range(len(lts.states))}
    for src, label, dst in lts.edges:
        out[src].append((str(label), dst))
    return out


def strong_bisimilar(a, b) -> bool:
    adj_a, adj_b = _adj(a), _adj(b)
    pairs = {(i, j) for i in adj_a for j in adj_b}

    def consistent(i, j):
        for label, target_a in adj_a[i]:
            if not any(lb == label and (target_a, target_b) in pairs
                       for lb, target_b in adj_b[j]):
                return False
        for label, target_b in adj_b[j]:
            if not any(lb == label and (target_a, target_b) in pairs
                       for lb, target_a in adj_a[i]):
                return False
        return True

    changed = True
    while changed:
        changed = False
        for pair in sorted(pairs):
            if pair in pairs and not consistent(*pair):
                pairs.discard(pair)
                changed = True
    return (0, 0) in pairs
