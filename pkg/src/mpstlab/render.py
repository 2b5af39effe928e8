"""Textual diagram generation: Mermaid sequence charts and DOT state graphs.

Output is plain text in ubiquitous formats so the core needs no drawing
library; rendering is deterministic (equal inputs give byte-equal output).
"""

from __future__ import annotations

from .parser import print_local
from .semantics import (
    ActionLabel, Configuration, Lts, canon_state, enabled_local, terminable_env,
)
from .terms import (
    GChoice, GComm, GPar, GRec, GSeq, GSkip, GStar, GVar, GlobalType,
    LocalType, structure_key,
)


def _msc_participants(g: GlobalType) -> list:
    """Participants in first-appearance order."""
    seen = []

    def visit(t):
        if isinstance(t, GComm):
            for name in (t.sender, t.receiver):
                if name not in seen:
                    seen.append(name)
            for _, c in t.branches:
                visit(c)
        elif isinstance(t, GSeq):
            visit(t.first)
            visit(t.second)
        elif isinstance(t, (GPar, GChoice)):
            visit(t.left)
            visit(t.right)
        elif isinstance(t, (GRec, GStar)):
            visit(t.body)

    visit(g)
    return seen


def render_msc(g: GlobalType) -> str:
    """Mermaid sequenceDiagram source for a global type.

    Branching communications and choices become alt blocks, parallel
    composition a par block, both recursion forms a loop block.
    """
    lines = ["sequenceDiagram"]
    for name in _msc_participants(g):
        lines.append(f"  participant {name}")

    def emit(t, indent):
        pad = "  " * indent
        if isinstance(t, GComm):
            if len(t.branches) == 1:
                label, cont = t.branches[0]
                lines.append(f"{pad}{t.sender}->>{t.receiver}: {label}")
                emit(cont, indent)
                return
            for i, (label, cont) in enumerate(t.branches):
                lines.append(f"{pad}{'alt' if i == 0 else 'else'} {label}")
                lines.append(f"{pad}  {t.sender}->>{t.receiver}: {label}")
                emit(cont, indent + 1)
            lines.append(f"{pad}end")
        elif isinstance(t, GSeq):
            emit(t.first, indent)
            emit(t.second, indent)
        elif isinstance(t, GPar):
            lines.append(f"{pad}par")
            emit(t.left, indent + 1)
            lines.append(f"{pad}and")
            emit(t.right, indent + 1)
            lines.append(f"{pad}end")
        elif isinstance(t, GChoice):
            lines.append(f"{pad}alt")
            emit(t.left, indent + 1)
            lines.append(f"{pad}else")
            emit(t.right, indent + 1)
            lines.append(f"{pad}end")
        elif isinstance(t, GRec):
            lines.append(f"{pad}loop {t.var}")
            emit(t.body, indent + 1)
            lines.append(f"{pad}end")
        elif isinstance(t, GStar):
            lines.append(f"{pad}loop repeat")
            emit(t.body, indent + 1)
            lines.append(f"{pad}end")
        # GVar and GSkip draw nothing; loops carry the repetition.

    emit(g, 1)
    return "\n".join(lines) + "\n"


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def render_local_fsm(owner: str, l: LocalType, max_states: int = 2000) -> str:
    """DOT digraph of one participant's behaviour.

    States are reachable (local, environment) pairs; edges carry send and
    receive labels.  Terminable states are double-circled; an exploration
    cut off at max_states gets a dashed overflow node.
    """
    def freeze(pair):
        local, env = pair
        return local, tuple(sorted(env.items()))

    start = freeze(canon_state(l, {}))
    states = [start]
    index = {start: 0}
    edges = []
    truncated_from = set()
    frontier = [0]
    while frontier:
        i = frontier.pop(0)
        local, env = states[i]
        moves = []
        for intent in enabled_local(local, dict(env)):
            kind = "send" if intent.polarity == "!" else "recv"
            label = ActionLabel(kind, intent.sender, intent.receiver, intent.label)
            succ = freeze(canon_state(intent.continuation, intent.env_dict()))
            moves.append((str(label), succ))
        for text, succ in sorted(moves, key=lambda m: (m[0], structure_key(m[1][0]))):
            j = index.get(succ)
            if j is None:
                if len(states) >= max_states:
                    truncated_from.add(i)
                    continue
                j = len(states)
                index[succ] = j
                states.append(succ)
                frontier.append(j)
            edges.append((i, text, j))

    lines = [f'digraph "{_dot_escape(owner)}" {{', "  rankdir=LR;"]
    lines.append('  __init [shape=point, label=""];')
    lines.append("  __init -> s0;")
    for i, (local, env) in enumerate(states):
        shape = "doublecircle" if terminable_env(local, dict(env)) else "circle"
        lines.append(f'  s{i} [shape={shape}, label="{_dot_escape(print_local(local))}"];')
    if truncated_from:
        lines.append('  __more [shape=circle, style=dashed, label="…"];')
    for i, text, j in edges:
        lines.append(f'  s{i} -> s{j} [label="{_dot_escape(text)}"];')
    for i in sorted(truncated_from):
        lines.append(f"  s{i} -> __more [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _is_clean(state: Configuration) -> bool:
    return state.buffer.is_empty() and all(
        terminable_env(local, state.env_of(p)) for p, local in state.session
    )


def render_compositional_fsm(lts: Lts) -> str:
    """DOT digraph of a full explored state space.

    Clean terminals are double-circled, stuck ones diamond-shaped; truncated
    explorations get a dashed overflow node.
    """
    has_out = {src for src, _, _ in lts.edges}
    lines = ["digraph lts {", "  rankdir=LR;"]
    lines.append('  __init [shape=point, label=""];')
    lines.append("  __init -> s0;")
    for i, state in enumerate(lts.states):
        if i in has_out or i in lts.incomplete:
            shape = "circle"
        else:
            shape = "doublecircle" if _is_clean(state) else "diamond"
        lines.append(f'  s{i} [shape={shape}, label="s{i}"];')
    if lts.truncated:
        lines.append('  __more [shape=circle, style=dashed, label="…"];')
    for src, label, dst in lts.edges:
        lines.append(f'  s{src} -> s{dst} [label="{_dot_escape(str(label))}"];')
    if lts.truncated:
        for i in sorted(lts.incomplete):
            lines.append(f"  s{i} -> __more [style=dashed];")
    lines.append("}")
    return "\n".join(lines) + "\n"
