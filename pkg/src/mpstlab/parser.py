"""Textual protocol language: parser and pretty-printers.

Surface grammar (UTF-8, whitespace-insensitive, // line comments):

    G ::= p "->" q ":" label
        | p "->" q ":" "{" branch ("," branch)* "}"
        | G ";" G  |  G "||" G  |  G "+" G
        | "rec" X "." G  |  X
        | "(" G ")" "*"  |  "(" G ")"  |  "skip"
    branch ::= label (";" G)?

A branch without a body means skip.  Postfix "*" binds tightest, then ";",
then "||", then "+"; the binary operators are right-associative and "rec"
scopes to the longest following term.  Identifiers are [A-Za-z_][A-Za-z0-9_]*;
"skip" and "rec" are reserved.  Files may instead hold several named
protocols, one `example "<name>": <G>` each.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import (
    GChoice, GComm, GPar, GRec, GSeq, GSkip, GStar, GVar, GlobalType,
    LChoice, LPar, LRec, LSeq, LSkip, LStar, LVar, LSend, LRecv, LocalType,
    SKIP, subjects,
)

KEYWORDS = {"skip", "rec"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>//[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>->|\|\||[:;+*(){},.])
    """,
    re.VERBOSE,
)


class ParseError(Exception):
    """Lexical or syntactic violation, with a 1-based source position."""

    def __init__(self, line: int, column: int, message: str, expected=()):
        self.line = line
        self.column = column
        self.message = message
        self.expected = list(expected)
        where = f"line {line}, column {column}: {message}"
        if self.expected:
            where += " (expected " + " or ".join(self.expected) + ")"
        super().__init__(where)


@dataclass
class _Token:
    kind: str  # "ident" | "string" | "op" | "eof"
    text: str
    line: int
    column: int


def _tokenize(text: str):
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, value, line, m.start() - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, pos - line_start + 1))
    return tokens


@dataclass
class NamedProtocol:
    """One entry of a session file; name is None for bare single-protocol files."""

    name: str | None
    protocol: GlobalType


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.bound: list[str] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, message, expected=()):
        tok = self.peek()
        raise ParseError(tok.line, tok.column, message, expected)

    def expect_op(self, op: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            self.fail(f"found {tok.text!r}" if tok.kind != "eof" else "unexpected end of input", [repr(op)])
        return self.next()

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text == op

    def ident(self, what: str) -> str:
        tok = self.peek()
        if tok.kind != "ident" or tok.text in KEYWORDS:
            self.fail(f"found {tok.text!r}" if tok.kind != "eof" else "unexpected end of input", [what])
        return self.next().text

    # expression levels, loosest first

    def parse_choice(self) -> GlobalType:
        left = self.parse_par()
        if self.at_op("+"):
            self.next()
            return GChoice(left, self.parse_choice())
        return left

    def parse_par(self) -> GlobalType:
        left = self.parse_seq()
        if self.at_op("||"):
            self.next()
            return GPar(left, self.parse_par())
        return left

    def parse_seq(self) -> GlobalType:
        left = self.parse_postfix()
        if self.at_op(";"):
            self.next()
            return GSeq(left, self.parse_seq())
        return left

    def parse_postfix(self) -> GlobalType:
        term = self.parse_atom()
        while self.at_op("*"):
            self.next()
            term = GStar(term)
        return term

    def parse_atom(self) -> GlobalType:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "skip":
            self.next()
            return SKIP
        if tok.kind == "ident" and tok.text == "rec":
            self.next()
            var_tok = self.peek()
            var = self.ident("recursion variable")
            if var in self.bound:
                raise ParseError(var_tok.line, var_tok.column,
                                 f"recursion variable {var!r} shadows an enclosing binder")
            self.expect_op(".")
            self.bound.append(var)
            try:
                body = self.parse_choice()
            finally:
                self.bound.pop()
            return GRec(var, body)
        if self.at_op("("):
            self.next()
            inner = self.parse_choice()
            self.expect_op(")")
            return inner
        if tok.kind == "ident":
            name = self.next().text
            if self.at_op("->"):
                self.next()
                receiver = self.ident("participant")
                self.expect_op(":")
                return self.parse_comm_tail(name, receiver)
            return GVar(name)
        self.fail(
            f"found {tok.text!r}" if tok.kind != "eof" else "unexpected end of input",
            ["participant", "'skip'", "'rec'", "'('"],
        )

    def parse_comm_tail(self, sender: str, receiver: str) -> GlobalType:
        if self.at_op("{"):
            self.next()
            branches = [self.parse_branch()]
            while self.at_op(","):
                self.next()
                branches.append(self.parse_branch())
            self.expect_op("}")
            return GComm(sender, receiver, tuple(branches))
        label = self.ident("label")
        return GComm(sender, receiver, ((label, SKIP),))

    def parse_branch(self):
        label = self.ident("label")
        if self.at_op(";"):
            self.next()
            return (label, self.parse_choice())
        return (label, SKIP)

    def parse_protocol(self) -> GlobalType:
        g = self.parse_choice()
        tok = self.peek()
        if tok.kind != "eof":
            self.fail(f"trailing input {tok.text!r}")
        return g

    def parse_file(self) -> list[NamedProtocol]:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "example":
            entries = []
            seen = set()
            while self.peek().kind != "eof":
                head = self.peek()
                if head.kind != "ident" or head.text != "example":
                    self.fail(f"found {head.text!r}", ["'example'"])
                self.next()
                name_tok = self.peek()
                if name_tok.kind != "string":
                    self.fail("example name must be a quoted string", ['"name"'])
                name = self.next().text[1:-1]
                if not name:
                    raise ParseError(name_tok.line, name_tok.column, "example name is empty")
                if name in seen:
                    raise ParseError(name_tok.line, name_tok.column, f"duplicate example name {name!r}")
                seen.add(name)
                self.expect_op(":")
                entries.append(NamedProtocol(name, self.parse_choice()))
            return entries
        return [NamedProtocol(None, self.parse_protocol())]


def parse_global(src: str) -> GlobalType:
    """Parse a single protocol; raises ParseError on the first violation.

    Duplicate branch labels and self-communications parse fine here; the
    well-formedness checks report them.
    """
    return _Parser(src).parse_protocol()


def parse_session_file(src: str) -> list[NamedProtocol]:
    """Parse a .mpst file: either one bare protocol or named examples."""
    return _Parser(src).parse_file()


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

# Precedence: atoms 4, ";" 3, "||" 2, "+" 1 (always self-parenthesized),
# "rec" 0.  A term is wrapped when its level is below the context's.

_ATOM, _SEQ, _PAR, _CHOICE, _REC = 4, 3, 2, 1, 0


def _print_branches(branches, body):
    parts = []
    for label, cont in branches:
        if isinstance(cont, (GSkip, LSkip)):
            parts.append(label)
        else:
            parts.append(f"{label} ; {body(cont, 0)}")
    return "{" + ", ".join(parts) + "}"


def print_global(g: GlobalType) -> str:
    """Canonical text for g; re-parses to an equal term."""

    def go(t, level):
        if isinstance(t, GSkip):
            return "skip"
        if isinstance(t, GVar):
            return t.var
        if isinstance(t, GComm):
            head = f"{t.sender}->{t.receiver}:"
            if len(t.branches) == 1 and isinstance(t.branches[0][1], GSkip):
                return head + t.branches[0][0]
            return head + _print_branches(t.branches, go)
        if isinstance(t, GStar):
            return f"({go(t.body, 0)})*"
        if isinstance(t, GChoice):
            return f"({go(t.left, _CHOICE)} + {go(t.right, _CHOICE)})"
        if isinstance(t, GSeq):
            text = f"{go(t.first, _SEQ + 1)} ; {go(t.second, _SEQ)}"
            return text if level <= _SEQ else f"({text})"
        if isinstance(t, GPar):
            text = f"{go(t.left, _PAR + 1)} || {go(t.right, _PAR)}"
            return text if level <= _PAR else f"({text})"
        if isinstance(t, GRec):
            text = f"rec {t.var} . {go(t.body, 0)}"
            return text if level <= _REC else f"({text})"
        raise TypeError(f"not a global type: {t!r}")

    return go(g, 0)


def print_local(l: LocalType) -> str:
    """Deterministic text for a local type.

    Actions abbreviate to `peer!label` / `peer?label` when all actions share
    one owner; otherwise the explicit `subject!peer:label` form is used.
    """
    explicit = len(subjects(l)) > 1

    def action_head(t):
        mark = "!" if isinstance(t, LSend) else "?"
        if explicit:
            return f"{t.subject}{mark}{t.peer}:"
        return f"{t.peer}{mark}"

    def go(t, level):
        if isinstance(t, LSkip):
            return "skip"
        if isinstance(t, LVar):
            return t.var
        if isinstance(t, (LSend, LRecv)):
            head = action_head(t)
            if len(t.branches) == 1 and isinstance(t.branches[0][1], LSkip):
                return head + t.branches[0][0]
            return head + _print_branches(t.branches, go)
        if isinstance(t, LStar):
            return f"({go(t.body, 0)})*"
        if isinstance(t, LChoice):
            return f"({go(t.left, _CHOICE)} + {go(t.right, _CHOICE)})"
        if isinstance(t, LSeq):
            text = f"{go(t.first, _SEQ + 1)} ; {go(t.second, _SEQ)}"
            return text if level <= _SEQ else f"({text})"
        if isinstance(t, LPar):
            text = f"{go(t.left, _PAR + 1)} || {go(t.right, _PAR)}"
            return text if level <= _PAR else f"({text})"
        if isinstance(t, LRec):
            text = f"rec {t.var} . {go(t.body, 0)}"
            return text if level <= _REC else f"({text})"
        raise TypeError(f"not a local type: {t!r}")

    return go(l, 0)
