"""A small Circom subset: parsing, right-hand-side substitution and replay.

Grammar::

    program   := statement*
    statement := "signal" ["private"] ["input" | "output"] NAME ";"
               | NAME "<==" expr ";"
               | NAME "<--" expr ";"
               | NAME "===" expr ";"
    expr      := term (("+" | "-") term)*
    term      := factor ("*" factor)*
    factor    := INT | NAME | "(" expr ")" | "-" factor

``//`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from ..errors import CircomSyntaxError, ReparseFailure, UnknownSite

_TOKEN = re.compile(r"\s+|//[^\n]*|(?P<tok><==|<--|===|[A-Za-z_][A-Za-z0-9_]*|\d+|[-+*();])")


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            line = text.count("\n", 0, pos) + 1
            raise CircomSyntaxError(f"unexpected character {text[pos]!r} on line {line}")
        if m.group("tok"):
            tokens.append(Token(m.group("tok"), m.start(), m.end()))
        pos = m.end()
    return tokens


def _is_name(tok: str) -> bool:
    return bool(re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok))


class _ExprParser:
    """Recursive descent over a token slice; produces a nested-tuple AST."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i].text if self.i < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise CircomSyntaxError("unexpected end of expression")
        self.i += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek() is not None:
            raise CircomSyntaxError(f"unexpected token {self.peek()!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() in ("+", "-"):
            op = self.next()
            node = (op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.peek() == "*":
            self.next()
            node = ("*", node, self.factor())
        return node

    def factor(self):
        tok = self.next()
        if tok == "(":
            node = self.expr()
            if self.next() != ")":
                raise CircomSyntaxError("missing ')'")
            return node
        if tok == "-":
            return ("neg", self.factor())
        if tok.isdigit():
            return ("int", int(tok))
        if _is_name(tok) and tok not in ("signal", "private", "input", "output"):
            return ("name", tok)
        raise CircomSyntaxError(f"unexpected token {tok!r}")


def parse_expr(text: str):
    return _ExprParser(tokenize(text)).parse()


def eval_expr(node, env: Mapping[str, int], q: int) -> int:
    kind = node[0]
    if kind == "int":
        return node[1] % q
    if kind == "name":
        if node[1] not in env:
            raise CircomSyntaxError(f"undefined name {node[1]!r}")
        return env[node[1]] % q
    if kind == "neg":
        return -eval_expr(node[1], env, q) % q
    a = eval_expr(node[1], env, q)
    b = eval_expr(node[2], env, q)
    if kind == "+":
        return (a + b) % q
    if kind == "-":
        return (a - b) % q
    return a * b % q


def expr_names(node) -> set[str]:
    if node[0] == "name":
        return {node[1]}
    if node[0] == "int":
        return set()
    return set().union(*(expr_names(child) for child in node[1:]))


@dataclass(frozen=True)
class Statement:
    kind: str  # signal | assign | hint | constrain
    name: str
    expr: tuple | None = None
    rhs_span: tuple[int, int] | None = None  # character offsets of the right-hand side
    visibility: str = ""  # for signals: private input | input | output | ""


@dataclass
class Program:
    source: str
    statements: list[Statement] = field(default_factory=list)

    def signals(self) -> list[Statement]:
        return [s for s in self.statements if s.kind == "signal"]

    def assignment(self, name: str) -> Statement | None:
        for s in self.statements:
            if s.kind == "assign" and s.name == name:
                return s
        return None


def parse_program(text: str) -> Program:
    tokens = tokenize(text)
    prog = Program(text)
    assigned: set[str] = set()
    i = 0
    while i < len(tokens):
        try:
            end = next(j for j in range(i, len(tokens)) if tokens[j].text == ";")
        except StopIteration:
            raise CircomSyntaxError("statement missing ';'") from None
        stmt = tokens[i:end]
        words = [t.text for t in stmt]
        if words and words[0] == "signal":
            mods = words[1:-1]
            if mods not in ([], ["private", "input"], ["input"], ["output"]) or len(words) < 2:
                raise CircomSyntaxError(f"malformed signal declaration: {' '.join(words)}")
            if not _is_name(words[-1]):
                raise CircomSyntaxError(f"bad signal name {words[-1]!r}")
            prog.statements.append(Statement("signal", words[-1], visibility=" ".join(mods)))
        elif len(words) >= 3 and _is_name(words[0]) and words[1] in ("<==", "<--", "==="):
            expr = _ExprParser(stmt[2:]).parse()
            kind = {"<==": "assign", "<--": "hint", "===": "constrain"}[words[1]]
            if kind in ("assign", "hint"):
                if words[0] in assigned:
                    raise CircomSyntaxError(f"signal {words[0]!r} assigned twice")
                assigned.add(words[0])
            span = (stmt[2].start, stmt[-1].end)
            prog.statements.append(Statement(kind, words[0], expr, span))
        else:
            raise CircomSyntaxError(f"cannot parse statement: {' '.join(words)}")
        i = end + 1
    return prog


def site_signal(site_id: str) -> str:
    return site_id.split(".", 1)[1] if site_id.startswith("main.") else site_id


@dataclass(frozen=True)
class MutatedProgram:
    source_text: str
    substitutions: dict


def emit_mutated_source(original: str, subs: Mapping[str, int], q: int | None = None) -> MutatedProgram:
    """Replace the right-hand side of each targeted ``<==`` by a decimal literal."""
    prog = parse_program(original)
    edits = []
    for site_id, value in subs.items():
        stmt = prog.assignment(site_signal(site_id))
        if stmt is None:
            raise UnknownSite(f"{site_id} is not a weak assignment in the program")
        if value < 0 or (q is not None and value >= q):
            raise ValueError(f"constant {value} does not fit the field")
        edits.append((stmt.rhs_span, str(value)))
    text = original
    for (start, end), literal in sorted(edits, reverse=True):
        text = text[:start] + literal + text[end:]
    try:
        parse_program(text)
    except CircomSyntaxError as exc:
        raise ReparseFailure(str(exc)) from None
    return MutatedProgram(text, dict(subs))


def replay_program(source: str, inputs: Mapping[str, int], q: int) -> dict[str, int]:
    """Execute the program: inputs from ``inputs``, assignments in order.

    Raises CircomSyntaxError on undefined names and ValueError when a
    ``===`` constraint does not hold.
    """
    prog = parse_program(source)
    env = {name: v % q for name, v in inputs.items()}
    for stmt in prog.statements:
        if stmt.kind in ("assign", "hint"):
            env[stmt.name] = eval_expr(stmt.expr, env, q)
        elif stmt.kind == "constrain":
            if env.get(stmt.name) != eval_expr(stmt.expr, env, q):
                raise ValueError(f"constraint on {stmt.name} does not hold")
    return env


def render_edit_listing(inst, subs: Mapping[str, int]) -> str:
    """Circom-subset listing of the substitutions, for circuits without source text."""
    lines = ["// weak-assignment substitutions"]
    for site in inst.weak_sites:
        if site.site_id in subs:
            target = inst.target_of_row(site.rows[0]) if site.rows else None
            name = inst.name_of(target) if target is not None else site_signal(site.site_id)
            lines.append(f"{name} <== {subs[site.site_id]};")
    return "\n".join(lines) + "\n"
