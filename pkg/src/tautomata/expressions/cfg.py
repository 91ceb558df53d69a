"""Context-free grammars in Greibach normal form and their algebraic expressions."""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..semirings import BOOL, Semiring
from .additive import Act, Base
from .algebraic import EMPTY, HOLE, AlgebraicLanguage, Plus, Seq
from .core import ExprError, Free, Node

EPS = ("eps", "ε", "")


class GrammarError(ValueError):
    pass


@dataclass(frozen=True)
class Grammar:
    """Productions ``lhs -> (terminal, nonterminals...)``; ``()`` is the empty production."""

    start: str
    nonterminals: tuple
    productions: tuple  # ((lhs, rhs tuple), ...)

    @property
    def terminals(self) -> tuple:
        return tuple(sorted({rhs[0] for _, rhs in self.productions if rhs}))

    def rules(self, x):
        return [rhs for lhs, rhs in self.productions if lhs == x]

    def check_gnf(self) -> None:
        for lhs, rhs in self.productions:
            if not rhs:
                continue
            if rhs[0] in self.nonterminals:
                raise GrammarError(f"{lhs} -> {' '.join(rhs)} does not start with a terminal")
            for sym in rhs[1:]:
                if sym not in self.nonterminals:
                    raise GrammarError(f"{lhs} -> {' '.join(rhs)}: {sym!r} after the terminal is not a nonterminal")


_ARROW = re.compile(r"\s*->\s*|\s*→\s*")


def parse_grammar(text: str) -> Grammar:
    """One production per line: ``S -> a S B`` or ``S -> eps``; ``#`` starts a comment.

    Nonterminals are exactly the left-hand sides; the first one is the start symbol.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = _ARROW.split(line, maxsplit=1)
        if len(parts) != 2 or not parts[0]:
            raise GrammarError(f"line {lineno}: expected 'X -> a Y ...'")
        lhs = parts[0].strip()
        for alt in parts[1].split("|"):
            rhs = tuple(alt.split())
            if len(rhs) == 1 and rhs[0] in EPS:
                rhs = ()
            rows.append((lhs, rhs))
    if not rows:
        raise GrammarError("grammar has no productions")
    nonterminals = tuple(dict.fromkeys(lhs for lhs, _ in rows))
    g = Grammar(nonterminals[0], nonterminals, tuple(rows))
    g.check_gnf()
    return g


def _chain(names) -> Node:
    out = Free(names[-1])
    for n in reversed(names[:-1]):
        out = Seq(Free(n), out)
    return out


def cfg_to_algexpr(g: Grammar, sr: Semiring = BOOL, output: str = "true",
                   start: str | None = None) -> tuple[Node, AlgebraicLanguage]:
    """Expression ``u * b`` whose trace is ``b`` exactly on the words of the grammar.

    Each nonterminal contributes ``sum of a.(y1 * ... * yk)`` plus a hole when it
    has an empty production; variables are eliminated with the start symbol last.
    """
    g.check_gnf()
    if not sr.is_idempotent:
        raise ExprError("grammar import needs an idempotent semiring")
    start = start or g.start
    if start not in g.nonterminals:
        raise GrammarError(f"unknown start symbol {start}")
    order = [start] + [x for x in g.nonterminals if x != start]
    lang = AlgebraicLanguage(sr, g.terminals)
    bodies = {}
    for x in order:
        parts = []
        for rhs in g.rules(x):
            if rhs:
                tail = _chain(rhs[1:]) if len(rhs) > 1 else HOLE
                parts.append(Act(rhs[0], tail))
        has_eps = any(not rhs for rhs in g.rules(x))
        parts.append(HOLE if has_eps else EMPTY)
        body = parts[-1]
        for p in reversed(parts[:-1]):
            body = Plus(p, body)
        bodies[x] = body
    u = lang.eliminate(order, bodies)
    return Seq(u, Base(output)), lang
