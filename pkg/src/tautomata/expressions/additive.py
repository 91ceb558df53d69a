"""Additive fixpoint expressions and their translation to and from reactive ones.

The grammar is ``b | x | mu x.e | a.e | f(e, ...)`` over a theory with ``plus``
and ``empty``; recursion must be guarded by an action prefix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .. import sexpr, terms
from ..automata import Algebra, default_algebra
from ..monads import KleisliOps
from ..syntax import LITERAL_HEADS, atom, beta_to_surface, op_name, surface_head
from .core import (Bound, ExprError, Free, NameSupply, Node, free_names, hint_field,
                   instantiate, loose_bound)
from .reactive import Mu, Op, aci_normalize, has_aci_plus

EMPTY = Op("empty")


@dataclass(frozen=True)
class Base(Node):
    """A generator of B, written as its literal."""

    literal: str


@dataclass(frozen=True)
class Act(Node):
    letter: str
    body: Node

    children = ("body",)


@dataclass(frozen=True)
class Fix(Node):
    body: Node
    hint: str = hint_field()

    children = ("body",)
    binds = True

    def unfold(self) -> Node:
        return instantiate(self.body, self)


@dataclass(frozen=True)
class Guardedness:
    ok: bool
    variable: str | None = None
    path: tuple = ()

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return "guarded"
        where = "root" if not self.path else "/".join(map(str, self.path))
        return f"unguarded {self.variable} at {where}"


def _unguarded(e: Node, depth: int, left_only=()) -> tuple | None:
    """Path to an occurrence of the variable bound ``depth`` levels up that no action guards."""
    if isinstance(e, Bound):
        return () if e.index == depth else None
    if isinstance(e, Act):
        return None
    if type(e).__name__ in left_only:
        children = list(e.iter_children())[:1]
    else:
        children = list(e.iter_children())
    for i, (c, s) in enumerate(children):
        p = _unguarded(c, depth + s, left_only)
        if p is not None:
            return (i,) + p
    return None


def guardedness(e: Node, left_only=("Seq",)) -> Guardedness:
    """Every recursion variable must sit under an action; sequencing only needs its left side."""

    def walk(u, path):
        if isinstance(u, Fix):
            p = _unguarded(u.body, 0, left_only)
            if p is not None:
                return Guardedness(False, u.hint, path + (0,) + p)
        for i, (c, _) in enumerate(u.iter_children()):
            g = walk(c, path + (i,))
            if not g:
                return g
        return Guardedness(True)

    return walk(e, ())


class AdditiveLanguage:
    def __init__(self, monad: KleisliOps, inputs: Iterable[str], algebra: Algebra | None = None,
                 normalize: bool | None = None):
        for name in ("plus", "empty"):
            try:
                monad.operation(name)
            except KeyError:
                raise ExprError(f"additive expressions need a theory with {name}") from None
        self.monad = monad
        self.inputs = tuple(inputs)
        self.algebra = algebra or default_algebra(monad)
        self.normalize = has_aci_plus(monad) if normalize is None else normalize

    # coalgebra structure; guardedness makes the recursion on Fix terminate

    def out(self, e: Node, _busy=frozenset()):
        alg = self.algebra
        if isinstance(e, Base):
            return alg.evaluate_term(terms.Var(e.literal))
        if isinstance(e, Act):
            return alg.operation("empty")()
        if isinstance(e, Op):
            return alg.operation(e.op)(*(self.out(a, _busy) for a in e.args))
        if isinstance(e, Fix):
            if e in _busy:
                raise ExprError("unguarded recursion while computing an output")
            return self.out(e.unfold(), _busy | {e})
        raise ExprError(f"output of an open expression ({e})")

    def deriv(self, e: Node, a: str) -> Node:
        d = self._deriv(e, a)
        return aci_normalize(d) if self.normalize else d

    def _deriv(self, e: Node, a: str, _busy=frozenset()) -> Node:
        if isinstance(e, Base):
            return EMPTY
        if isinstance(e, Act):
            return e.body if e.letter == a else EMPTY
        if isinstance(e, Op):
            return Op(e.op, tuple(self._deriv(x, a, _busy) for x in e.args))
        if isinstance(e, Fix):
            if e in _busy:
                raise ExprError("unguarded recursion while computing a derivative")
            return self._deriv(e.unfold(), a, _busy | {e})
        raise ExprError(f"derivative of an open expression ({e})")

    def trace(self, e: Node, w: Iterable[str]):
        for a in w:
            e = self.deriv(e, a)
        return self.out(e)

    def out_term(self, e: Node, _busy=frozenset()) -> terms.Term:
        """The output as an unevaluated term over generators."""
        if isinstance(e, Base):
            return terms.Var(e.literal)
        if isinstance(e, Act):
            return terms.App("empty")
        if isinstance(e, Op):
            return terms.App(e.op, tuple(self.out_term(a, _busy) for a in e.args))
        if isinstance(e, Fix):
            if e in _busy:
                raise ExprError("unguarded recursion while computing an output")
            return self.out_term(e.unfold(), _busy | {e})
        raise ExprError(f"output of an open expression ({e})")

    # translations

    def tr(self, e: Node) -> Node:
        """Reactive expression with the same derivatives and outputs.

        Recursion nodes are translated through their derivatives; meeting the
        same recursion node again while translating it closes the cycle.
        """
        levels: dict = {}
        done: dict = {}

        def go(u, depth):
            if u in done:
                return done[u]
            if isinstance(u, Base):
                r = Mu(tuple((a, EMPTY) for a in self.inputs), terms.Var(u.literal), "x")
            elif isinstance(u, Act):
                if u.letter not in self.inputs:
                    raise ExprError(f"unknown input {u.letter!r}")
                rows = tuple((a, go(u.body, depth + 1) if a == u.letter else EMPTY)
                             for a in self.inputs)
                r = Mu(rows, terms.App("empty"), "x")
            elif isinstance(u, Op):
                r = Op(u.op, tuple(go(x, depth) for x in u.args))
            elif isinstance(u, Fix):
                if u in levels:
                    return Bound(depth - levels[u] - 1)
                levels[u] = depth
                try:
                    rows = tuple((a, go(self._deriv(u, a), depth + 1)) for a in self.inputs)
                    r = Mu(rows, self.out_term(u), u.hint)
                finally:
                    del levels[u]
            else:
                raise ExprError(f"cannot translate open expression ({u})")
            if not loose_bound(r):
                done[u] = r
            return r

        return go(e, 0)

    def trbar(self, e: Node) -> Node:
        """Replace every branching ``a1.e1 | ... | b`` by the sum ``a1.e1 + ... + b``."""
        if isinstance(e, Mu):
            parts = [Act(a, self.trbar(b)) for a, b in e.branches] + [_beta_expr(e.out)]
            body = parts[-1]
            for p in reversed(parts[:-1]):
                body = Op("plus", (p, body))
            return Fix(body, e.hint)
        if isinstance(e, Op):
            return Op(e.op, tuple(self.trbar(a) for a in e.args))
        if isinstance(e, (Bound, Free)):
            return e
        raise ExprError(f"not a reactive expression: {e!r}")

    # surface syntax

    def parse(self, x, scope: tuple = ()) -> Node:
        if not isinstance(x, list):
            name = sexpr.symbol(x)
            if name in scope:
                return Bound(len(scope) - 1 - scope.index(name))
            if self._is_literal(x):
                return Base(name)
            return Free(name)
        if not x:
            raise ExprError("empty expression")
        head = sexpr.symbol(x[0])
        if head in LITERAL_HEADS:
            return Base(sexpr.dumps(x))
        if head in ("out", "base"):
            return Base(sexpr.dumps(x[1]) if isinstance(x[1], list) else sexpr.symbol(x[1]))
        if head == "mu":
            if len(x) != 3:
                raise ExprError("expected (mu x body)")
            name = sexpr.symbol(x[1])
            if name in scope:
                raise ExprError(f"variable {name} is bound twice")
            return Fix(self.parse(x[2], scope + (name,)), name)
        if head == "act":
            if len(x) != 3:
                raise ExprError("expected (act a body)")
            return Act(sexpr.symbol(x[1]), self.parse(x[2], scope))
        name, args = op_name(head, x[1:], self.monad)
        return Op(name, tuple(self.parse(a, scope) for a in args))

    def _is_literal(self, x) -> bool:
        try:
            self.algebra.parse(x)
            return True
        except (ValueError, KeyError, sexpr.SexprError):
            return False

    def loads(self, text: str) -> Node:
        return self.parse(sexpr.parse(text))

    def to_sexpr(self, e: Node, names: tuple = (), supply: NameSupply | None = None):
        supply = supply or NameSupply(free_names(e))
        if isinstance(e, Bound):
            return names[len(names) - 1 - e.index]
        if isinstance(e, Free):
            return atom(e.name)
        if isinstance(e, Base):
            return beta_to_surface(terms.Var(e.literal))
        if isinstance(e, Act):
            return ["act", atom(e.letter), self.to_sexpr(e.body, names, supply)]
        if isinstance(e, Fix):
            name = supply.fresh(e.hint)
            return ["mu", name, self.to_sexpr(e.body, names + (name,), supply)]
        if isinstance(e, Op):
            return surface_head(e.op) + [self.to_sexpr(a, names, supply) for a in e.args]
        raise ExprError(f"not an additive expression: {e!r}")

    def dumps(self, e: Node) -> str:
        return sexpr.dumps(self.to_sexpr(e))


def _beta_expr(t: terms.Term) -> Node:
    if isinstance(t, terms.Var):
        return Base(t.name)
    return Op(t.op, tuple(_beta_expr(a) for a in t.args))


def tree_equal(e1: Node, e2: Node, inputs: Iterable[str], max_pairs: int = 100_000,
               modulo_aci: bool = False, out_equal=None) -> bool:
    """Equality of reactive expressions as infinite trees (recursion unfolded).

    With ``modulo_aci`` every unfolded pair is first brought to its plus/empty
    normal form, so trees that differ only by those laws compare equal.
    ``out_equal`` compares output terms; it defaults to syntactic equality.
    """
    out_equal = out_equal or (lambda s, t: s == t)
    inputs = tuple(inputs)
    seen = set()
    todo = [(e1, e2)]
    while todo:
        u, v = todo.pop()
        if modulo_aci:
            u, v = aci_normalize(u), aci_normalize(v)
        if (u, v) in seen or u == v:
            continue
        seen.add((u, v))
        if len(seen) > max_pairs:
            raise ExprError("tree comparison exceeded its budget")
        if isinstance(u, Mu) and isinstance(v, Mu):
            if not out_equal(u.out, v.out):
                return False
            for a in inputs:
                todo.append((instantiate(u.branch(a), u), instantiate(v.branch(a), v)))
        elif isinstance(u, Op) and isinstance(v, Op):
            if u.op != v.op or len(u.args) != len(v.args):
                return False
            todo.extend(zip(u.args, v.args))
        else:
            return False
    return True
