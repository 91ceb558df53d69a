"""Algebraic expressions: additive expressions with scalars, sequencing and a hole.

``seq(e1, e2)`` plugs ``e2`` into the holes of ``e1``. Besides the output
``out`` every expression has a scalar ``hole_out``: the weight with which it
reaches a hole without reading input. Values live in the coefficient semiring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Iterable

from .. import sexpr, terms
from ..semirings import Semiring
from ..syntax import LITERAL_HEADS, atom, beta_to_surface
from .additive import Act, Base, Fix, guardedness
from .core import Bound, ExprError, Free, NameSupply, Node, abstract, free_names, substitute_free
from .reactive import struct_key


@dataclass(frozen=True)
class Empty(Node):
    pass


@dataclass(frozen=True)
class Hole(Node):
    pass


@dataclass(frozen=True)
class Plus(Node):
    left: Node
    right: Node

    children = ("left", "right")


@dataclass(frozen=True)
class Seq(Node):
    first: Node
    then: Node

    children = ("first", "then")


@dataclass(frozen=True)
class Scale(Node):
    coeff: Any
    body: Node

    children = ("body",)


EMPTY = Empty()
HOLE = Hole()


def is_hole_closed(e: Node) -> bool:
    """Holes may only occur in the left part of a sequence whose right part is hole-closed."""
    if isinstance(e, Hole):
        return False
    if isinstance(e, Seq):
        return is_hole_closed(e.then)
    return all(is_hole_closed(c) for c, _ in e.iter_children())


class AlgebraicLanguage:
    """Coalgebra of algebraic expressions with weights in ``sr``.

    Derivatives are simplified by dropping empty summands, annihilating empty
    sequences and zero scalars, and (for idempotent semirings) merging equal
    summands; each of these is an identity on traces.
    """

    def __init__(self, sr: Semiring, inputs: Iterable[str], simplify: bool = True):
        self.sr = sr
        self.inputs = tuple(inputs)
        self.simplify = simplify

    # smart constructors

    def plus(self, *parts: Node) -> Node:
        if not self.simplify:
            out = parts[-1] if parts else EMPTY
            for p in reversed(parts[:-1]):
                out = Plus(p, out)
            return out
        items: dict = {}
        stack = list(parts)
        flat = []
        while stack:
            u = stack.pop()
            if isinstance(u, Plus):
                stack.extend([u.right, u.left])
            elif not isinstance(u, Empty):
                flat.append(u)
        if self.sr.is_idempotent:
            for u in flat:
                items.setdefault(struct_key(u), u)
            flat = [items[k] for k in sorted(items)]
        if not flat:
            return EMPTY
        out = flat[-1]
        for u in reversed(flat[:-1]):
            out = Plus(u, out)
        return out

    def seq(self, e1: Node, e2: Node) -> Node:
        if self.simplify:
            if isinstance(e1, Empty):
                return EMPTY
            if isinstance(e1, Hole):
                return e2
        return Seq(e1, e2)

    def scale(self, r, e: Node) -> Node:
        if self.simplify:
            if self.sr.is_zero(r) or isinstance(e, Empty):
                return EMPTY
            if self.sr.eq(r, self.sr.one):
                return e
        return Scale(r, e)

    # coalgebra structure

    def base_value(self, literal: str):
        return self.sr.parse(sexpr.parse(literal) if literal.startswith("(") else literal)

    def out(self, e: Node, _busy=frozenset()):
        sr = self.sr
        if isinstance(e, Base):
            return self.base_value(e.literal)
        if isinstance(e, (Empty, Hole, Act)):
            return sr.zero
        if isinstance(e, Scale):
            return sr.mul(e.coeff, self.out(e.body, _busy))
        if isinstance(e, Plus):
            return sr.add(self.out(e.left, _busy), self.out(e.right, _busy))
        if isinstance(e, Seq):
            return sr.add(sr.mul(self.hole_out(e.first, _busy), self.out(e.then, _busy)),
                          self.out(e.first, _busy))
        if isinstance(e, Fix):
            if e in _busy:
                raise ExprError("unguarded recursion while computing an output")
            return self.out(e.unfold(), _busy | {e})
        raise ExprError(f"output of an open expression ({e})")

    def hole_out(self, e: Node, _busy=frozenset()):
        sr = self.sr
        if isinstance(e, Hole):
            return sr.one
        if isinstance(e, (Base, Empty, Act)):
            return sr.zero
        if isinstance(e, Scale):
            return sr.mul(e.coeff, self.hole_out(e.body, _busy))
        if isinstance(e, Plus):
            return sr.add(self.hole_out(e.left, _busy), self.hole_out(e.right, _busy))
        if isinstance(e, Seq):
            return sr.mul(self.hole_out(e.first, _busy), self.hole_out(e.then, _busy))
        if isinstance(e, Fix):
            if e in _busy:
                raise ExprError("unguarded recursion while computing an output")
            return self.hole_out(e.unfold(), _busy | {e})
        raise ExprError(f"output of an open expression ({e})")

    def deriv(self, e: Node, a: str, _busy=frozenset()) -> Node:
        if isinstance(e, (Base, Empty, Hole)):
            return EMPTY
        if isinstance(e, Act):
            return e.body if e.letter == a else EMPTY
        if isinstance(e, Scale):
            return self.scale(e.coeff, self.deriv(e.body, a, _busy))
        if isinstance(e, Plus):
            return self.plus(self.deriv(e.left, a, _busy), self.deriv(e.right, a, _busy))
        if isinstance(e, Seq):
            left = self.seq(self.deriv(e.first, a, _busy), e.then)
            right = self.scale(self.hole_out(e.first), self.deriv(e.then, a, _busy))
            return self.plus(left, right)
        if isinstance(e, Fix):
            if e in _busy:
                raise ExprError("unguarded recursion while computing a derivative")
            return self.deriv(e.unfold(), a, _busy | {e})
        raise ExprError(f"derivative of an open expression ({e})")

    def deriv_word(self, e: Node, w: Iterable[str]) -> Node:
        for a in w:
            e = self.deriv(e, a)
        return e

    def trace(self, e: Node, w: Iterable[str]):
        return self.out(self.deriv_word(e, w))

    def guardedness(self, e: Node):
        return guardedness(e, left_only=("Seq",))

    # surface syntax

    def parse(self, x, scope: tuple = ()) -> Node:
        if not isinstance(x, list):
            name = sexpr.symbol(x)
            if name in scope:
                return Bound(len(scope) - 1 - scope.index(name))
            try:
                self.sr.parse(x)
                return Base(name)
            except ValueError:
                return Free(name)
        if not x:
            raise ExprError("empty expression")
        head = sexpr.symbol(x[0])
        args = x[1:]

        def need(n):
            if len(args) != n:
                raise ExprError(f"({head} ...) takes {n} arguments")

        if head in LITERAL_HEADS:
            self.sr.parse(x)
            return Base(sexpr.dumps(x))
        if head in ("out", "base"):
            need(1)
            lit = args[0]
            return Base(sexpr.dumps(lit) if isinstance(lit, list) else sexpr.symbol(lit))
        if head == "empty":
            need(0)
            return EMPTY
        if head == "hole":
            need(0)
            return HOLE
        if head == "mu":
            need(2)
            name = sexpr.symbol(args[0])
            if name in scope:
                raise ExprError(f"variable {name} is bound twice")
            return Fix(self.parse(args[1], scope + (name,)), name)
        if head == "act":
            need(2)
            return Act(sexpr.symbol(args[0]), self.parse(args[1], scope))
        if head == "scale":
            need(2)
            return Scale(self.sr.parse(args[0]), self.parse(args[1], scope))
        if head == "plus":
            if not args:
                return EMPTY
            parts = [self.parse(a, scope) for a in args]
            out = parts[-1]
            for p in reversed(parts[:-1]):
                out = Plus(p, out)
            return out
        if head == "seq":
            need(2)
            return Seq(self.parse(args[0], scope), self.parse(args[1], scope))
        raise ExprError(f"unknown algebraic expression form ({head} ...)")

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
        if isinstance(e, Empty):
            return ["empty"]
        if isinstance(e, Hole):
            return ["hole"]
        if isinstance(e, Act):
            return ["act", atom(e.letter), self.to_sexpr(e.body, names, supply)]
        if isinstance(e, Fix):
            name = supply.fresh(e.hint)
            return ["mu", name, self.to_sexpr(e.body, names + (name,), supply)]
        if isinstance(e, Scale):
            shown = self.sr.show(e.coeff)
            coeff = sexpr.parse(shown) if shown.startswith("(") else shown
            return ["scale", coeff, self.to_sexpr(e.body, names, supply)]
        if isinstance(e, Plus):
            return ["plus", self.to_sexpr(e.left, names, supply), self.to_sexpr(e.right, names, supply)]
        if isinstance(e, Seq):
            return ["seq", self.to_sexpr(e.first, names, supply), self.to_sexpr(e.then, names, supply)]
        raise ExprError(f"not an algebraic expression: {e!r}")

    def dumps(self, e: Node, indent: int | None = None) -> str:
        return sexpr.dumps(self.to_sexpr(e), indent)

    # building systems of equations

    def eliminate(self, order: list[str], bodies: dict[str, Node]) -> Node:
        """Solve ``x_i = bodies[x_i]`` for the first variable.

        Variables are bound from the last to the first; each later solution is
        substituted into the earlier bodies before binding, latest first, so
        the references it brings in to intermediate variables get replaced too.
        """
        built: dict[str, Node] = {}
        for i in range(len(order) - 1, -1, -1):
            x = order[i]
            body = bodies[x]
            for y in reversed(order[i + 1:]):
                body = substitute_free(body, y, built[y])
            built[x] = Fix(abstract(body, x), x)
        return built[order[0]]
