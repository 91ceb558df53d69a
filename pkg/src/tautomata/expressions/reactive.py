"""Reactive fixpoint expressions over the theory of a monad.

A recursion node ``Mu`` carries one branch per input letter and an output
term; theory operations (``Op``) may be applied to whole expressions. Output
terms are ordinary first-order terms whose variables name generators of B.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, fields
from typing import Iterable

from .. import sexpr, terms
from ..automata import Algebra, default_algebra
from ..monads import KleisliOps, PowersetOps, SemimoduleOps
from ..results import BudgetExhausted
from ..syntax import atom, beta_from_surface, beta_to_surface, op_name, surface_head
from .core import (Bound, ExprError, Free, NameSupply, Node, abstract, free_names,
                   hint_field, instantiate, is_closed, loose_bound)


@dataclass(frozen=True)
class Mu(Node):
    branches: tuple  # ((letter, body), ...) in input order
    out: terms.Term
    hint: str = hint_field()

    child_tuples = ("branches",)
    binds = True

    def branch(self, a):
        for letter, body in self.branches:
            if letter == a:
                return body
        raise ExprError(f"no branch for input {a!r}")


@dataclass(frozen=True)
class Op(Node):
    op: str
    args: tuple = ()

    child_tuples = ("args",)


def struct_key(e):
    """Deterministic ordering key that ignores binder hints."""
    if isinstance(e, Node):
        parts = tuple(struct_key(getattr(e, f.name)) for f in fields(e) if f.name != "hint")
        return (type(e).__name__, parts)
    if isinstance(e, tuple):
        return ("tuple", tuple(struct_key(x) for x in e))
    if isinstance(e, (terms.Var, terms.App)):
        return ("term", terms.dumps(e))
    return ("atom", repr(e))


def aci_normalize(e: Node) -> Node:
    """Normal form modulo associativity, commutativity, idempotence and unit of plus."""
    if isinstance(e, Op) and e.op == "plus":
        summands = {}
        stack = [aci_normalize(a) for a in e.args]
        while stack:
            u = stack.pop()
            if isinstance(u, Op) and u.op == "plus":
                stack.extend(u.args)
            elif not (isinstance(u, Op) and u.op == "empty"):
                summands[struct_key(u)] = u
        items = [summands[k] for k in sorted(summands)]
        if not items:
            return Op("empty")
        out = items[-1]
        for u in reversed(items[:-1]):
            out = Op("plus", (u, out))
        return out
    if isinstance(e, (Bound, Free)):
        return e
    return e.map_children(lambda c, s: aci_normalize(c))


def has_aci_plus(monad: KleisliOps) -> bool:
    if isinstance(monad, PowersetOps):
        return True
    return isinstance(monad, SemimoduleOps) and monad.sr.is_idempotent


class ReactiveLanguage:
    """Expressions over a fixed input alphabet, monad and output algebra.

    The language object is the derivative coalgebra: ``out(e)`` and
    ``deriv(e, a)`` on closed expressions.
    """

    def __init__(self, monad: KleisliOps, inputs: Iterable[str], algebra: Algebra | None = None,
                 normalize: bool | None = None):
        self.monad = monad
        self.inputs = tuple(inputs)
        self.algebra = algebra or default_algebra(monad)
        if normalize is None:
            normalize = has_aci_plus(monad)
        self.normalize = normalize
        self._out: dict = {}

    # coalgebra structure

    def out(self, e: Node):
        try:
            return self._out[e]
        except KeyError:
            pass
        if isinstance(e, Mu):
            value = self.algebra.evaluate_term(e.out)
        elif isinstance(e, Op):
            value = self.algebra.operation(e.op)(*(self.out(a) for a in e.args))
        else:
            raise ExprError(f"output of an open expression ({e})")
        self._out[e] = value
        return value

    def deriv(self, e: Node, a: str) -> Node:
        d = self._deriv(e, a)
        return aci_normalize(d) if self.normalize else d

    def _deriv(self, e, a):
        if isinstance(e, Mu):
            return instantiate(e.branch(a), e)
        if isinstance(e, Op):
            return Op(e.op, tuple(self._deriv(x, a) for x in e.args))
        raise ExprError(f"derivative of an open expression ({e})")

    def deriv_word(self, e: Node, w: Iterable[str]) -> Node:
        for a in w:
            e = self.deriv(e, a)
        return e

    def trace(self, e: Node, w: Iterable[str]):
        return self.out(self.deriv_word(e, w))

    # construction helpers

    def mu(self, name: str, branches: dict, out) -> Mu:
        """Build ``mu name.(...)`` from bodies that mention ``name`` as a free variable."""
        if isinstance(out, str):
            out = terms.Var(out)
        if set(branches) != set(self.inputs):
            raise ExprError(f"branches must cover exactly {self.inputs}")
        rows = tuple((a, abstract(branches[a], name)) for a in self.inputs)
        return Mu(rows, out, name)

    def const(self, out) -> Mu:
        """``mu x.(a1.x ... an.x, out)``, the constant series."""
        if isinstance(out, str):
            out = terms.Var(out)
        return Mu(tuple((a, Bound(0)) for a in self.inputs), out, "x")

    def check(self, e: Node) -> None:
        """Raise ExprError unless ``e`` is closed and well formed."""
        if not is_closed(e):
            raise ExprError(f"expression is not closed (free: {sorted(free_names(e))})")

        def walk(u):
            if isinstance(u, Mu):
                letters = tuple(a for a, _ in u.branches)
                if letters != self.inputs:
                    raise ExprError(f"mu branches {letters} do not match inputs {self.inputs}")
                try:
                    self.algebra.evaluate_term(u.out)
                except (terms.TermError, ValueError, KeyError) as err:
                    raise ExprError(f"bad output term {terms.dumps(u.out)}: {err}") from None
            elif isinstance(u, Op):
                try:
                    arity, _ = self.monad.operation(u.op)
                except (KeyError, ValueError):
                    raise ExprError(f"unknown operation {u.op}") from None
                if arity != len(u.args):
                    raise ExprError(f"{u.op} expects {arity} arguments")
            for c, _ in u.iter_children():
                walk(c)

        walk(e)

    # surface syntax

    def parse(self, x, scope: tuple = ()) -> Node:
        if not isinstance(x, list):
            name = sexpr.symbol(x)
            if name in scope:
                return Bound(len(scope) - 1 - scope.index(name))
            return Free(name)
        if not x:
            raise ExprError("empty expression")
        head = sexpr.symbol(x[0])
        if head == "mu":
            if len(x) < 2:
                raise ExprError("(mu x ...) needs a variable")
            name = sexpr.symbol(x[1])
            if name in scope:
                raise ExprError(f"variable {name} is bound twice")
            inner = scope + (name,)
            rows, out = {}, None
            for clause in x[2:]:
                if not isinstance(clause, list) or len(clause) != 2:
                    raise ExprError(f"bad mu clause {sexpr.dumps(clause)}")
                key = sexpr.symbol(clause[0])
                if key == "out" and not isinstance(clause[0], sexpr.Str):
                    out = beta_from_surface(clause[1], self.monad)
                else:
                    if key in rows:
                        raise ExprError(f"duplicate branch for {key}")
                    rows[key] = self.parse(clause[1], inner)
            if out is None:
                raise ExprError(f"mu {name} has no (out ...) clause")
            if set(rows) != set(self.inputs):
                raise ExprError(f"mu {name} branches {sorted(rows)} do not match inputs {list(self.inputs)}")
            return Mu(tuple((a, rows[a]) for a in self.inputs), out, name)
        name, args = op_name(head, x[1:], self.monad)
        return Op(name, tuple(self.parse(a, scope) for a in args))

    def loads(self, text: str) -> Node:
        return self.parse(sexpr.parse(text))

    def to_sexpr(self, e: Node, names: tuple = (), supply: NameSupply | None = None):
        supply = supply or NameSupply(free_names(e))
        if isinstance(e, Bound):
            return names[len(names) - 1 - e.index]
        if isinstance(e, Free):
            return atom(e.name)
        if isinstance(e, Mu):
            name = supply.fresh(e.hint)
            inner = names + (name,)
            return (["mu", name] + [[atom(a), self.to_sexpr(b, inner, supply)] for a, b in e.branches]
                    + [["out", beta_to_surface(e.out)]])
        if isinstance(e, Op):
            return surface_head(e.op) + [self.to_sexpr(a, names, supply) for a in e.args]
        raise ExprError(f"not a reactive expression: {e!r}")

    def dumps(self, e: Node, indent: int | None = None) -> str:
        return sexpr.dumps(self.to_sexpr(e), indent)


def show(e: Node, names: tuple = (), supply: NameSupply | None = None) -> str:
    """Conventional notation, e.g. ``mu x.(a.x | b.y | true)``."""
    supply = supply or NameSupply(free_names(e))
    if isinstance(e, Bound):
        return names[len(names) - 1 - e.index]
    if isinstance(e, Free):
        return e.name
    if isinstance(e, Mu):
        name = supply.fresh(e.hint)
        inner = names + (name,)
        parts = [f"{a}.{show(b, inner, supply)}" for a, b in e.branches]
        return f"mu {name}.(" + " | ".join(parts + [str(e.out)]) + ")"
    if isinstance(e, Op):
        if not e.args:
            return e.op
        return f"{e.op}(" + ", ".join(show(a, names, supply) for a in e.args) + ")"
    return repr(e)


def closure(lang: ReactiveLanguage, e: Node, max_states: int = 10_000):
    """All expressions reachable from ``e`` by derivatives, in discovery order."""
    if lang.normalize:
        e = aci_normalize(e)
    seen = {e: None}
    queue = deque([e])
    while queue:
        u = queue.popleft()
        for a in lang.inputs:
            v = lang.deriv(u, a)
            if v not in seen:
                if len(seen) >= max_states:
                    return BudgetExhausted(max_states, len(seen))
                seen[v] = None
                queue.append(v)
    return list(seen)


def mu_count(e: Node) -> int:
    """Number of recursion nodes, which bounds the closure of pure recursion terms."""
    own = 1 if isinstance(e, Mu) else 0
    return own + sum(mu_count(c) for c, _ in e.iter_children())


def is_pure(e: Node) -> bool:
    """No theory operations anywhere."""
    if isinstance(e, Op):
        return False
    return all(is_pure(c) for c, _ in e.iter_children())


__all__ = [
    "Mu", "Op", "Bound", "Free", "ReactiveLanguage", "aci_normalize", "struct_key",
    "closure", "show", "mu_count", "is_pure", "has_aci_plus", "loose_bound",
]
