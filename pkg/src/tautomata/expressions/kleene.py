"""Conversions between closed reactive expressions and automata."""

from __future__ import annotations

from .. import terms
from ..automata import TAutomaton
from ..monads import order_key
from .core import Bound, ExprError, Free, Node, NameSupply, abstract, is_closed, substitute_free
from .reactive import Mu, Op, ReactiveLanguage


def expr_to_automaton(lang: ReactiveLanguage, e: Node) -> tuple[TAutomaton, str]:
    """One state per recursion node; transitions read off the branch bodies."""
    if not is_closed(e):
        raise ExprError("only closed expressions have an automaton")
    supply = NameSupply()
    bodies: dict[str, dict] = {}
    outs: dict[str, terms.Term] = {}

    def term_of(u: Node, scope: tuple) -> terms.Term:
        if isinstance(u, Bound):
            return terms.Var(scope[len(scope) - 1 - u.index])
        if isinstance(u, Mu):
            return terms.Var(visit(u, scope))
        if isinstance(u, Op):
            return terms.App(u.op, tuple(term_of(a, scope) for a in u.args))
        raise ExprError(f"unexpected node {u!r}")

    def visit(u: Mu, scope: tuple) -> str:
        name = supply.fresh(u.hint)
        inner = scope + (name,)
        outs[name] = u.out
        bodies[name] = {}
        for a, b in u.branches:
            bodies[name][a] = term_of(b, inner)
        return name

    top = term_of(e, ())
    monad, alg = lang.monad, lang.algebra
    trans, out = {}, {}
    for x, rows in bodies.items():
        out[x] = alg.evaluate_term(outs[x])
        for a, t in rows.items():
            trans[(a, x)] = monad.from_term(t)
    states = list(bodies)
    if isinstance(top, terms.Var):
        start = top.name
    else:
        start = supply.fresh("start")
        elem = monad.from_term(top)
        out[start] = alg.kappa(elem, out.__getitem__)
        for a in lang.inputs:
            trans[(a, start)] = monad.kleisli(lambda y, a=a: trans[(a, y)], elem)
        states.insert(0, start)
    m = TAutomaton(monad, alg, tuple(states), lang.inputs, out, trans, start)
    return m, start


def _reachable(m: TAutomaton, x0) -> list:
    seen = [x0]
    i = 0
    while i < len(seen):
        x = seen[i]
        i += 1
        for a in m.inputs:
            for y in sorted(m.monad.support(m.trans[(a, x)]), key=order_key):
                if y not in seen:
                    seen.append(y)
    return seen


def _expr_of_term(t: terms.Term) -> Node:
    if isinstance(t, terms.Var):
        return Free(t.name)
    return Op(t.op, tuple(_expr_of_term(a) for a in t.args))


def automaton_to_expr(m: TAutomaton, x0, lang: ReactiveLanguage | None = None) -> Node:
    """Eliminate states from the last to the first, binding each one by a recursion node.

    Each ``u_i`` is built from the transition terms of state ``i`` with the
    later ``u_j`` substituted in, highest ``j`` first; the free names of ``u_j`` that refer to
    earlier states get captured by the enclosing recursion nodes.
    """
    lang = lang or ReactiveLanguage(m.monad, m.inputs, m.algebra)
    states = _reachable(m, x0)
    keys = {x: f"s{i}" for i, x in enumerate(states)}
    hints = {x: x if isinstance(x, str) and x.isidentifier() else keys[x] for x in states}
    rows = {}
    for x in states:
        body = {}
        for a in lang.inputs:
            t = m.monad.to_term(m.trans[(a, x)], var=lambda y: terms.Var(keys[y]))
            body[a] = _expr_of_term(t)
        rows[x] = body
    built: dict = {}
    for i in range(len(states) - 1, -1, -1):
        x = states[i]
        body = {}
        for a in lang.inputs:
            u = rows[x][a]
            for y in reversed(states[i + 1:]):
                u = substitute_free(u, keys[y], built[y])
            body[a] = abstract(u, keys[x])
        out = m.algebra.generator_term(m.out[x])
        built[x] = Mu(tuple((a, body[a]) for a in lang.inputs), out, hints[x])
    e = built[x0]
    if not is_closed(e):
        raise ExprError("state elimination left free variables")
    return e
