"""Seeded random generators for monad elements, automata and expressions."""

from __future__ import annotations

import random

from tautomata import terms
from tautomata.automata import TAU, StackPredicateAlgebra, TAutomaton
from tautomata.expressions.additive import Act, AdditiveLanguage, Base, Fix
from tautomata.expressions.core import Bound
from tautomata.expressions.reactive import Mu, Op
from tautomata.monads import PowersetOps, SemimoduleOps, normalize
from tautomata.semirings import NormalForm
from tautomata.storemonads import (MultiStackElement, StackElement, TapeElement, _tuples,
                                   prefixes, windows)

RESULTS = (0, 1, 2)


def word(rng: random.Random, gamma: str, max_len: int) -> str:
    return "".join(rng.choice(gamma) for _ in range(rng.randint(0, max_len)))


def stack_element(rng, gamma="AB", k_max=2, results=RESULTS):
    k = rng.randint(0, k_max)
    table = {w: (rng.choice(results), word(rng, gamma, 2)) for w in prefixes(gamma, k)}
    return StackElement(gamma, k, table)


def multistack_element(rng, m, gamma, k_max=1, results=RESULTS, width=2):
    k = rng.randint(0, k_max)
    table = {}
    for w in _tuples(gamma, k, m):
        outs = set()
        for _ in range(rng.randint(0, width)):
            outs.add((rng.choice(results), tuple(word(rng, gamma, 1) for _ in range(m))))
        table[w] = outs
    return MultiStackElement(m, gamma, k, table)


def tape_element(rng, gamma="_a", k_max=1, results=RESULTS):
    k = rng.randint(0, k_max)
    table = {w: (rng.choice(results), rng.randint(-k, k), "".join(rng.choice(gamma) for _ in w))
             for w in windows(gamma, k)}
    return TapeElement(gamma, k, table)


def poly_elem(rng, rank=2):
    neg = tuple(rng.randint(1, rank) for _ in range(rng.randint(0, 2)))
    pos = tuple(rng.randint(1, rank) for _ in range(rng.randint(0, 2)))
    return NormalForm(neg, pos)


def scalar(rng, sr):
    if sr.name == "bool":
        return rng.random() < 0.5
    if sr.name == "nat":
        return rng.randint(0, 4)
    if sr.name == "real":
        return round(rng.uniform(0, 3), 3)
    return frozenset(poly_elem(rng) for _ in range(rng.randint(0, 2)))


def lincomb(rng, sr, results=RESULTS):
    return normalize([(scalar(rng, sr), rng.choice(results)) for _ in range(rng.randint(0, 3))], sr)


def powerset_element(rng, results=RESULTS):
    return frozenset(x for x in results if rng.random() < 0.5)


# Automata


def powerset_automaton(rng, n_states=3, inputs="ab", tau=False):
    states = tuple(f"q{i}" for i in range(rng.randint(1, n_states)))
    letters = tuple(inputs) + ((TAU,) if tau else ())
    trans = {(a, x): frozenset(y for y in states if rng.random() < 0.4)
             for a in letters for x in states}
    out = {x: rng.random() < 0.4 for x in states}
    from tautomata.automata import OrAlgebra
    return TAutomaton(PowersetOps(), OrAlgebra(), states, tuple(inputs), out, trans, states[0])


def stack_automaton(rng, gamma="A_", n_states=3, inputs="ab"):
    from tautomata.storemonads import StackOps
    from tautomata.automata import StackPredicate
    monad = StackOps(gamma)
    alg = StackPredicateAlgebra(monad)
    states = tuple(f"q{i}" for i in range(rng.randint(1, n_states)))
    trans = {(a, x): stack_element(rng, gamma, 1, states) for a in inputs for x in states}
    out = {}
    for x in states:
        k = rng.randint(0, 1)
        table = {w: rng.random() < 0.5 for w in prefixes(gamma, k)}
        out[x] = StackPredicate.from_table(gamma, table) if k else StackPredicate.const(gamma, table[""])
    return TAutomaton(monad, alg, states, tuple(inputs), out, trans, states[0])


# Expressions


def reactive_expr(rng, inputs="ab", depth=3, scope=0):
    """Closed reactive expression over the powerset theory with booleans as outputs."""
    roll = rng.random()
    if depth <= 0 or roll < 0.2:
        if scope and rng.random() < 0.6:
            return Bound(rng.randrange(scope))
        if rng.random() < 0.3:
            return Op("empty")
        return Mu(tuple((a, Bound(0)) for a in inputs),
                  terms.Var(rng.choice(("true", "false"))), "x")
    if roll < 0.45:
        return Op("plus", (reactive_expr(rng, inputs, depth - 1, scope),
                           reactive_expr(rng, inputs, depth - 1, scope)))
    rows = tuple((a, reactive_expr(rng, inputs, depth - 1, scope + 1)) for a in inputs)
    return Mu(rows, terms.Var(rng.choice(("true", "false"))), "x")


def guarded_additive(rng, inputs="ab", depth=3, scope=0, guarded=0):
    """Closed additive expression; bound variables only appear under an action.

    ``guarded`` counts the innermost binders already behind an action prefix.
    """
    roll = rng.random()
    if depth <= 0 or roll < 0.2:
        if guarded and rng.random() < 0.6:
            return Bound(rng.randrange(guarded))
        return Base(rng.choice(("true", "false")))
    if roll < 0.45:
        return Op("plus", (guarded_additive(rng, inputs, depth - 1, scope, guarded),
                           guarded_additive(rng, inputs, depth - 1, scope, guarded)))
    if roll < 0.75:
        return Act(rng.choice(inputs), guarded_additive(rng, inputs, depth - 1, scope, scope))
    return Fix(guarded_additive(rng, inputs, depth - 1, scope + 1, 0), "x")


def additive_language(inputs="ab"):
    return AdditiveLanguage(PowersetOps(), inputs)


def semimodule_ops(sr):
    return SemimoduleOps(sr)


def finite_stack_automaton(rng, n_states=3, inputs="ab"):
    """Stack automaton over one stack symbol with plain boolean outputs."""
    from tautomata.automata import InfiniteStackAlgebra
    from tautomata.storemonads import StackOps
    monad = StackOps("A")
    states = tuple(f"q{i}" for i in range(rng.randint(1, n_states)))
    trans = {(a, x): stack_element(rng, "A", 2, states) for a in inputs for x in states}
    out = {x: rng.random() < 0.5 for x in states}
    return TAutomaton(monad, InfiniteStackAlgebra(monad), states, tuple(inputs), out, trans, states[0])


def enfa_tables(m):
    """Plain dictionaries for the oracle: letter moves, silent moves, final states."""
    delta = {(x, a): set(m.trans[(a, x)]) for x in m.states for a in m.inputs}
    eps = {x: set(m.trans[(TAU, x)]) for x in m.states} if m.has_tau else {}
    final = {x for x in m.states if m.out[x]}
    return delta, eps, final
