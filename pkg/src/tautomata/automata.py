"""Automata whose transitions land in a monad, their traces and determinization.

An automaton is a triple of an output map ``o: X -> B``, a transition map
``t: A x X -> TX`` and an output algebra ``TB -> B``. Every algebra here
implements ``kappa(p, v)``, the algebra applied to ``p`` after relabelling
its variables by ``v``; traces and the generalized powerset construction only
ever need that combination.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Iterable, Mapping

from . import sexpr, terms
from .monads import IdentityOps, KleisliOps, PowersetOps, SemimoduleOps, order_key
from .results import BudgetExhausted, Verdict
from .semirings import BOOL, Semiring
from .storemonads import (BLANK, MultiStackOps, StackOps, TapeOps, prefixes,
                          windows, _tuples)

TAU = "tau"
DEFAULT_MAX_STATES = 10_000


# Predicates over stores


class Predicate:
    """A store predicate that only looks at a bounded part of the store.

    ``fn`` evaluates it on a full store; ``bound`` is an upper bound on the
    part it inspects. Tables are only built when equality is needed.
    """

    kind = "pred"

    def __init__(self, bound: int, fn: Callable):
        self.bound = bound
        self.fn = fn

    def __call__(self, *store):
        return self.fn(*store)

    def _points(self, k):
        raise NotImplementedError

    def _eval_point(self, point):
        raise NotImplementedError

    def _restrict(self, point, k):
        raise NotImplementedError

    @cached_property
    def minimal(self) -> tuple[int, dict]:
        full = {w: bool(self._eval_point(w)) for w in self._points(self.bound)}
        for j in range(self.bound + 1):
            if all(full[w] == full[self._restrict(w, j)] for w in full):
                return j, {w: full[w] for w in self._points(j)}
        return self.bound, full

    @cached_property
    def _key(self):
        k, table = self.minimal
        return (type(self).__name__, self._shape(), k, tuple(table[w] for w in self._points(k)))

    def _shape(self):
        return ()

    def __eq__(self, other):
        return isinstance(other, Predicate) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def constant(self):
        """The constant value if the predicate ignores the store, else None."""
        k, table = self.minimal
        return table[next(iter(table))] if k == 0 else None

    def to_sexpr(self):
        const = self.constant()
        if const is not None:
            return "true" if const else "false"
        k, table = self.minimal
        return ["pred"] + [[self._show_point(w), "1" if table[w] else "0"] for w in self._points(k)]

    def _show_point(self, w):
        return sexpr.Str(w)

    def __repr__(self):
        return sexpr.dumps(self.to_sexpr())


class StackPredicate(Predicate):
    def __init__(self, gamma: str, bound: int, fn: Callable[[str], bool]):
        super().__init__(bound, fn)
        self.gamma = gamma

    @classmethod
    def const(cls, gamma, value: bool):
        return cls(gamma, 0, lambda s: value)

    @classmethod
    def from_table(cls, gamma, table: Mapping[str, bool], default=False):
        k = max((len(w) for w in table), default=0)

        def fn(s):
            return table.get(s[:k], default)

        return cls(gamma, k, fn)

    def _points(self, k):
        return prefixes(self.gamma, k)

    def _eval_point(self, w):
        return self.fn(w)

    def _restrict(self, w, k):
        return w[:k]

    def _shape(self):
        return (self.gamma,)


class MultiStackPredicate(Predicate):
    def __init__(self, m: int, gamma: str, bound: int, fn: Callable[[tuple], bool]):
        super().__init__(bound, fn)
        self.m = m
        self.gamma = gamma

    def __call__(self, stacks):
        return self.fn(tuple(stacks))

    @classmethod
    def const(cls, m, gamma, value: bool):
        return cls(m, gamma, 0, lambda s: value)

    @classmethod
    def from_table(cls, m, gamma, table: Mapping[tuple, bool], default=False):
        k = max((len(s) for w in table for s in w), default=0)

        def fn(stacks):
            return table.get(tuple(s[:k] for s in stacks), default)

        return cls(m, gamma, k, fn)

    def _points(self, k):
        return _tuples(self.gamma, k, self.m)

    def _eval_point(self, w):
        return self.fn(w)

    def _restrict(self, w, k):
        return tuple(s[:k] for s in w)

    def _shape(self):
        return (self.m, self.gamma)

    def _show_point(self, w):
        return [sexpr.Str(s) for s in w]


class TapePredicate(Predicate):
    """Predicate on (head position, tape); windows are centred on the head."""

    def __init__(self, gamma: str, bound: int, fn: Callable[[int, Mapping], bool]):
        super().__init__(bound, fn)
        self.gamma = gamma

    @classmethod
    def const(cls, gamma, value: bool):
        return cls(gamma, 0, lambda pos, tape: value)

    @classmethod
    def from_table(cls, gamma, table: Mapping[str, bool], default=False):
        k = max(((len(w) - 1) // 2 for w in table), default=0)

        def fn(pos, tape):
            w = "".join(tape.get(pos + d, BLANK) for d in range(-k, k + 1))
            return table.get(w, default)

        return cls(gamma, k, fn)

    def _points(self, k):
        return windows(self.gamma, k)

    def _eval_point(self, w):
        k = (len(w) - 1) // 2
        tape = {d - k: c for d, c in enumerate(w) if c != BLANK}
        return self.fn(0, tape)

    def _restrict(self, w, k):
        mid = (len(w) - 1) // 2
        return w[mid - k: mid + k + 1]

    def _shape(self):
        return (self.gamma,)


# Output algebras


class Algebra:
    """Output algebra ``TB -> B`` of an automaton."""

    values: tuple | None = None
    monad: KleisliOps

    def kappa(self, p, v: Callable[[Any], Any]):
        """The algebra applied to ``T v (p)``."""
        raise NotImplementedError

    def apply(self, tb):
        return self.kappa(tb, lambda b: b)

    def eq(self, b, c) -> bool:
        return b == c

    def parse(self, x):
        raise NotImplementedError

    def to_sexpr(self, b):
        return str(b)

    def show(self, b) -> str:
        return sexpr.dumps(self.to_sexpr(b))

    def truthy(self, b) -> bool:
        return bool(b)

    def operation(self, name: str) -> Callable:
        _, elem = self.monad.operation(name)
        return lambda *bs: self.kappa(elem, lambda i: bs[i])

    def evaluate_term(self, t: terms.Term):
        """Evaluate an output term whose variables name generator literals."""
        return terms.evaluate(t, _AlgebraInterp(self), _LiteralEnv(self))

    def generator_term(self, b) -> terms.Term:
        return terms.Var(sexpr.dumps(self.to_sexpr(b)))


class _AlgebraInterp(Mapping):
    def __init__(self, alg):
        self.alg = alg

    def __getitem__(self, name):
        try:
            return self.alg.operation(name)
        except (KeyError, ValueError):
            raise KeyError(name) from None

    def __iter__(self):
        return iter(())

    def __len__(self):
        return 0


class _LiteralEnv(Mapping):
    def __init__(self, alg):
        self.alg = alg

    def __getitem__(self, name):
        try:
            return self.alg.parse(sexpr.parse(name))
        except (ValueError, sexpr.SexprError):
            raise KeyError(name) from None

    def __iter__(self):
        return iter(())

    def __len__(self):
        return 0


class PlainAlgebra(Algebra):
    """A bare set of output values for identity-monad (Moore) automata."""

    def __init__(self, values):
        self.values = tuple(values)
        self.monad = IdentityOps()

    def kappa(self, p, v):
        return v(p)

    def parse(self, x):
        name = sexpr.symbol(x)
        for b in self.values:
            if str(b) == name:
                return b
        raise ValueError(f"unknown output value {name}")


class OrAlgebra(Algebra):
    """Booleans for finite-powerset automata: a set is accepting iff it holds 1."""

    values = (False, True)

    def __init__(self):
        self.monad = PowersetOps()

    def kappa(self, p, v):
        return any(v(x) for x in p)

    def parse(self, x):
        return BOOL.parse(x)

    def to_sexpr(self, b):
        return "true" if b else "false"


class SemiringAlgebra(Algebra):
    """The semiring itself as the free semimodule on one generator."""

    def __init__(self, sr: Semiring):
        self.sr = sr
        self.monad = SemimoduleOps(sr)
        self.values = (False, True) if sr is BOOL else None

    def kappa(self, p, v):
        sr = self.sr
        return sr.sum(sr.mul(c, v(x)) for x, c in p.items_)

    def eq(self, b, c):
        return self.sr.eq(b, c)

    def parse(self, x):
        return self.sr.parse(x)

    def to_sexpr(self, b):
        shown = self.sr.show(b)
        return sexpr.parse(shown) if shown.startswith("(") else shown

    def truthy(self, b):
        if self.sr.is_idempotent and self.sr is not BOOL:
            return self.sr.leq(self.sr.one, b)
        return not self.sr.is_zero(b)


class FreeSemimoduleAlgebra(Algebra):
    """Linear combinations of named generators, e.g. outputs ``2*b0 + c``."""

    def __init__(self, sr: Semiring, generators: Iterable[str]):
        self.sr = sr
        self.generators = tuple(sorted(generators))
        self.monad = SemimoduleOps(sr)

    def kappa(self, p, v):
        return self.monad.kleisli(v, p)

    def parse(self, x):
        if isinstance(x, list) and x and sexpr.symbol(x[0]) == "lin":
            pairs = [(self.sr.parse(c), sexpr.symbol(g)) for c, g in x[1:]]
            return self.monad.kleisli(lambda g: self.monad.unit(g),
                                      _raw(self.monad, pairs))
        name = sexpr.symbol(x)
        if name in self.generators:
            return self.monad.unit(name)
        raise ValueError(f"unknown generator {name}")

    def to_sexpr(self, b):
        return ["lin"] + [[self.sr.show(c), g] for g, c in b.items_]

    def truthy(self, b):
        return len(b) > 0


def _raw(monad, pairs):
    from .monads import normalize

    return normalize(pairs, monad.sr)


def _pred_entries(x):
    if not (isinstance(x, list) and x and sexpr.symbol(x[0]) == "pred"):
        raise ValueError(f"expected a predicate literal, got {sexpr.dumps(x)}")
    for entry in x[1:]:
        if not isinstance(entry, list) or len(entry) != 2:
            raise ValueError(f"bad predicate entry {sexpr.dumps(entry)}")
        yield entry[0], BOOL.parse(entry[1])


def _const_literal(x):
    if isinstance(x, list):
        return None
    try:
        return BOOL.parse(x)
    except ValueError:
        return None


class StackPredicateAlgebra(Algebra):
    """Predicates over stacks evaluated along the transformed stack."""

    def __init__(self, monad: StackOps):
        self.monad = monad
        self.gamma = monad.gamma

    def kappa(self, p, v):
        conts = {x: v(x) for x in p.results()}
        bound = p.k + max((c.bound for c in conts.values()), default=0)

        def fn(s):
            x, rest = p.apply(s)
            return conts[x](rest)

        return StackPredicate(self.gamma, bound, fn)

    def parse(self, x):
        const = _const_literal(x)
        if const is not None:
            return StackPredicate.const(self.gamma, const)
        table = {}
        for w, b in _pred_entries(x):
            w = "" if sexpr.symbol(w) in ("", "eps") else sexpr.symbol(w)
            if any(c not in self.gamma for c in w):
                raise ValueError(f"prefix {w!r} not over {self.gamma!r}")
            table[w] = b
        return StackPredicate.from_table(self.gamma, table)

    def to_sexpr(self, b):
        return b.to_sexpr()

    def truthy(self, b):
        raise TypeError("stack predicates need a stack to evaluate")


class InfiniteStackAlgebra(Algebra):
    """Two-element algebra for a one-letter stack alphabet.

    Reading the result on an unbounded stack of the only symbol is a T-algebra
    because pushing or popping that symbol leaves such a stack unchanged.
    """

    values = (False, True)

    def __init__(self, monad: StackOps):
        if len(monad.gamma) != 1:
            raise ValueError("the unbounded-stack algebra needs a one-letter stack alphabet")
        self.monad = monad

    def kappa(self, p, v):
        x, _ = p.apply(self.monad.gamma * p.k)
        return v(x)

    def parse(self, x):
        return BOOL.parse(x)

    def to_sexpr(self, b):
        return "true" if b else "false"


class MultiStackPredicateAlgebra(Algebra):
    """Existential evaluation: some outcome satisfies its continuation predicate."""

    def __init__(self, monad: MultiStackOps):
        self.monad = monad
        self.m = monad.m
        self.gamma = monad.gamma

    def kappa(self, p, v):
        conts = {x: v(x) for x in p.results()}
        bound = p.k + max((c.bound for c in conts.values()), default=0)

        def fn(stacks):
            return any(conts[x](rest) for x, rest in p.apply(stacks))

        return MultiStackPredicate(self.m, self.gamma, bound, fn)

    def parse(self, x):
        const = _const_literal(x)
        if const is not None:
            return MultiStackPredicate.const(self.m, self.gamma, const)
        table = {}
        for w, b in _pred_entries(x):
            if self.m == 1 and not isinstance(w, list):
                w = [w]
            key = tuple("" if sexpr.symbol(s) == "eps" else sexpr.symbol(s) for s in w)
            if len(key) != self.m:
                raise ValueError(f"predicate entry needs {self.m} prefixes")
            table[key] = b
        return MultiStackPredicate.from_table(self.m, self.gamma, table)

    def to_sexpr(self, b):
        return b.to_sexpr()

    def truthy(self, b):
        raise TypeError("multi-stack predicates need stacks to evaluate")


class TapePredicateAlgebra(Algebra):
    def __init__(self, monad: TapeOps):
        self.monad = monad
        self.gamma = monad.gamma

    def kappa(self, p, v):
        conts = {x: v(x) for x in p.results()}
        bound = p.k + max((c.bound for c in conts.values()), default=0)

        def fn(pos, tape):
            x, pos2, tape2 = p.apply(pos, tape)
            return conts[x](pos2, tape2)

        return TapePredicate(self.gamma, bound, fn)

    def parse(self, x):
        const = _const_literal(x)
        if const is not None:
            return TapePredicate.const(self.gamma, const)
        table = {}
        for w, b in _pred_entries(x):
            w = sexpr.symbol(w)
            if len(w) % 2 != 1 or any(c not in self.gamma for c in w):
                raise ValueError(f"bad window {w!r}")
            table[w] = b
        return TapePredicate.from_table(self.gamma, table)

    def to_sexpr(self, b):
        return b.to_sexpr()

    def truthy(self, b):
        raise TypeError("tape predicates need a configuration to evaluate")


def default_algebra(monad: KleisliOps) -> Algebra:
    if isinstance(monad, PowersetOps):
        return OrAlgebra()
    if isinstance(monad, SemimoduleOps):
        return SemiringAlgebra(monad.sr)
    if isinstance(monad, StackOps):
        return StackPredicateAlgebra(monad)
    if isinstance(monad, MultiStackOps):
        return MultiStackPredicateAlgebra(monad)
    if isinstance(monad, TapeOps):
        return TapePredicateAlgebra(monad)
    raise TypeError(f"no default output algebra for {monad.name}")


# Automata


class AutomatonError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TAutomaton:
    monad: KleisliOps
    algebra: Algebra
    states: tuple
    inputs: tuple
    out: Mapping
    trans: Mapping
    start: Any = None

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise AutomatonError("duplicate state names")
        if TAU in self.inputs:
            raise AutomatonError("'tau' is reserved for silent steps")
        for x in self.states:
            if x not in self.out:
                raise AutomatonError(f"no output for state {x}")
            for a in self.inputs:
                if (a, x) not in self.trans:
                    raise AutomatonError(f"no transition for ({a}, {x})")
        if self.has_tau:
            for x in self.states:
                if (TAU, x) not in self.trans:
                    raise AutomatonError(f"silent transitions must be total; missing ({TAU}, {x})")
        for (a, x), p in self.trans.items():
            if x not in self.out or (a not in self.inputs and a != TAU):
                raise AutomatonError(f"transition on unknown key ({a}, {x})")
            stray = self.monad.support(p) - set(self.states)
            if stray:
                raise AutomatonError(f"transition ({a}, {x}) mentions unknown states {sorted(stray, key=order_key)}")
        if self.start is not None and self.start not in self.out:
            raise AutomatonError(f"unknown start state {self.start}")

    @cached_property
    def has_tau(self) -> bool:
        return any(a == TAU for a, _ in self.trans)

    def t(self, a, x):
        return self.trans[(a, x)]

    def o(self, x):
        return self.out[x]


def trace(m: TAutomaton, x, w: Iterable[str]):
    """Trace value of ``x`` on ``w``, by recursion on the word from the right."""
    w = list(w)
    for a in w:
        if a not in m.inputs:
            raise AutomatonError(f"letter {a!r} is not an input of the automaton")
    values = dict(m.out)
    for a in reversed(w):
        prev = values
        values = {y: m.algebra.kappa(m.trans[(a, y)], prev.__getitem__) for y in m.states}
    return values[x]


def words(inputs: Iterable[str], max_len: int):
    """All words up to ``max_len`` in shortlex order."""
    letters = sorted(inputs)
    for n in range(max_len + 1):
        for w in itertools.product(letters, repeat=n):
            yield "".join(w)


# Moore automata and the generalized powerset construction


@dataclass(frozen=True, eq=False)
class MooreAutomaton:
    states: tuple
    inputs: tuple
    out: Mapping
    delta: Mapping
    start: Any
    labels: Mapping = field(default_factory=dict)

    def __post_init__(self):
        for s in self.states:
            if s not in self.out:
                raise AutomatonError(f"no output for {s}")
            for a in self.inputs:
                if (s, a) not in self.delta:
                    raise AutomatonError(f"no transition for ({s}, {a})")

    def run(self, w, state=None):
        s = self.start if state is None else state
        for a in w:
            s = self.delta[(s, a)]
        return s

    def output(self, w, state=None):
        return self.out[self.run(w, state)]


def moore_output(m: MooreAutomaton, w):
    return m.output(w)


class PowersetCoalgebra:
    """Deterministic coalgebra on TX induced by an automaton."""

    def __init__(self, m: TAutomaton):
        self.m = m

    def out(self, p):
        return self.m.algebra.kappa(p, self.m.out.__getitem__)

    def deriv(self, p, a):
        m = self.m
        return m.monad.kleisli(lambda x: m.trans[(a, x)], p)

    def initial(self, x):
        return self.m.monad.unit(x)


def explore(coalg, start, inputs, max_states=DEFAULT_MAX_STATES, name=str):
    """Reachable part of a deterministic coalgebra as a Moore automaton."""
    inputs = tuple(inputs)
    index = {start: 0}
    order = [start]
    delta = {}
    queue = deque([start])
    while queue:
        p = queue.popleft()
        for a in inputs:
            q = coalg.deriv(p, a)
            if q not in index:
                if len(order) >= max_states:
                    return BudgetExhausted(max_states, len(order))
                index[q] = len(order)
                order.append(q)
                queue.append(q)
            delta[(index[p], a)] = index[q]
    labels = {}
    for i, p in enumerate(order):
        label = name(p)
        if label in labels.values():
            label = f"{label}#{i}"
        labels[i] = label
    out = {i: coalg.out(p) for i, p in enumerate(order)}
    states = tuple(range(len(order)))
    return MooreAutomaton(states, inputs, out, delta, 0, labels)


def determinize(m: TAutomaton, x0, max_states: int = DEFAULT_MAX_STATES):
    coalg = PowersetCoalgebra(m)
    return explore(coalg, coalg.initial(x0), m.inputs, max_states, m.monad.show)


def rational_closure(series, inputs, max_states: int = DEFAULT_MAX_STATES):
    """Derivative closure of a series object with ``out()`` and ``deriv(a)``."""
    return explore(_SeriesCoalgebra(), series, inputs, max_states, str)


class _SeriesCoalgebra:
    def out(self, s):
        return s.out()

    def deriv(self, s, a):
        return s.deriv(a)


def bisimilar(c1, s1, c2, s2, inputs, eq=None, max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    """Breadth-first product search; returns a shortest distinguishing word."""
    eq = eq or (lambda b, c: b == c)
    inputs = sorted(inputs)
    seen = {(s1, s2)}
    queue = deque([(s1, s2, "")])
    while queue:
        p, q, w = queue.popleft()
        if not eq(c1.out(p), c2.out(q)):
            return Verdict(False, w)
        for a in inputs:
            pair = (c1.deriv(p, a), c2.deriv(q, a))
            if pair not in seen:
                if len(seen) >= max_states:
                    return Verdict(None, reason=f"budget of {max_states} state pairs exhausted")
                seen.add(pair)
                queue.append(pair + (w + a,))
    return Verdict(True)


def trace_equiv(m1: TAutomaton, x1, m2: TAutomaton, x2, mode="exact",
                bound: int = 8, max_states: int = DEFAULT_MAX_STATES) -> Verdict:
    if set(m1.inputs) != set(m2.inputs):
        raise AutomatonError("trace equivalence needs the same input alphabet")
    if mode == "bounded":
        return bounded_equiv(lambda w: trace(m1, x1, w), lambda w: trace(m2, x2, w),
                             m1.inputs, bound, m1.algebra.eq)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    c1, c2 = PowersetCoalgebra(m1), PowersetCoalgebra(m2)
    return bisimilar(c1, c1.initial(x1), c2, c2.initial(x2), m1.inputs,
                     m1.algebra.eq, max_states)


def bounded_equiv(f1: Callable[[str], Any], f2: Callable[[str], Any], inputs, bound: int,
                  eq=None) -> Verdict:
    eq = eq or (lambda b, c: b == c)
    for w in words(inputs, bound):
        if not eq(f1(w), f2(w)):
            return Verdict(False, w)
    return Verdict(True)


def automaton_from_terms(monad: KleisliOps, inputs, spec: Mapping, algebra: Algebra = None,
                         start=None) -> TAutomaton:
    """Build an automaton from ``{state: (output, {input: term})}``.

    Terms may be given as text in term syntax or as ``terms.Term`` values.
    """
    algebra = algebra or default_algebra(monad)
    states = tuple(spec)
    out, trans = {}, {}
    for x, (b, moves) in spec.items():
        out[x] = b
        for a, t in moves.items():
            if isinstance(t, str):
                t = terms.loads(t)
            trans[(a, x)] = monad.from_term(t)
    return TAutomaton(monad, algebra, states, tuple(inputs), out, trans,
                      start if start is not None else (states[0] if states else None))
