"""Continuation-passing automata and semantics that sums over silent steps.

For a finite output set B and finite state set X, an element of the
continuation monad ``B^(B^X)`` is stored as a table indexed by all functions
``X -> B``. Silent (``tau``) steps are removed by summing over the number of
silent steps taken before each letter; for idempotent sums this is a
saturation that always terminates, otherwise partial sums must settle.
"""

from __future__ import annotations

import itertools
import operator
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from .automata import (TAU, Algebra, AutomatonError, OrAlgebra, SemiringAlgebra,
                       TAutomaton, trace)
from .monads import KleisliOps, PowersetOps, SemimoduleOps
from .results import Unknown
from .search import ControlGraph, search
from .semirings import Semiring
from .storemonads import MultiStackOps, StackOps, TapeOps

DEFAULT_FUEL = 10_000


# Continuation monad on finite sets


class CpsElement:
    """Value table of a functional ``(X -> B) -> B``.

    Functions are enumerated as tuples over ``domain`` in lexicographic order
    of value indices, so ``table[i]`` belongs to the ``i``-th tuple.
    """

    __slots__ = ("domain", "values", "table", "_hash")

    def __init__(self, domain: tuple, values: tuple, table: tuple):
        if len(table) != len(values) ** len(domain):
            raise ValueError("table must cover every function from the domain to the values")
        self.domain = domain
        self.values = values
        self.table = tuple(table)
        self._hash = None

    def index(self, f) -> int:
        get = f.__getitem__ if isinstance(f, dict) else f
        i = 0
        for x in self.domain:
            i = i * len(self.values) + _position(self.values, get(x))
        return i

    def __call__(self, f):
        return self.table[self.index(f)]

    def __eq__(self, other):
        return (isinstance(other, CpsElement) and self.domain == other.domain
                and self.table == other.table)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.domain, self.table))
        return self._hash

    def __repr__(self):
        return "<cps " + "".join(_short(b) for b in self.table) + ">"


def _position(values, b) -> int:
    for i, c in enumerate(values):
        if c == b:
            return i
    raise ValueError(f"{b!r} is not one of the output values")


def _short(b) -> str:
    if isinstance(b, bool):
        return "1" if b else "0"
    return str(b)


def functions(domain: tuple, values: tuple) -> list[tuple]:
    """All maps ``domain -> values`` as tuples, in table order."""
    return list(itertools.product(values, repeat=len(domain)))


class CpsOps(KleisliOps):
    """Continuation monad ``B^(B^X)`` restricted to one finite set ``X``."""

    def __init__(self, domain: Iterable, values: Iterable):
        self.domain = tuple(domain)
        self.values = tuple(values)
        self.name = f"cps {len(self.domain)}x{len(self.values)}"
        self._funcs = functions(self.domain, self.values)
        self._pos = {x: i for i, x in enumerate(self.domain)}

    def _as_map(self, f: tuple):
        pos = self._pos
        return lambda x: f[pos[x]]

    def element(self, fn: Callable) -> CpsElement:
        """Tabulate ``fn``, which receives each continuation as a callable."""
        return CpsElement(self.domain, self.values, tuple(fn(self._as_map(f)) for f in self._funcs))

    def unit(self, x):
        i = self._pos[x]
        return CpsElement(self.domain, self.values, tuple(f[i] for f in self._funcs))

    def kleisli(self, g, p: CpsElement):
        conts = {x: g(x) for x in self.domain}
        return self.element(lambda k: p(lambda x: conts[x](k)))

    def support(self, p):
        return frozenset(self.domain)

    def show(self, p):
        return repr(p)


class CpsAlgebra(Algebra):
    """Evaluation at the identity continuation; literals as in the source algebra."""

    def __init__(self, monad: CpsOps, source: Algebra):
        self.monad = monad
        self.source = source
        self.values = monad.values

    def kappa(self, p, v):
        return p(v)

    def eq(self, b, c):
        return self.source.eq(b, c)

    def parse(self, x):
        return self.source.parse(x)

    def to_sexpr(self, b):
        return self.source.to_sexpr(b)

    def truthy(self, b):
        return self.source.truthy(b)


def _finite_values(m: TAutomaton) -> tuple:
    values = getattr(m.algebra, "values", None)
    if values is None:
        raise AutomatonError("the output algebra is not finite; continuation tables are unavailable")
    return tuple(values)


def cps_transform(m: TAutomaton) -> TAutomaton:
    """Same outputs; each transition ``p`` becomes ``f -> algebra(T f (p))``."""
    values = _finite_values(m)
    ops = CpsOps(m.states, values)
    alg = m.algebra
    trans = {key: ops.element(lambda f, p=p: alg.kappa(p, f)) for key, p in m.trans.items()}
    return TAutomaton(ops, CpsAlgebra(ops, alg), m.states, m.inputs, dict(m.out), trans, m.start)


# Countable sums


@dataclass(frozen=True)
class OmegaMonoid:
    """Output values with a zero and a sum that extends to countable families.

    Idempotent sums are computed by saturation. Otherwise partial sums are
    accepted once they stay unchanged (up to ``eq``) for ``stable_steps``
    consecutive terms, and reported Unknown after ``max_steps`` terms.
    """

    zero: Any
    add: Callable
    idempotent: bool
    eq: Callable = operator.eq
    stable_steps: int = 10
    max_steps: int = DEFAULT_FUEL
    name: str = "omega"

    def leq(self, b, c) -> bool:
        return self.eq(self.add(b, c), c)

    def vector_add(self, u: tuple, v: tuple) -> tuple:
        return tuple(self.add(a, b) for a, b in zip(u, v))

    def vector_eq(self, u: tuple, v: tuple) -> bool:
        return all(self.eq(a, b) for a, b in zip(u, v))


BOOL_OMEGA = OmegaMonoid(False, operator.or_, True, name="bool")


def semiring_omega(sr: Semiring) -> OmegaMonoid:
    return OmegaMonoid(sr.zero, sr.add, sr.is_idempotent, sr.eq, name=sr.name)


def series_sum(first: tuple, step: Callable[[tuple], tuple], omega: OmegaMonoid,
               history: list | None = None):
    """``first + step(first) + step(step(first)) + ...`` on vectors of values.

    ``history`` (if given) receives the list of partial sums.
    """
    total = tuple(omega.zero for _ in first)
    term = first
    partials: list = []
    if history is not None:
        history.append(partials)
    if omega.idempotent:
        seen = set()
        while term not in seen:
            seen.add(term)
            total = omega.vector_add(total, term)
            partials.append(total)
            term = step(term)
        return total
    still = 0
    for _ in range(omega.max_steps):
        new = omega.vector_add(total, term)
        partials.append(new)
        still = still + 1 if omega.vector_eq(new, total) else 0
        total = new
        if still >= omega.stable_steps:
            return total
        term = step(term)
    return Unknown


def tau_eliminate(m: TAutomaton, omega: OmegaMonoid | None, history: list | None = None):
    """Automaton without silent steps whose traces are the observational traces of ``m``.

    The new transition on ``a`` from ``x`` sums, over ``i >= 0``, ``i`` silent
    steps followed by ``a``; the new output sums ``i`` silent steps followed by
    the old output. Returns Unknown if some sum does not settle. ``history``
    receives one list of partial sums per computed sum.
    """
    if omega is None:
        raise TypeError("summing over silent steps needs an omega-additive structure on the outputs")
    cps = cps_transform(m)
    if not m.has_tau:
        return cps
    ops: CpsOps = cps.monad
    states = m.states

    def step(g: tuple) -> tuple:
        env = dict(zip(states, g))
        return tuple(cps.trans[(TAU, x)](env) for x in states)

    out_vec = series_sum(tuple(m.out[x] for x in states), step, omega, history)
    if out_vec is Unknown:
        return Unknown
    trans = {}
    for a in m.inputs:
        columns = []
        for f in ops._funcs:
            cont = dict(zip(states, f))
            first = tuple(cps.trans[(a, x)](cont) for x in states)
            col = series_sum(first, step, omega, history)
            if col is Unknown:
                return Unknown
            columns.append(col)
        for i, x in enumerate(states):
            trans[(a, x)] = CpsElement(ops.domain, ops.values, tuple(col[i] for col in columns))
    out = dict(zip(states, out_vec))
    return TAutomaton(ops, cps.algebra, states, m.inputs, out, trans, m.start)


# Observational traces by configuration search


def control_graph(m: TAutomaton) -> ControlGraph:
    tau, letter = {}, {}
    for (a, x), p in m.trans.items():
        (tau if a == TAU else letter).setdefault(x, set()).update(m.monad.support(p))
    final = {x for x in m.states if _may_accept(m.out[x])}
    return ControlGraph(tau, letter, final)


def _may_accept(b) -> bool:
    const = getattr(b, "constant", None)
    if callable(const):
        return const() is not False
    return bool(b)


def _steps(monad: KleisliOps):
    """Successor function ``(element, store) -> [(state, store)]`` and store encoding."""
    if isinstance(monad, PowersetOps):
        return lambda p, store: [(y, store) for y in sorted(p, key=repr)]
    if isinstance(monad, SemimoduleOps):
        return lambda p, store: [(y, store) for y, _ in p.items_]
    if isinstance(monad, StackOps):
        return lambda p, store: [p.apply(store)]
    if isinstance(monad, MultiStackOps):
        return lambda p, store: sorted(p.apply(store), key=repr)
    if isinstance(monad, TapeOps):
        def tape_step(p, store):
            head, cells = store
            y, head2, tape2 = p.apply(head, dict(cells))
            return [(y, (head2, tuple(sorted(tape2.items()))))]
        return tape_step
    return None


def _holds(b, store, monad) -> bool:
    if isinstance(monad, TapeOps):
        head, cells = store
        return bool(b(head, dict(cells)))
    if isinstance(monad, (StackOps, MultiStackOps)):
        return bool(b(store))
    return bool(b)


def obs_trace(m: TAutomaton, x, w: Iterable[str], fuel: int = DEFAULT_FUEL, store=None,
              omega: OmegaMonoid | None = None):
    """Observational trace of ``x`` on ``w``, evaluated on ``store`` for store monads.

    Relational automata (powerset, boolean weights, stacks, tapes) are searched
    breadth first over configurations ``(state, consumed, store)``, one fuel
    unit per expansion; the result is True, False or Unknown. Tape stores are
    ``(head, cells)`` and default to the blank tape with the head at 0.
    Weighted automata over other semirings sum silent steps with partial sums.
    """
    w = tuple(w)
    monad = m.monad
    for a in w:
        if a not in m.inputs:
            raise AutomatonError(f"letter {a!r} is not an input of the automaton")
    if isinstance(monad, SemimoduleOps) and not (monad.sr.is_idempotent and _boolean(m.algebra)):
        return _weighted_obs(m, x, w, omega or semiring_omega(monad.sr), fuel)
    steps = _steps(monad)
    if steps is None:
        if not m.has_tau:
            return trace(m, x, w)
        raise AutomatonError(f"no configuration search for {monad.name}; use tau_eliminate")
    if isinstance(monad, TapeOps):
        head, cells = store if store is not None else (0, {})
        store = (head, tuple(sorted((p, c) for p, c in dict(cells).items() if c != "_")))
    elif isinstance(monad, StackOps):
        store = store if store is not None else ""
    elif isinstance(monad, MultiStackOps):
        store = tuple(store) if store is not None else monad.empty_prefix
    silent_ok, letter_ok = control_graph(m).viable_sets()
    n = len(w)

    def viable(cfg):
        return cfg[0] in (silent_ok if cfg[1] == n else letter_ok)

    def accepting(cfg):
        return cfg[1] == n and _holds(m.out[cfg[0]], cfg[2], monad)

    def successors(cfg):
        y, r, st = cfg
        if r < n:
            for z, st2 in steps(m.trans[(w[r], y)], st):
                yield (z, r + 1, st2)
        if m.has_tau:
            for z, st2 in steps(m.trans[(TAU, y)], st):
                yield (z, r, st2)

    result = search((x, 0, store), successors, accepting, viable, fuel)
    if result is Unknown:
        return Unknown
    return bool(result)


def _boolean(alg: Algebra) -> bool:
    return isinstance(alg, OrAlgebra) or (isinstance(alg, SemiringAlgebra) and alg.values is not None)


def _weighted_obs(m: TAutomaton, x, w, omega: OmegaMonoid, fuel: int):
    sr = m.monad.sr
    states = m.states
    idx = {s: i for i, s in enumerate(states)}

    def push(vec, a):
        out = [sr.zero] * len(states)
        for i, c in enumerate(vec):
            if sr.is_zero(c):
                continue
            for y, d in m.trans[(a, states[i])].items_:
                out[idx[y]] = sr.add(out[idx[y]], sr.mul(c, d))
        return tuple(out)

    def closure(vec):
        if not m.has_tau:
            return vec
        bounded = OmegaMonoid(omega.zero, omega.add, omega.idempotent, omega.eq,
                              omega.stable_steps, min(omega.max_steps, fuel), omega.name)
        return series_sum(vec, lambda v: push(v, TAU), bounded)

    vec = tuple(sr.one if s == x else sr.zero for s in states)
    for a in w:
        vec = closure(vec)
        if vec is Unknown:
            return Unknown
        vec = push(vec, a)
    vec = closure(vec)
    if vec is Unknown:
        return Unknown
    return sr.sum(sr.mul(c, m.out[s]) for s, c in zip(states, vec))
