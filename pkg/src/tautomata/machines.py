"""Classical machines and their translations to and from store automata.

Stacks are strings with the top first; every stack symbol is one character.
``None`` stands for a silent (epsilon) move in push-down machines, and
``TAU`` for the silent letter of reactive Turing machines.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .automata import (TAU, MultiStackPredicate, MultiStackPredicateAlgebra,
                       StackPredicate, StackPredicateAlgebra, TAutomaton, TapePredicate,
                       TapePredicateAlgebra)
from .results import Accept, Reject, Unknown
from .search import ControlGraph, search
from .storemonads import (BLANK, MultiStackElement, MultiStackOps, StackElement, StackOps,
                          TapeElement, TapeOps, _tuples, windows)

DEFAULT_FUEL = 10_000
MOVES = {"L": -1, "N": 0, "R": 1}
SINK = "dead"


class MachineError(ValueError):
    pass


def _fresh(base: str, taken) -> str:
    name, i = base, 1
    while name in taken:
        name = f"{base}{i}"
        i += 1
    return name


def _fresh_symbol(candidates: str, taken) -> str:
    for c in candidates:
        if c not in taken:
            return c
    raise MachineError(f"no free symbol among {candidates!r}")


# Deterministic push-down automata


@dataclass(frozen=True, eq=False)
class DPDA:
    """``delta[(q, a or None, top)] = (q', pushed)``; ``pushed`` replaces the top."""

    states: tuple
    inputs: tuple
    stack: str
    bottom: str
    start: Any
    accept: frozenset
    delta: Mapping

    def problems(self) -> list[str]:
        out = []
        if self.bottom not in self.stack:
            out.append(f"bottom symbol {self.bottom!r} is not a stack symbol")
        if self.start not in self.states:
            out.append(f"unknown start state {self.start!r}")
        for (q, a, g), (q2, s) in self.delta.items():
            if q not in self.states or q2 not in self.states:
                out.append(f"row ({q}, {a}, {g}) mentions an unknown state")
            if a is not None and a not in self.inputs:
                out.append(f"row ({q}, {a}, {g}) reads an unknown letter")
            if g not in self.stack or any(c not in self.stack for c in s):
                out.append(f"row ({q}, {a}, {g}) uses an unknown stack symbol")
            if a is not None and (q, None, g) in self.delta:
                out.append(f"state {q} with top {g!r} has both a silent and a reading move")
            if g == self.bottom and not s.endswith(self.bottom):
                out.append(f"row ({q}, {a}, {g}) removes the bottom symbol")
        return out

    def validate(self):
        probs = self.problems()
        if probs:
            raise MachineError("; ".join(probs))
        return self

    @property
    def is_real_time(self) -> bool:
        return all(a is not None for _, a, _ in self.delta)


def dpda_accepts(m: DPDA, w: Iterable[str], eps_limit: int = DEFAULT_FUEL) -> bool:
    """Acceptance by final state after the whole input, silent moves included.

    Silent loops that revisit a configuration stop the run; a silent chain
    longer than ``eps_limit`` is treated as divergence.
    """
    q, st = m.start, m.bottom

    def silent(q, st, visit=None):
        seen = set()
        for _ in range(eps_limit):
            if visit is not None and visit(q):
                return q, st, True
            row = m.delta.get((q, None, st[:1]))
            if row is None or (q, st) in seen:
                return q, st, False
            seen.add((q, st))
            q, st = row[0], row[1] + st[1:]
        return q, st, False

    for a in w:
        q, st, _ = silent(q, st)
        row = m.delta.get((q, a, st[:1]))
        if row is None:
            return False
        q, st = row[0], row[1] + st[1:]
    _, _, ok = silent(q, st, lambda q: q in m.accept)
    return ok


def dpda_to_stack_automaton(m: DPDA) -> tuple[TAutomaton, Any, str]:
    """Stack automaton with the same language, from the start state on the bottom symbol.

    Missing moves lead to a rejecting sink that leaves the stack alone.
    """
    if not m.is_real_time:
        raise MachineError("only real-time machines translate directly; remove silent moves first")
    gamma = m.stack
    monad = StackOps(gamma)
    sink = _fresh("bot", m.states)
    states = tuple(m.states) + (sink,)
    trans, out = {}, {}
    for q in states:
        out[q] = StackPredicate.const(gamma, q in m.accept)
        for a in m.inputs:
            if q == sink:
                trans[(a, q)] = monad.unit(sink)
                continue
            table = {"": (sink, "")}
            for g in gamma:
                table[g] = m.delta.get((q, a, g), (sink, g))
            trans[(a, q)] = StackElement(gamma, 1, table)
    aut = TAutomaton(monad, StackPredicateAlgebra(monad), states, tuple(m.inputs), out, trans, m.start)
    return aut, m.start, m.bottom


def _stack_bound(aut: TAutomaton) -> int:
    n = 1
    for x in aut.states:
        n = max(n, aut.out[x].minimal[0])
        for a in aut.inputs:
            n = max(n, aut.trans[(a, x)].minimized.k)
    return n


def stack_automaton_to_dpda(aut: TAutomaton, x0, initial: str = "") -> DPDA:
    """Quasi real-time machine accepting where the trace from ``x0`` on ``initial`` holds.

    Control states buffer the top of the stack: silent moves pop symbols into
    the buffer until it holds as many as any transition or output inspects,
    recording the bottom marker (which always stays on the stack) when the
    stack runs out. A full buffer answers one input letter and pushes back the
    new prefix.
    """
    if not isinstance(aut.monad, StackOps):
        raise MachineError("expected a stack automaton")
    if aut.has_tau:
        raise MachineError("silent transitions are not supported here")
    gamma = aut.monad.gamma
    bottom = _fresh_symbol("□#$%", gamma)
    n = _stack_bound(aut)
    names: dict = {}

    def name(x, buf, k):
        key = (x, buf, k)
        if key not in names:
            names[key] = f"{x}[{buf}{bottom * k}]"
        return names[key]

    delta = {}
    accept = set()
    start = name(x0, "", 0)
    order = [(x0, "", 0)]
    queue = deque(order)
    seen = {order[0]}

    def visit(key):
        if key not in seen:
            seen.add(key)
            order.append(key)
            queue.append(key)
        return name(*key)

    while queue:
        x, buf, k = queue.popleft()
        here = name(x, buf, k)
        if len(buf) + k < n:
            if k == 0:
                for g in gamma:
                    delta[(here, None, g)] = (visit((x, buf + g, 0)), "")
            delta[(here, None, bottom)] = (visit((x, buf, k + 1)), bottom)
            continue
        if _pred_on_prefix(aut.out[x], buf):
            accept.add(here)
        tops = (bottom,) if k else tuple(gamma) + (bottom,)
        for a in aut.inputs:
            y, rest = aut.trans[(a, x)].minimized.apply(buf)
            target = visit((y, "", 0))
            for g in tops:
                delta[(here, a, g)] = (target, rest + g)
    states = [name(*key) for key in order]
    if initial:
        init = _fresh("init", states)
        states.insert(0, init)
        delta[(init, None, bottom)] = (start, initial + bottom)
        start = init
    return DPDA(tuple(states), tuple(aut.inputs), gamma + bottom, bottom, start,
                frozenset(accept), delta).validate()


def _pred_on_prefix(pred, buf: str) -> bool:
    """Value of a stack predicate on any stack starting with ``buf`` (or equal to it)."""
    k, table = pred.minimal
    return table[buf[:k]]


# Nondeterministic multi-stack machines


@dataclass(frozen=True, eq=False)
class NPDQRT:
    """Nondeterministic quasi real-time machine with ``m`` stacks.

    ``delta[(q, a or None, tops)]`` is a set of ``(q', pushed)`` where ``tops``
    and ``pushed`` have one entry per stack and each pushed word replaces its top.
    An empty stack shows the top ``""``. With ``by_empty`` the machine accepts
    on empty stacks instead of final states.
    """

    states: tuple
    inputs: tuple
    stack: str
    bottom: str
    m: int
    start: Any
    accept: frozenset
    delta: Mapping
    by_empty: bool = False

    def problems(self) -> list[str]:
        out = []
        if self.start not in self.states:
            out.append(f"unknown start state {self.start!r}")
        for (q, a, tops), moves in self.delta.items():
            if len(tops) != self.m:
                out.append(f"row ({q}, {a}) reads {len(tops)} tops for {self.m} stacks")
            for q2, pushed in moves:
                if q2 not in self.states or len(pushed) != self.m:
                    out.append(f"bad move {(q2, pushed)} in row ({q}, {a}, {tops})")
        return out

    def validate(self):
        probs = self.problems()
        if probs:
            raise MachineError("; ".join(probs))
        return self

    @property
    def is_real_time(self) -> bool:
        return all(a is not None for _, a, _ in self.delta)

    def initial_stacks(self):
        return (self.bottom,) * self.m


def _npdqrt_moves(m: NPDQRT, q, a, stacks):
    tops = tuple(s[:1] for s in stacks)
    for q2, pushed in m.delta.get((q, a, tops), ()):
        yield q2, tuple(p + s[1:] for p, s in zip(pushed, stacks))


def npdqrt_accepts(m: NPDQRT, w: Iterable[str], eps_limit: int | None = None,
                   fuel: int = DEFAULT_FUEL):
    """Breadth-first search over configurations; Unknown when ``fuel`` runs out.

    ``eps_limit`` bounds consecutive silent moves (default: the number of states).
    """
    w = tuple(w)
    eps_limit = len(m.states) if eps_limit is None else eps_limit
    start = (m.start, 0, m.initial_stacks(), 0)

    def accepting(cfg):
        q, i, stacks, _ = cfg
        if i != len(w):
            return False
        return all(s == "" for s in stacks) if m.by_empty else q in m.accept

    def successors(cfg):
        q, i, stacks, run = cfg
        if i < len(w):
            for q2, st in _npdqrt_moves(m, q, w[i], stacks):
                yield (q2, i + 1, st, 0)
        if run < eps_limit:
            for q2, st in _npdqrt_moves(m, q, None, stacks):
                yield (q2, i, st, run + 1)

    return search(start, successors, accepting, lambda cfg: True, fuel)


def npdqrt_with_final_states(m: NPDQRT) -> NPDQRT:
    """Final-state machine for the language an empty-storage machine accepts.

    A fresh marker goes under the original bottom of every stack; seeing all
    markers again means the original stacks are empty.
    """
    if not m.by_empty:
        return m
    marker = _fresh_symbol("⊥#$%&", m.stack)
    init = _fresh("init", m.states)
    final = _fresh("final", m.states)
    delta: dict = {}
    for (q, a, tops), moves in m.delta.items():
        if all(tops):
            delta.setdefault((q, a, tops), set()).update(moves)
            continue
        # a row for an empty stack now sees the marker, which it must keep
        seen = tuple(t or marker for t in tops)
        kept = {(q2, tuple(p + marker if not t else p for p, t in zip(pushed, tops)))
                for q2, pushed in moves}
        delta.setdefault((q, a, seen), set()).update(kept)
    marks = (marker,) * m.m
    delta[(init, None, marks)] = {(m.start, (m.bottom + marker,) * m.m)}
    for q in m.states:
        delta.setdefault((q, None, marks), set()).add((final, marks))
    return NPDQRT(tuple(m.states) + (init, final), m.inputs, m.stack + marker, marker, m.m,
                  init, frozenset({final}), {k: frozenset(v) for k, v in delta.items()})


def npdqrt_to_multistack_automaton(m: NPDQRT) -> tuple[TAutomaton, Any, tuple]:
    """Multi-stack automaton for a real-time final-state machine.

    Returns the automaton, its start state and the initial stacks. Missing moves
    go to a rejecting sink that keeps the stacks.
    """
    if m.by_empty:
        raise MachineError("convert to final-state acceptance first")
    if not m.is_real_time:
        raise MachineError("only real-time machines translate directly")
    gamma = m.stack
    monad = MultiStackOps(m.m, gamma)
    sink = _fresh("bot", m.states)
    states = tuple(m.states) + (sink,)
    trans, out = {}, {}
    for q in states:
        out[q] = MultiStackPredicate.const(m.m, gamma, q in m.accept)
        for a in m.inputs:
            if q == sink:
                trans[(a, q)] = monad.unit(sink)
                continue
            table = {}
            for tops in _tuples(gamma, 1, m.m):
                moves = m.delta.get((q, a, tops)) if all(tops) else None
                table[tops] = set(moves) if moves else {(sink, tops)}
            trans[(a, q)] = MultiStackElement(m.m, gamma, 1, table)
    alg = MultiStackPredicateAlgebra(monad)
    aut = TAutomaton(monad, alg, states, tuple(m.inputs), out, trans, m.start)
    return aut, m.start, m.initial_stacks()


def dpda_as_npdqrt(m: DPDA) -> NPDQRT:
    delta = {(q, a, (g,)): frozenset({(q2, (s,))}) for (q, a, g), (q2, s) in m.delta.items()}
    return NPDQRT(m.states, m.inputs, m.stack, m.bottom, 1, m.start, m.accept, delta)


def multistack_automaton_to_npdqrt(aut: TAutomaton, x0, initial: tuple | None = None) -> NPDQRT:
    """Quasi real-time machine accepting where the trace from ``x0`` on ``initial`` holds.

    Buffers fill one stack at a time, as in the single-stack construction.
    """
    monad = aut.monad
    if not isinstance(monad, MultiStackOps):
        raise MachineError("expected a multi-stack automaton")
    if aut.has_tau:
        raise MachineError("silent transitions are not supported here")
    k_stacks, gamma = monad.m, monad.gamma
    initial = tuple(initial) if initial is not None else ("",) * k_stacks
    bottom = _fresh_symbol("□#$%", gamma)
    n = 1
    for x in aut.states:
        n = max(n, aut.out[x].minimal[0])
        for a in aut.inputs:
            n = max(n, aut.trans[(a, x)].minimized.k)
    sym = tuple(gamma) + (bottom,)
    all_tops = list(itertools.product(sym, repeat=k_stacks))
    names: dict = {}

    def name(key):
        if key not in names:
            x, bufs = key
            names[key] = f"{x}[" + "|".join(b + bottom * k for b, k in bufs) + "]"
        return names[key]

    empty = tuple(("", 0) for _ in range(k_stacks))
    first = (x0, empty)
    order, queue, seen = [first], deque([first]), {first}

    def visit(key):
        if key not in seen:
            seen.add(key)
            order.append(key)
            queue.append(key)
        return name(key)

    delta: dict = {}
    accept = set()
    while queue:
        x, bufs = queue.popleft()
        here = name((x, bufs))
        filling = next((i for i, (b, k) in enumerate(bufs) if len(b) + k < n), None)
        if filling is not None:
            b, k = bufs[filling]
            for tops in all_tops:
                g = tops[filling]
                if k and g != bottom:
                    continue
                new = list(bufs)
                pushed = list(tops)
                if g == bottom:
                    new[filling] = (b, k + 1)
                else:
                    new[filling] = (b + g, 0)
                    pushed[filling] = ""
                target = visit((x, tuple(new)))
                delta[(here, None, tops)] = frozenset({(target, tuple(pushed))})
            continue
        contents = tuple(b for b, _ in bufs)
        k_min, table = aut.out[x].minimal
        if table[tuple(b[:k_min] for b in contents)]:
            accept.add(here)
        for a in aut.inputs:
            results = aut.trans[(a, x)].minimized.apply(contents)
            for tops in all_tops:
                if any(k and g != bottom for (_, k), g in zip(bufs, tops)):
                    continue
                moves = {(visit((y, empty)), tuple(s + g for s, g in zip(new, tops)))
                         for y, new in results}
                delta[(here, a, tops)] = frozenset(moves)
    states = [name(key) for key in order]
    start = name(first)
    if any(initial):
        init = _fresh("init", states)
        states.insert(0, init)
        delta[(init, None, (bottom,) * k_stacks)] = frozenset(
            {(start, tuple(s + bottom for s in initial))})
        start = init
    return NPDQRT(tuple(states), tuple(aut.inputs), gamma + bottom, bottom, k_stacks, start,
                  frozenset(accept), delta).validate()


# Deterministic and reactive Turing machines


def _tape_key(tape: Mapping[int, str]) -> tuple:
    return tuple(sorted((p, c) for p, c in tape.items() if c != BLANK))


@dataclass(frozen=True, eq=False)
class DTM:
    """``delta[(q, symbol)] = (q', written, move)`` with moves ``L``, ``N``, ``R``.

    The machine halts when no row applies and accepts if it halts in ``accept``.
    """

    states: tuple
    inputs: tuple
    tape: str
    start: Any
    accept: frozenset
    delta: Mapping
    blank: str = BLANK

    def problems(self) -> list[str]:
        out = []
        if self.blank != BLANK:
            out.append(f"the blank symbol must be {BLANK!r}")
        for c in self.inputs:
            if c not in self.tape:
                out.append(f"input {c!r} is not a tape symbol")
        for (q, g), (q2, g2, mv) in self.delta.items():
            if q not in self.states or q2 not in self.states:
                out.append(f"row ({q}, {g}) mentions an unknown state")
            if g not in self.tape or g2 not in self.tape:
                out.append(f"row ({q}, {g}) uses an unknown tape symbol")
            if mv not in MOVES:
                out.append(f"row ({q}, {g}) has bad move {mv!r}")
        return out

    def validate(self):
        probs = self.problems()
        if probs:
            raise MachineError("; ".join(probs))
        return self


def dtm_run(m: DTM, w: Iterable[str], fuel: int = DEFAULT_FUEL):
    tape = {i: c for i, c in enumerate(w) if c != BLANK}
    q, head = m.start, 0
    for _ in range(fuel + 1):
        row = m.delta.get((q, tape.get(head, BLANK)))
        if row is None:
            return Accept if q in m.accept else Reject
        q, g, mv = row
        if g == BLANK:
            tape.pop(head, None)
        else:
            tape[head] = g
        head += MOVES[mv]
    return Unknown


class _FinalStates:
    def __init__(self, test):
        self.test = test

    def __contains__(self, q):
        return self.test(q)


@dataclass(frozen=True, eq=False)
class RDTM:
    """Reactive Turing machine: ``delta[(q, a or TAU, symbol)] = (q', written, move)``.

    Letter moves are deterministic; a silent move may be taken in any
    configuration where a row exists. A word is accepted if some run consumes
    it and reaches a final state. ``control`` may supply an abstraction of the
    states used to prune the search; by default it is computed from ``delta``.
    """

    states: Any
    inputs: tuple
    tape: str
    start: Any
    accept: Any
    delta: Mapping
    control: tuple | None = None
    blank: str = BLANK
    _graph: dict = field(default_factory=dict, repr=False)

    def problems(self) -> list[str]:
        out = []
        if self.blank != BLANK:
            out.append(f"the blank symbol must be {BLANK!r}")
        if TAU in self.inputs:
            out.append(f"{TAU!r} is reserved for silent moves")
        if isinstance(self.states, (tuple, list, frozenset, set)):
            for (q, a, g), (q2, g2, mv) in self.delta.items():
                if q not in self.states or q2 not in self.states:
                    out.append(f"row ({q}, {a}, {g}) mentions an unknown state")
                if a != TAU and a not in self.inputs:
                    out.append(f"row ({q}, {a}, {g}) reads an unknown letter")
                if g not in self.tape or g2 not in self.tape:
                    out.append(f"row ({q}, {a}, {g}) uses an unknown tape symbol")
                if mv not in MOVES:
                    out.append(f"row ({q}, {a}, {g}) has bad move {mv!r}")
        return out

    def validate(self):
        probs = self.problems()
        if probs:
            raise MachineError("; ".join(probs))
        return self

    def control_graph(self) -> tuple:
        """``(node_of_state, ControlGraph)`` used for pruning."""
        if self.control is not None:
            return self.control
        if "g" not in self._graph:
            tau, letter = {}, {}
            for (q, a, _), (q2, _, _) in self.delta.items():
                (tau if a == TAU else letter).setdefault(q, set()).add(q2)
            final = {q for q in self.states if q in self.accept}
            self._graph["g"] = (lambda q: q, ControlGraph(tau, letter, final))
        return self._graph["g"]


def rdtm_accepts(m: RDTM, w: Iterable[str], fuel: int = DEFAULT_FUEL):
    """Accept, Reject, or Unknown after ``fuel`` configuration expansions.

    Configurations are ``(state, consumed, head, tape)``; those whose control
    state cannot reach a final state with the remaining input are pruned.
    """
    w = tuple(w)
    node, graph = m.control_graph()
    silent_ok, letter_ok = graph.viable_sets()

    def viable(cfg):
        q, r = cfg[0], cfg[1]
        return node(q) in (silent_ok if r == len(w) else letter_ok)

    def accepting(cfg):
        return cfg[1] == len(w) and cfg[0] in m.accept

    def step(q, head, tape, row):
        q2, g, mv = row
        new = dict(tape)
        if g == BLANK:
            new.pop(head, None)
        else:
            new[head] = g
        return q2, head + MOVES[mv], tuple(sorted(new.items()))

    def successors(cfg):
        q, r, head, tape = cfg
        cells = dict(tape)
        g = cells.get(head, BLANK)
        if r < len(w):
            row = m.delta.get((q, w[r], g))
            if row is not None:
                q2, h2, t2 = step(q, head, cells, row)
                yield (q2, r + 1, h2, t2)
        row = m.delta.get((q, TAU, g))
        if row is not None:
            q2, h2, t2 = step(q, head, cells, row)
            yield (q2, r, h2, t2)

    return search((m.start, 0, 0, ()), successors, accepting, viable, fuel)


def dtm_to_rdtm(d: DTM) -> RDTM:
    """RDTM accepting the words on which ``d`` halts in an accepting state.

    It first copies the input letter by letter, moving right; a silent move
    then rewinds to the first cell and the machine runs ``d`` with silent
    moves only. Letters read after the copy phase lead to a dead state.
    """
    d.validate()
    names = {q: f"run:{q}" for q in d.states}
    taken = set(names.values())
    copy, rewind = _fresh("copy", taken), _fresh("rewind", taken)
    acc, rej, dead = _fresh("acc", taken), _fresh("rej", taken), _fresh(SINK, taken)
    tape = d.tape if BLANK in d.tape else BLANK + d.tape
    for c in d.inputs:
        if c not in tape:
            tape += c
    delta = {}
    for g in tape:
        for a in d.inputs:
            delta[(copy, a, g)] = (copy, a, "R")
            for q in [rewind, acc, rej, dead] + list(names.values()):
                delta[(q, a, g)] = (dead, g, "N")
        delta[(copy, TAU, g)] = (rewind, g, "L")
        delta[(rewind, TAU, g)] = (names[d.start], g, "R") if g == BLANK else (rewind, g, "L")
        for q in d.states:
            row = d.delta.get((q, g))
            if row is None:
                delta[(names[q], TAU, g)] = (acc if q in d.accept else rej, g, "N")
            else:
                q2, g2, mv = row
                delta[(names[q], TAU, g)] = (names[q2], g2, mv)
        for q in (acc, rej, dead):
            delta[(q, TAU, g)] = (q, g, "N")
    states = (copy, rewind) + tuple(names.values()) + (acc, rej, dead)
    return RDTM(states, tuple(d.inputs), tape, copy, frozenset({acc}), delta).validate()


def _require_explicit(m: RDTM):
    if not isinstance(m.states, (tuple, list)):
        raise MachineError("the machine's states are not listed; materialize it first")


def rdtm_to_tape_automaton(m: RDTM) -> tuple[TAutomaton, Any]:
    """Tape automaton with one radius-1 transition per machine move.

    Missing rows lead to a rejecting sink; outputs are constant on states.
    """
    _require_explicit(m)
    monad = TapeOps(m.tape)
    gamma = monad.gamma
    sink = _fresh(SINK, m.states)
    states = tuple(m.states) + (sink,)
    alg = TapePredicateAlgebra(monad)
    out, trans = {}, {}
    for q in states:
        out[q] = TapePredicate.const(gamma, q in m.accept)
        for a in tuple(m.inputs) + (TAU,):
            table = {}
            for win in windows(gamma, 1):
                row = m.delta.get((q, a, win[1])) if q != sink else None
                if row is None:
                    table[win] = (sink, 0, win)
                else:
                    q2, g, mv = row
                    table[win] = (q2, MOVES[mv], win[0] + g + win[2])
            trans[(a, q)] = TapeElement(gamma, 1, table)
    return TAutomaton(monad, alg, states, tuple(m.inputs), out, trans, m.start), m.start


def tape_control_graph(aut: TAutomaton) -> ControlGraph:
    tau, letter = {}, {}
    for (a, x), p in aut.trans.items():
        (tau if a == TAU else letter).setdefault(x, set()).update(aut.monad.support(p))
    final = {x for x in aut.states if aut.out[x].constant() is not False}
    return ControlGraph(tau, letter, final)


class _LazyRows(Mapping):
    def __init__(self, compute):
        self.compute = compute
        self.cache = {}

    def __getitem__(self, key):
        if key not in self.cache:
            self.cache[key] = self.compute(*key)
        return self.cache[key]

    def get(self, key, default=None):
        return self[key]

    def __iter__(self):
        return iter(self.cache)

    def __len__(self):
        return len(self.cache)


def tape_automaton_to_rdtm(aut: TAutomaton, x0) -> RDTM:
    """RDTM accepting where the observational trace of ``x0`` holds on the blank tape.

    The machine remembers the tape within a fixed radius of the head. One
    automaton step consumes its letter (or a silent move) and computes the new
    window and head shift in the control state; silent moves then walk over
    the cells that changed and the cells that enter the window, and finish on
    the new head position. Rows are computed on demand.
    """
    if not isinstance(aut.monad, TapeOps):
        raise MachineError("expected a tape automaton")
    gamma = aut.monad.gamma
    n = 1
    for x in aut.states:
        n = max(n, aut.out[x].minimal[0])
        for a in tuple(aut.inputs) + ((TAU,) if aut.has_tau else ()):
            n = max(n, aut.trans[(a, x)].minimized.k)
    dead = (SINK,)
    dead_node = object()

    def main(x, mem):
        return ("at", x, mem)

    def plan(x, mem, a):
        p = aut.trans[(a, x)]
        tape = {d - n: c for d, c in enumerate(mem) if c != BLANK}
        y, shift, new = p.apply(0, tape)
        written = "".join(new.get(d, BLANK) for d in range(-n, n + 1))
        changed = [d for d in range(-n, n + 1) if written[d + n] != mem[d + n]]
        unseen = [d for d in range(shift - n, shift + n + 1) if abs(d) > n]
        spots = changed + unseen + [0]
        lo, hi = min(spots), max(spots)
        if abs(lo) + (hi - lo) + abs(hi - shift) <= abs(hi) + (hi - lo) + abs(lo - shift):
            targets = (lo, hi, shift)
        else:
            targets = (hi, lo, shift)
        return ("walk", y, written, shift, targets, 0, 0, ())

    def walk_step(state, g):
        _, y, written, shift, targets, stage, off, extra = state
        put = written[off + n] if abs(off) <= n else g
        if abs(off) > n and abs(off - shift) <= n and off not in dict(extra):
            extra = tuple(sorted(extra + ((off, g),)))
        while stage < 3 and off == targets[stage]:
            stage += 1
        if stage == 3:
            return arrive(y, written, shift, extra), put, "N"
        mv = "R" if targets[stage] > off else "L"
        off2 = off + MOVES[mv]
        if stage == 2 and off2 == shift:
            return arrive(y, written, shift, extra), put, mv
        return ("walk", y, written, shift, targets, stage, off2, extra), put, mv

    def arrive(y, written, shift, extra):
        seen = dict(extra)
        cells = []
        for d in range(shift - n, shift + n + 1):
            cells.append(written[d + n] if abs(d) <= n else seen[d])
        return main(y, "".join(cells))

    def row(q, a, g):
        if q == dead:
            return (dead, g, "N")
        if q[0] == "walk":
            if a != TAU:
                return (dead, g, "N")
            return walk_step(q, g)
        _, x, mem = q
        if a == TAU and not aut.has_tau:
            return (dead, g, "N")
        return walk_step(plan(x, mem, a), g)

    def is_final(q):
        return q != dead and q[0] == "at" and bool(_window_pred(aut.out[q[1]], q[2], n))

    base = tape_control_graph(aut)
    graph = ControlGraph(base.tau, base.letter, base.final)

    def node(q):
        return dead_node if q == dead else q[1]

    return RDTM(None, tuple(aut.inputs), gamma, main(x0, BLANK * (2 * n + 1)),
                _FinalStates(is_final), _LazyRows(row), control=(node, graph))


def _window_pred(pred, mem: str, n: int):
    return pred(0, {d - n: c for d, c in enumerate(mem) if c != BLANK})


def materialize(m: RDTM, max_states: int = 200_000) -> RDTM:
    """Explicit copy of the part of ``m`` reachable from its start state."""
    letters = tuple(m.inputs) + (TAU,)
    order = [m.start]
    seen = {m.start}
    delta = {}
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        for a in letters:
            for g in m.tape:
                row = m.delta.get((q, a, g))
                if row is None:
                    continue
                delta[(q, a, g)] = row
                if row[0] not in seen:
                    if len(order) >= max_states:
                        raise MachineError(f"more than {max_states} reachable states")
                    seen.add(row[0])
                    order.append(row[0])
    names = {q: (q if isinstance(q, str) else f"q{j}") for j, q in enumerate(order)}
    if len(set(names.values())) != len(names):
        names = {q: f"q{j}" for j, q in enumerate(order)}
    rows = {(names[q], a, g): (names[q2], g2, mv) for (q, a, g), (q2, g2, mv) in delta.items()}
    accept = frozenset(names[q] for q in order if q in m.accept)
    return RDTM(tuple(names[q] for q in order), m.inputs, m.tape, names[m.start], accept, rows)
