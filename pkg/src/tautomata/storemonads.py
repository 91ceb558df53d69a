"""Finite tables for the stack monad, its multi-stack/nondeterministic tensors,
and the tape monad.

Every element inspects a bounded part of the store: a stack prefix of length
at most ``k`` or a head window of radius ``k``. Tables are dense over that
domain; equality compares the tables after shrinking ``k`` to its least value.
"""

from __future__ import annotations

import itertools
from functools import cached_property, lru_cache
from typing import Any, Callable, Mapping

from . import terms
from .monads import KleisliOps, order_key

BLANK = "_"
DEFAULT_CAP = 6


class StoreBoundError(ValueError):
    """Raised when a composite would exceed the configured locality cap."""


@lru_cache(maxsize=None)
def prefixes(gamma: str, k: int) -> tuple[str, ...]:
    """All words over ``gamma`` of length at most ``k``, shortest first."""
    out = []
    for n in range(k + 1):
        out.extend("".join(w) for w in itertools.product(gamma, repeat=n))
    return tuple(out)


@lru_cache(maxsize=None)
def windows(gamma: str, k: int) -> tuple[str, ...]:
    return tuple("".join(w) for w in itertools.product(gamma, repeat=2 * k + 1))


def _check_cap(k: int, cap: int):
    if k > cap:
        raise StoreBoundError(f"locality bound {k} exceeds the cap {cap}")


# Deterministic stack


class StackElement:
    """Bounded stack transformer: ``table[w] = (result, new_prefix)``."""

    __slots__ = ("gamma", "k", "table", "__dict__")

    def __init__(self, gamma: str, k: int, table: Mapping[str, tuple[Any, str]]):
        self.gamma = gamma
        self.k = k
        self.table = dict(table)

    def apply(self, s: str) -> tuple[Any, str]:
        if len(s) >= self.k:
            r, t = self.table[s[: self.k]]
            return r, t + s[self.k:]
        return self.table[s]

    def results(self) -> frozenset:
        return frozenset(r for r, _ in self.table.values())

    @cached_property
    def minimized(self) -> "StackElement":
        for j in range(self.k + 1):
            if all(
                self.table[w] == _shift_stack(self.table[w[:j]], w[j:])
                for w in prefixes(self.gamma, self.k)
                if len(w) >= j
            ):
                if j == self.k:
                    return self
                return StackElement(self.gamma, j, {w: self.table[w] for w in prefixes(self.gamma, j)})
        return self

    @cached_property
    def _key(self):
        m = self.minimized
        return (m.gamma, m.k, tuple(m.table[w] for w in prefixes(m.gamma, m.k)))

    def __eq__(self, other):
        return isinstance(other, StackElement) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        m = self.minimized
        cells = ", ".join(f"{w or 'ε'}→({r},{t or 'ε'})" for w, (r, t) in
                          ((w, m.table[w]) for w in prefixes(m.gamma, m.k)))
        return f"<stack k={m.k}: {cells}>"


def _shift_stack(entry, suffix):
    r, t = entry
    return r, t + suffix


def stack_apply(e: StackElement, s: str):
    return e.apply(s)


def stack_kleisli(f: Callable[[Any], StackElement], p: StackElement, cap: int = DEFAULT_CAP) -> StackElement:
    conts = {x: f(x).minimized for x in p.results()}
    k = p.k + max((c.k for c in conts.values()), default=0)
    _check_cap(k, cap)
    table = {}
    for w in prefixes(p.gamma, k):
        x, s = p.apply(w)
        table[w] = conts[x].apply(s)
    return StackElement(p.gamma, k, table).minimized


def minimize_bound(e):
    return e.minimized


class StackOps(KleisliOps):
    def __init__(self, gamma: str, cap: int = DEFAULT_CAP):
        if len(set(gamma)) != len(gamma) or not gamma:
            raise ValueError(f"stack alphabet must be nonempty distinct symbols: {gamma!r}")
        self.gamma = gamma
        self.cap = cap
        self.name = f"stack {gamma}"

    def unit(self, x):
        return StackElement(self.gamma, 0, {"": (x, "")})

    def kleisli(self, f, p):
        return stack_kleisli(f, p, self.cap)

    def fmap(self, f, p):
        p = p.minimized
        return StackElement(self.gamma, p.k, {w: (f(r), t) for w, (r, t) in p.table.items()})

    def support(self, p):
        return p.results()

    def operation(self, name):
        if name == "pop":
            n = len(self.gamma)
            table = {"": (n, "")}
            table.update({g: (i, "") for i, g in enumerate(self.gamma)})
            return n + 1, StackElement(self.gamma, 1, table)
        if name.startswith("push:"):
            g = name[len("push:"):]
            if g not in self.gamma or len(g) != 1:
                raise KeyError(name)
            return 1, StackElement(self.gamma, 0, {"": (0, g)})
        raise KeyError(name)

    def to_term(self, p, var=terms.Var):
        p = p.minimized

        def leaf(entry):
            x, s = entry
            return _push_chain("push:", s, var(x))

        def build(w):
            if len(w) == p.k:
                return leaf(p.table[w])
            branches = [build(w + g) for g in self.gamma]
            return terms.App("pop", tuple(branches) + (leaf(p.table[w]),))

        return build("")

    def show(self, p):
        return repr(p)


def _push_chain(prefix: str, s: str, inner: terms.Term) -> terms.Term:
    # the last symbol of the new prefix is pushed first
    out = inner
    for g in s:
        out = terms.App(prefix + g, (out,))
    return out


# Nondeterministic multi-stack (m = 1 gives the nondeterministic stack)


class MultiStackElement:
    """``table[(w_1..w_m)]`` is a frozenset of ``(result, (s_1..s_m))``."""

    __slots__ = ("m", "gamma", "k", "table", "__dict__")

    def __init__(self, m: int, gamma: str, k: int, table):
        self.m = m
        self.gamma = gamma
        self.k = k
        self.table = {w: frozenset(v) for w, v in table.items()}

    def domain(self, k=None):
        return _tuples(self.gamma, self.k if k is None else k, self.m)

    def _split(self, stacks, k):
        heads, tails = [], []
        for s in stacks:
            if len(s) >= k:
                heads.append(s[:k])
                tails.append(s[k:])
            else:
                heads.append(s)
                tails.append("")
        return tuple(heads), tails

    def apply(self, stacks: tuple[str, ...]) -> frozenset:
        heads, tails = self._split(stacks, self.k)
        return frozenset(
            (x, tuple(a + b for a, b in zip(new, tails))) for x, new in self.table[heads]
        )

    def results(self) -> frozenset:
        return frozenset(x for v in self.table.values() for x, _ in v)

    @cached_property
    def minimized(self) -> "MultiStackElement":
        for j in range(self.k + 1):
            ok = True
            for w in self.domain():
                heads, tails = self._split(w, j)
                expect = frozenset(
                    (x, tuple(a + b for a, b in zip(new, tails))) for x, new in self.table[heads]
                )
                if expect != self.table[w]:
                    ok = False
                    break
            if ok:
                if j == self.k:
                    return self
                return MultiStackElement(self.m, self.gamma, j, {w: self.table[w] for w in self.domain(j)})
        return self

    @cached_property
    def _key(self):
        e = self.minimized
        return (e.m, e.gamma, e.k,
                tuple(tuple(sorted(e.table[w], key=order_key)) for w in e.domain()))

    def __eq__(self, other):
        return isinstance(other, MultiStackElement) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        e = self.minimized
        cells = []
        for w in e.domain():
            outs = sorted(e.table[w], key=order_key)
            shown = ",".join(f"({x},{'|'.join(s or 'ε' for s in ss)})" for x, ss in outs)
            cells.append(f"{'|'.join(s or 'ε' for s in w)}→{{{shown}}}")
        return f"<multistack m={e.m} k={e.k}: {'; '.join(cells)}>"


@lru_cache(maxsize=None)
def _tuples(gamma: str, k: int, m: int):
    return tuple(itertools.product(prefixes(gamma, k), repeat=m))


def multistack_apply(e: MultiStackElement, stacks):
    return e.apply(tuple(stacks))


def multistack_kleisli(f, p: MultiStackElement, cap: int = DEFAULT_CAP) -> MultiStackElement:
    conts = {x: f(x).minimized for x in p.results()}
    k = p.k + max((c.k for c in conts.values()), default=0)
    _check_cap(k, cap)
    table = {}
    for w in p.domain(k):
        out = set()
        for x, s in p.apply(w):
            out |= conts[x].apply(s)
        table[w] = out
    return MultiStackElement(p.m, p.gamma, k, table).minimized


def ndstack_apply(e: MultiStackElement, s: str) -> frozenset:
    return frozenset((x, t[0]) for x, t in e.apply((s,)))


def ndstack_kleisli(f, p, cap: int = DEFAULT_CAP):
    return multistack_kleisli(f, p, cap)


class MultiStackOps(KleisliOps):
    def __init__(self, m: int, gamma: str, cap: int = DEFAULT_CAP):
        if m < 1:
            raise ValueError("need at least one stack")
        if len(set(gamma)) != len(gamma) or not gamma:
            raise ValueError(f"stack alphabet must be nonempty distinct symbols: {gamma!r}")
        self.m = m
        self.gamma = gamma
        self.cap = cap
        self.name = f"ndstack {gamma}" if m == 1 else f"multistack {m} {gamma}"

    @property
    def empty_prefix(self):
        return ("",) * self.m

    def element(self, k, table):
        return MultiStackElement(self.m, self.gamma, k, table)

    def unit(self, x):
        return self.element(0, {self.empty_prefix: {(x, self.empty_prefix)}})

    def kleisli(self, f, p):
        return multistack_kleisli(f, p, self.cap)

    def fmap(self, f, p):
        p = p.minimized
        return self.element(p.k, {w: {(f(x), s) for x, s in v} for w, v in p.table.items()})

    def support(self, p):
        return p.results()

    def _stack_index(self, name):
        """``pop``/``push:g`` for one stack, ``pop:i``/``push:i:g`` in general."""
        base, *rest = name.split(":")
        try:
            if base == "pop" and len(rest) <= 1:
                i = int(rest[0]) - 1 if rest else 0
                g = ""
            elif base == "push" and len(rest) in (1, 2):
                i = int(rest[0]) - 1 if len(rest) == 2 else 0
                g = rest[-1]
                if len(g) != 1 or g not in self.gamma:
                    raise KeyError(name)
            else:
                raise KeyError(name)
        except ValueError:
            raise KeyError(name) from None
        explicit = len(rest) == (2 if base == "push" else 1)
        if self.m != 1 and not explicit:
            raise KeyError(name)
        if not 0 <= i < self.m:
            raise KeyError(name)
        return i, g

    def operation(self, name):
        if name == "plus":
            return 2, self.element(0, {self.empty_prefix: {(0, self.empty_prefix), (1, self.empty_prefix)}})
        if name == "empty":
            return 0, self.element(0, {self.empty_prefix: set()})
        if name == "pop" or name.startswith("pop:"):
            i, _ = self._stack_index(name)
            n = len(self.gamma)
            table = {}
            for w in _tuples(self.gamma, 1, self.m):
                new = list(w)
                if w[i] == "":
                    table[w] = {(n, w)}
                else:
                    new[i] = ""
                    table[w] = {(self.gamma.index(w[i]), tuple(new))}
            return n + 1, self.element(1, table)
        if name.startswith("push:"):
            i, g = self._stack_index(name)
            new = list(self.empty_prefix)
            new[i] = g
            return 1, self.element(0, {self.empty_prefix: {(0, tuple(new))}})
        raise KeyError(name)

    def _op(self, base, i, *extra):
        if self.m == 1:
            return ":".join((base,) + extra)
        return ":".join((base, str(i + 1)) + extra)

    def to_term(self, p, var=terms.Var):
        p = p.minimized

        def leaf(w):
            outs = sorted(p.table[w], key=order_key)
            parts = []
            for x, ss in outs:
                t = var(x)
                for i in reversed(range(self.m)):
                    for g in ss[i]:
                        t = terms.App(self._op("push", i, g), (t,))
                parts.append(t)
            if not parts:
                return terms.app("empty")
            out = parts[-1]
            for t in reversed(parts[:-1]):
                out = terms.app("plus", t, out)
            return out

        def build(i, w):
            if i == self.m:
                return leaf(tuple(w))
            if len(w[i]) == p.k:
                return build(i + 1, w)
            branches = []
            for g in self.gamma:
                w2 = list(w)
                w2[i] += g
                branches.append(build(i, w2))
            return terms.App(self._op("pop", i), tuple(branches) + (build(i + 1, w),))

        return build(0, list(self.empty_prefix))

    def show(self, p):
        return repr(p)


def ndstack_ops(gamma: str, cap: int = DEFAULT_CAP) -> MultiStackOps:
    return MultiStackOps(1, gamma, cap)


# Tape


class TapeElement:
    """Head-relative tape action: ``table[window] = (result, shift, new_window)``.

    Windows cover offsets ``-k..k`` around the head.
    """

    __slots__ = ("gamma", "k", "table", "__dict__")

    def __init__(self, gamma: str, k: int, table):
        self.gamma = gamma
        self.k = k
        self.table = dict(table)

    def apply(self, pos: int, tape: Mapping[int, str]) -> tuple[Any, int, dict]:
        k = self.k
        window = "".join(tape.get(pos + d, BLANK) for d in range(-k, k + 1))
        x, shift, new = self.table[window]
        out = dict(tape)
        for d, c in zip(range(-k, k + 1), new):
            if c == BLANK:
                out.pop(pos + d, None)
            else:
                out[pos + d] = c
        return x, pos + shift, out

    def apply_window(self, cells: list, head: int):
        """Run on a mutable local tape (list); returns (result, new head)."""
        k = self.k
        x, shift, new = self.table["".join(cells[head - k: head + k + 1])]
        cells[head - k: head + k + 1] = list(new)
        return x, head + shift

    def results(self) -> frozenset:
        return frozenset(x for x, _, _ in self.table.values())

    @cached_property
    def minimized(self) -> "TapeElement":
        k = self.k
        for j in range(k + 1):
            lo, hi = k - j, k + j + 1
            small = {}
            ok = True
            for w in windows(self.gamma, k):
                x, shift, new = self.table[w]
                if abs(shift) > j or new[:lo] != w[:lo] or new[hi:] != w[hi:]:
                    ok = False
                    break
                entry = (x, shift, new[lo:hi])
                if small.setdefault(w[lo:hi], entry) != entry:
                    ok = False
                    break
            if ok:
                if j == k:
                    return self
                return TapeElement(self.gamma, j, small)
        return self

    @cached_property
    def _key(self):
        e = self.minimized
        return (e.gamma, e.k, tuple(e.table[w] for w in windows(e.gamma, e.k)))

    def __eq__(self, other):
        return isinstance(other, TapeElement) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        e = self.minimized
        cells = ", ".join(f"{w}→({x},{s:+d},{n})" for w, (x, s, n) in
                          ((w, e.table[w]) for w in windows(e.gamma, e.k)))
        return f"<tape k={e.k}: {cells}>"


def tape_apply(e: TapeElement, pos: int, tape: Mapping[int, str]):
    return e.apply(pos, tape)


def tape_kleisli(f, p: TapeElement, cap: int = DEFAULT_CAP) -> TapeElement:
    conts = {x: f(x).minimized for x in p.results()}
    k = p.k + max((c.k for c in conts.values()), default=0)
    _check_cap(k, cap)
    table = {}
    for w in windows(p.gamma, k):
        cells = list(w)
        x, head = p.apply_window(cells, k)
        y, head = conts[x].apply_window(cells, head)
        table[w] = (y, head - k, "".join(cells))
    return TapeElement(p.gamma, k, table).minimized


class TapeOps(KleisliOps):
    def __init__(self, gamma: str, cap: int = DEFAULT_CAP):
        if BLANK not in gamma:
            gamma = BLANK + gamma
        if len(set(gamma)) != len(gamma):
            raise ValueError(f"tape alphabet must be distinct symbols: {gamma!r}")
        self.gamma = gamma
        self.cap = cap
        self.name = f"tape {gamma}"

    def unit(self, x):
        return TapeElement(self.gamma, 0, {g: (x, 0, g) for g in self.gamma})

    def kleisli(self, f, p):
        return tape_kleisli(f, p, self.cap)

    def fmap(self, f, p):
        p = p.minimized
        return TapeElement(self.gamma, p.k, {w: (f(x), s, n) for w, (x, s, n) in p.table.items()})

    def support(self, p):
        return p.results()

    def operation(self, name):
        if name == "read":
            return len(self.gamma), TapeElement(
                self.gamma, 0, {g: (i, 0, g) for i, g in enumerate(self.gamma)})
        if name.startswith("write:"):
            g = name[len("write:"):]
            if len(g) != 1 or g not in self.gamma:
                raise KeyError(name)
            return 1, TapeElement(self.gamma, 0, {c: (0, 0, g) for c in self.gamma})
        if name in ("lmove", "rmove"):
            d = -1 if name == "lmove" else 1
            return 1, TapeElement(self.gamma, 1, {w: (0, d, w) for w in windows(self.gamma, 1)})
        raise KeyError(name)

    def to_term(self, p, var=terms.Var):
        """Read the window left to right, then write it back right to left."""
        p = p.minimized
        k = p.k

        def moves(name, n, inner):
            for _ in range(n):
                inner = terms.App(name, (inner,))
            return inner

        def finish(window):
            x, shift, new = p.table[window]
            t = moves("rmove", k + shift, var(x))
            for i in range(2 * k + 1):
                if i:
                    t = terms.App("lmove", (t,))
                t = terms.App("write:" + new[i], (t,))
            return t

        def read(prefix):
            if len(prefix) == 2 * k + 1:
                return finish(prefix)
            branches = []
            for g in self.gamma:
                nxt = read(prefix + g)
                if len(prefix) + 1 < 2 * k + 1:
                    nxt = terms.App("rmove", (nxt,))
                branches.append(nxt)
            return terms.App("read", tuple(branches))

        return moves("lmove", k, read(""))

    def show(self, p):
        return repr(p)
