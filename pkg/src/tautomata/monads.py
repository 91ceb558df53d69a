"""Kleisli triples with finite normal forms: finite powerset and free semimodules."""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any, Callable, Iterable

from . import sexpr, terms
from .semirings import BOOL, Semiring


def order_key(x):
    """Total order on the basis values we use (strings, numbers, tuples, frozensets)."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, (int, float)):
        return (1, x)
    if isinstance(x, str):
        return (2, x)
    if isinstance(x, tuple):
        return (3, tuple(order_key(y) for y in x))
    if isinstance(x, frozenset):
        return (4, tuple(sorted(order_key(y) for y in x)))
    return (5, type(x).__name__, repr(x))


class KleisliOps:
    """A monad given as a Kleisli triple, together with its theory operations.

    ``operation(name)`` returns ``(arity, element)`` where ``element`` lives over
    the variables ``0..arity-1``; the operation acts on ``TX`` by substitution.
    """

    name = "monad"

    def unit(self, x):
        raise NotImplementedError

    def kleisli(self, f: Callable, p):
        raise NotImplementedError

    def fmap(self, f: Callable, p):
        return self.kleisli(lambda x: self.unit(f(x)), p)

    def equal(self, p, q) -> bool:
        return p == q

    def support(self, p) -> frozenset:
        """Variables that can be produced by ``p``."""
        raise NotImplementedError

    def operation(self, name: str) -> tuple[int, Any]:
        raise KeyError(name)

    def apply_operation(self, name: str, *args):
        arity, elem = self.operation(name)
        if len(args) != arity:
            raise terms.TermError(f"{name} expects {arity} arguments, got {len(args)}")
        return self.kleisli(lambda i: args[i], elem)

    def interpretation(self) -> Mapping:
        return _Interpretation(self)

    def from_term(self, t: terms.Term, env: Mapping | None = None):
        """Evaluate a theory term over variables; unbound variables become units."""
        if env is None:
            env = _UnitEnv(self)
        return terms.evaluate(t, self.interpretation(), env)

    def to_term(self, p, var: Callable[[Any], terms.Term] = None) -> terms.Term:
        raise NotImplementedError(f"{self.name} elements have no term normal form")

    def show(self, p) -> str:
        return str(p)


class _Interpretation(Mapping):
    def __init__(self, monad: KleisliOps):
        self.monad = monad

    def __getitem__(self, name):
        try:
            arity, _ = self.monad.operation(name)
        except (KeyError, ValueError):
            raise KeyError(name) from None
        return lambda *args: self.monad.apply_operation(name, *args)

    def __iter__(self):
        return iter(())

    def __len__(self):
        return 0


class _UnitEnv(Mapping):
    def __init__(self, monad: KleisliOps):
        self.monad = monad

    def __getitem__(self, name):
        return self.monad.unit(name)

    def __iter__(self):
        return iter(())

    def __len__(self):
        return 0


class IdentityOps(KleisliOps):
    """Plain deterministic transitions; automata over it are Moore automata."""

    name = "id"

    def unit(self, x):
        return x

    def kleisli(self, f, p):
        return f(p)

    def support(self, p):
        return frozenset([p])

    def to_term(self, p, var=terms.Var):
        return var(p)


# Finite powerset


class PowersetOps(KleisliOps):
    name = "pow"

    def unit(self, x):
        return frozenset([x])

    def kleisli(self, f, p):
        out: set = set()
        for x in p:
            out |= f(x)
        return frozenset(out)

    def fmap(self, f, p):
        return frozenset(f(x) for x in p)

    def support(self, p):
        return frozenset(p)

    def operation(self, name):
        if name == "plus":
            return 2, frozenset([0, 1])
        if name == "empty":
            return 0, frozenset()
        raise KeyError(name)

    def to_term(self, p, var=terms.Var):
        items = sorted(p, key=order_key)
        if not items:
            return terms.app("empty")
        out = var(items[-1])
        for x in reversed(items[:-1]):
            out = terms.app("plus", var(x), out)
        return out

    def show(self, p):
        return "{" + ", ".join(str(x) for x in sorted(p, key=order_key)) + "}"


def powerset_ops() -> PowersetOps:
    return PowersetOps()


# Free semimodule


@dataclass(frozen=True)
class LinComb(Mapping):
    """Finite formal linear combination with nonzero coefficients, keys sorted."""

    items_: tuple = ()

    def __getitem__(self, x):
        for k, v in self.items_:
            if k == x:
                return v
        raise KeyError(x)

    def __iter__(self):
        return (k for k, _ in self.items_)

    def __len__(self):
        return len(self.items_)

    def __hash__(self):
        return hash(self.items_)

    def __eq__(self, other):
        if isinstance(other, LinComb):
            return self.items_ == other.items_
        return NotImplemented


def normalize(raw: Iterable[tuple[Any, Any]], sr: Semiring) -> LinComb:
    """Combine ``(coefficient, basis)`` pairs, drop zeros and sort the keys."""
    acc: dict = {}
    for c, x in raw:
        acc[x] = sr.add(acc[x], c) if x in acc else c
    items = sorted(((x, c) for x, c in acc.items() if not sr.is_zero(c)),
                   key=lambda kv: order_key(kv[0]))
    return LinComb(tuple(items))


def semimodule_kleisli(f: Callable[[Any], LinComb], p: LinComb, sr: Semiring) -> LinComb:
    return normalize(((sr.mul(c, d), y) for x, c in p.items_ for y, d in f(x).items_), sr)


class SemimoduleOps(KleisliOps):
    def __init__(self, sr: Semiring):
        self.sr = sr
        self.name = f"lincomb {sr.name}"

    def unit(self, x):
        return LinComb(((x, self.sr.one),))

    def kleisli(self, f, p):
        return semimodule_kleisli(f, p, self.sr)

    def fmap(self, f, p):
        return normalize(((c, f(x)) for x, c in p.items_), self.sr)

    def equal(self, p, q):
        if not self.sr.tolerance:
            return p == q
        keys = set(p) | set(q)
        return all(self.sr.eq(p.get(k, self.sr.zero), q.get(k, self.sr.zero)) for k in keys)

    def support(self, p):
        return frozenset(p)

    def scalar(self, r) -> LinComb:
        return normalize([(r, 0)], self.sr)

    def operation(self, name):
        if name == "plus":
            return 2, LinComb(((0, self.sr.one), (1, self.sr.one)))
        if name == "empty":
            return 0, LinComb()
        if name.startswith("scale:"):
            return 1, self.scalar(self.sr.parse(_literal(name[len("scale:"):])))
        raise KeyError(name)

    def to_term(self, p, var=terms.Var):
        parts = []
        for x, c in p.items_:
            v = var(x)
            if c != self.sr.one:
                v = terms.app("scale:" + _show_literal(self.sr.show(c)), v)
            parts.append(v)
        if not parts:
            return terms.app("empty")
        out = parts[-1]
        for v in reversed(parts[:-1]):
            out = terms.app("plus", v, out)
        return out

    def show(self, p):
        if not p:
            return "0"
        return " + ".join(f"{_show_literal(self.sr.show(c))}*{x}" for x, c in p.items_)


def _literal(text: str):
    """Scalars are embedded in operation names; sets are written as (set ...)."""
    return sexpr.parse(text) if text.startswith("(") else text


def _show_literal(x) -> str:
    return str(x)


def semimodule_ops(sr: Semiring) -> SemimoduleOps:
    return SemimoduleOps(sr)


def lincomb_to_set(p: LinComb) -> frozenset:
    return frozenset(x for x, c in p.items_ if c)


def set_to_lincomb(s: frozenset) -> LinComb:
    return normalize(((True, x) for x in s), BOOL)
