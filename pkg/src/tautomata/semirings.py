"""Semirings used as coefficient domains of the semimodule monad."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Callable

from . import sexpr


@dataclass(frozen=True)
class Semiring:
    name: str
    zero: Any
    one: Any
    add: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    is_idempotent: bool = False
    parse: Callable[[Any], Any] = field(default=None, compare=False)
    show: Callable[[Any], Any] = field(default=str, compare=False)
    tolerance: float = 0.0

    def eq(self, x, y) -> bool:
        if self.tolerance:
            return abs(x - y) <= self.tolerance
        return x == y

    def is_zero(self, x) -> bool:
        return self.eq(x, self.zero)

    def leq(self, x, y) -> bool:
        """Natural order: x <= y iff x + y == y (idempotent instances only)."""
        if not self.is_idempotent:
            raise TypeError(f"{self.name} has no natural order")
        return self.add(x, y) == y

    def sum(self, xs) -> Any:
        total = self.zero
        for x in xs:
            total = self.add(total, x)
        return total


def _parse_bool(x) -> bool:
    text = sexpr.symbol(x)
    if text in ("true", "1", "#t"):
        return True
    if text in ("false", "0", "#f"):
        return False
    raise ValueError(f"not a boolean: {text}")


def _parse_nat(x) -> int:
    value = int(sexpr.symbol(x))
    if value < 0:
        raise ValueError(f"not a natural number: {value}")
    return value


def _parse_real(x) -> float:
    value = float(sexpr.symbol(x))
    if value < 0 or math.isnan(value):
        raise ValueError(f"not a nonnegative real: {value}")
    return value


def _show_real(x: float) -> str:
    return repr(float(x))


BOOL = Semiring(
    "bool", False, True,
    lambda x, y: x or y, lambda x, y: x and y,
    is_idempotent=True, parse=_parse_bool, show=lambda x: "true" if x else "false",
)
NAT = Semiring("nat", 0, 1, lambda x, y: x + y, lambda x, y: x * y, parse=_parse_nat)
REAL = Semiring(
    "real", 0.0, 1.0, lambda x, y: x + y, lambda x, y: x * y,
    parse=_parse_real, show=_show_real, tolerance=1e-9,
)


# Polycyclic monoid


@dataclass(frozen=True, order=True)
class PolyZero:
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True, order=True)
class NormalForm:
    """g_{neg[0]}^-1 ... g_{neg[-1]}^-1 g_{pos[0]} ... g_{pos[-1]}."""

    neg: tuple[int, ...] = ()
    pos: tuple[int, ...] = ()

    def __str__(self) -> str:
        if not self.neg and not self.pos:
            return "1"
        return "".join(f"g{i}'" for i in self.neg) + "".join(f"g{i}" for i in self.pos)


PolyElem = PolyZero | NormalForm
POLY_ZERO = PolyZero()
POLY_ONE = NormalForm()


def generator(i: int) -> NormalForm:
    return NormalForm((), (i,))


def inverse_generator(i: int) -> NormalForm:
    return NormalForm((i,), ())


def poly_mul(p: PolyElem, q: PolyElem) -> PolyElem:
    if isinstance(p, PolyZero) or isinstance(q, PolyZero):
        return POLY_ZERO
    left = list(p.pos)
    right = list(q.neg)
    while left and right:
        if left[-1] != right[0]:
            return POLY_ZERO
        left.pop()
        right.pop(0)
    return NormalForm(p.neg + tuple(right), tuple(left) + q.pos)


_POLY_TOKEN = re.compile(r"g(\d+)('?)")


def parse_poly(text: str) -> PolyElem:
    text = text.strip()
    if text == "0":
        return POLY_ZERO
    if text == "1":
        return POLY_ONE
    result: PolyElem = POLY_ONE
    pos = 0
    while pos < len(text):
        m = _POLY_TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"bad polycyclic word: {text!r}")
        i = int(m.group(1))
        result = poly_mul(result, inverse_generator(i) if m.group(2) else generator(i))
        pos = m.end()
    return result


def poly_key(p: PolyElem):
    if isinstance(p, PolyZero):
        return (-1, (), ())
    return (len(p.neg) + len(p.pos), p.neg, p.pos)


def finset_semiring(mul: Callable, one, is_zero: Callable[[Any], bool], name: str,
                    parse_elem: Callable[[str], Any] = None, key=None) -> Semiring:
    """Finite subsets of a monoid; elements equal to the monoid's zero are dropped."""

    def add(x, y):
        return x | y

    def times(x, y):
        return frozenset(z for a in x for b in y if not is_zero(z := mul(a, b)))

    def parse(x):
        if isinstance(x, list):
            if not x or sexpr.symbol(x[0]) != "set":
                raise ValueError(f"expected (set ...), got {sexpr.dumps(x)}")
            elems = (parse_elem(sexpr.symbol(y)) for y in x[1:])
            return frozenset(e for e in elems if not is_zero(e))
        text = sexpr.symbol(x)
        if text in ("{}", "empty"):
            return frozenset()
        elem = parse_elem(text)
        return frozenset() if is_zero(elem) else frozenset([elem])

    def show(x):
        return "(set" + "".join(" " + str(e) for e in sorted(x, key=key)) + ")"

    return Semiring(name, frozenset(), frozenset([one]), add, times,
                    is_idempotent=True, parse=parse, show=show)


def polyset(rank: int = 2) -> Semiring:
    if rank < 1:
        raise ValueError("polycyclic rank must be positive")

    def parse_elem(text):
        elem = parse_poly(text)
        if isinstance(elem, NormalForm) and any(i < 1 or i > rank for i in elem.neg + elem.pos):
            raise ValueError(f"generator out of range in {text!r} (rank {rank})")
        return elem

    sr = finset_semiring(poly_mul, POLY_ONE, lambda p: isinstance(p, PolyZero),
                         f"polyset({rank})", parse_elem, key=poly_key)
    return sr


def by_name(name: str) -> Semiring:
    name = name.strip()
    fixed = {"bool": BOOL, "nat": NAT, "real": REAL}
    if name in fixed:
        return fixed[name]
    m = re.fullmatch(r"polyset(?:\((\d+)\))?", name)
    if m:
        return polyset(int(m.group(1) or 2))
    raise ValueError(f"unknown semiring {name!r}; expected bool | nat | real | polyset(<rank>)")
