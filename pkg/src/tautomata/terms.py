"""First-order terms over a ranked signature.

Terms carry no binders; fixpoint expressions live in ``tautomata.expressions``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Mapping

from . import sexpr


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class App:
    op: str
    args: tuple = ()

    def __str__(self) -> str:
        if not self.args:
            return self.op
        return f"{self.op}({', '.join(map(str, self.args))})"


Term = Var | App


class TermError(ValueError):
    pass


@dataclass(frozen=True)
class Signature:
    operations: Mapping[str, int]

    def __post_init__(self):
        for name, arity in self.operations.items():
            if arity < 0:
                raise TermError(f"negative arity for {name}")

    def arity(self, op: str) -> int:
        return self.operations[op]

    def names(self) -> list[str]:
        return sorted(self.operations)


def app(op: str, *args) -> App:
    return App(op, tuple(args))


def check_arity(sig: Signature, t: Term) -> tuple[int, ...] | None:
    """Return None when ``t`` is well formed, else the path to the first bad node.

    A path is the sequence of child indices from the root.
    """

    def walk(u, path):
        if isinstance(u, Var):
            return None
        if u.op not in sig.operations or sig.operations[u.op] != len(u.args):
            return path
        for i, child in enumerate(u.args):
            bad = walk(child, path + (i,))
            if bad is not None:
                return bad
        return None

    return walk(t, ())


def variables(t: Term) -> list[str]:
    seen: set[str] = set()

    def walk(u):
        if isinstance(u, Var):
            seen.add(u.name)
        else:
            for child in u.args:
                walk(child)

    walk(t)
    return sorted(seen)


def operations(t: Term) -> list[str]:
    seen: set[str] = set()

    def walk(u):
        if isinstance(u, App):
            seen.add(u.op)
            for child in u.args:
                walk(child)

    walk(t)
    return sorted(seen)


def substitute(t: Term, sigma: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return sigma.get(t.name, t)
    return App(t.op, tuple(substitute(a, sigma) for a in t.args))


def evaluate(t: Term, interp: Mapping[str, Callable[..., Any]], env: Mapping[str, Any]):
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise TermError(f"unbound variable {t.name}") from None
    try:
        fn = interp[t.op]
    except KeyError:
        raise TermError(f"unknown operation {t.op}") from None
    return fn(*(evaluate(a, interp, env) for a in t.args))


def to_sexpr(t: Term):
    if isinstance(t, Var):
        return ["var", t.name]
    return [t.op] + [to_sexpr(a) for a in t.args]


def from_sexpr(x) -> Term:
    """Inverse of ``to_sexpr``; bare atoms are read as variables."""
    if not isinstance(x, list):
        return Var(sexpr.symbol(x))
    if not x:
        raise TermError("empty application")
    head = sexpr.symbol(x[0])
    if head == "var":
        if len(x) != 2:
            raise TermError("(var x) takes exactly one name")
        return Var(sexpr.symbol(x[1]))
    return App(head, tuple(from_sexpr(y) for y in x[1:]))


def dumps(t: Term) -> str:
    return sexpr.dumps(to_sexpr(t))


def loads(text: str) -> Term:
    return from_sexpr(sexpr.parse(text))
