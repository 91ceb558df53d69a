"""Surface syntax for theory terms in files.

Files write ``(push A x)``, ``(push 2 A x)``, ``(pop 2 x y z)``, ``(write a x)`` and
``(scale 3 x)``; internally these operations are named ``push:A``, ``push:2:A``,
``pop:2``, ``write:a`` and ``scale:3``.
"""

from __future__ import annotations

import re

from . import sexpr, terms
from .monads import KleisliOps
from .storemonads import MultiStackOps

LITERAL_HEADS = ("pred", "set", "lin")
_PLAIN = re.compile(r"[^\s()\";]+")


def atom(text: str):
    """A symbol, quoted when it would not survive re-reading."""
    return text if _PLAIN.fullmatch(text) else sexpr.Str(text)


def _indexed(monad) -> bool:
    return isinstance(monad, MultiStackOps) and monad.m != 1


def op_name(head: str, args: list, monad: KleisliOps | None = None) -> tuple[str, list]:
    """Map a surface head and its arguments to an internal name and term arguments."""
    if ":" in head:
        return head, args
    need = {"push": 2, "write": 2, "scale": 2}
    if head == "push" and (_indexed(monad) or (monad is None and len(args) == 3)):
        if len(args) < 3:
            raise terms.TermError("indexed push needs (push i g x)")
        return f"push:{sexpr.symbol(args[0])}:{sexpr.symbol(args[1])}", args[2:]
    if head == "pop" and _indexed(monad):
        if not args:
            raise terms.TermError("indexed pop needs (pop i ...)")
        return f"pop:{sexpr.symbol(args[0])}", args[1:]
    if head in need:
        if len(args) < need[head]:
            raise terms.TermError(f"({head} ...) needs a parameter and a subterm")
        param = args[0]
        text = sexpr.dumps(param) if isinstance(param, list) else sexpr.symbol(param)
        return f"{head}:{text}", args[1:]
    return head, args


def term_from_surface(x, monad: KleisliOps | None = None) -> terms.Term:
    if not isinstance(x, list):
        return terms.Var(sexpr.symbol(x))
    if not x:
        raise terms.TermError("empty application")
    head = sexpr.symbol(x[0])
    if head == "var":
        return terms.Var(sexpr.symbol(x[1]))
    name, args = op_name(head, x[1:], monad)
    return terms.App(name, tuple(term_from_surface(a, monad) for a in args))


def _param(text: str):
    return sexpr.parse(text) if text.startswith("(") else atom(text)


def surface_head(name: str) -> list:
    parts = name.split(":", 1)
    if len(parts) == 1:
        return [name]
    head, rest = parts
    if head == "push" and ":" in rest:
        i, g = rest.split(":", 1)
        return ["push", i, atom(g)]
    if head == "pop":
        return ["pop", rest]
    return [head, _param(rest)]


def term_to_surface(t: terms.Term, var=None):
    if isinstance(t, terms.Var):
        return var(t.name) if var else atom(t.name)
    return surface_head(t.op) + [term_to_surface(a, var) for a in t.args]


def beta_from_surface(x, monad: KleisliOps | None = None) -> terms.Term:
    """Output terms: atoms and literal lists name generators, other lists are operations."""
    if not isinstance(x, list):
        return terms.Var(sexpr.symbol(x))
    if not x:
        raise terms.TermError("empty output term")
    head = sexpr.symbol(x[0])
    if head in LITERAL_HEADS:
        return terms.Var(sexpr.dumps(x))
    name, args = op_name(head, x[1:], monad)
    return terms.App(name, tuple(beta_from_surface(a, monad) for a in args))


def _generator(name: str):
    return sexpr.parse(name) if name.startswith("(") else atom(name)


def beta_to_surface(t: terms.Term):
    return term_to_surface(t, _generator)
