"""Locally nameless plumbing shared by the fixpoint expression languages.

Bound variables are de Bruijn indices; free variables keep their names. Every
node class lists which of its fields are subexpressions and which of those
sit under the node's binder.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterator


class ExprError(ValueError):
    pass


class Node:
    """Base class; subclasses are frozen dataclasses."""

    children: tuple[str, ...] = ()   # fields holding one subexpression
    child_tuples: tuple[str, ...] = ()  # fields holding a tuple of subexpressions
    binds = False  # whether subexpressions sit under one new binder

    def map_children(self, fn: Callable[["Node", int], "Node"]) -> "Node":
        shift = 1 if self.binds else 0
        changes = {}
        for name in self.children:
            changes[name] = fn(getattr(self, name), shift)
        for name in self.child_tuples:
            changes[name] = tuple(_map_item(item, fn, shift) for item in getattr(self, name))
        return replace(self, **changes) if changes else self

    def iter_children(self) -> Iterator[tuple["Node", int]]:
        shift = 1 if self.binds else 0
        for name in self.children:
            yield getattr(self, name), shift
        for name in self.child_tuples:
            for item in getattr(self, name):
                yield (item[1] if isinstance(item, tuple) else item), shift


def _map_item(item, fn, shift):
    # branch lists store (letter, expr) pairs
    if isinstance(item, tuple):
        return (item[0], fn(item[1], shift))
    return fn(item, shift)


@dataclass(frozen=True)
class Bound(Node):
    index: int

    def __str__(self):
        return f"#{self.index}"


@dataclass(frozen=True)
class Free(Node):
    name: str

    def __str__(self):
        return self.name


def instantiate(body: Node, value: Node, depth: int = 0) -> Node:
    """Replace the variable bound at ``depth`` by a closed ``value``."""
    if isinstance(body, Bound):
        if body.index == depth:
            return value
        if body.index > depth:
            return Bound(body.index - 1)
        return body
    if isinstance(body, Free):
        return body
    return body.map_children(lambda c, s: instantiate(c, value, depth + s))


def abstract(body: Node, name: str, depth: int = 0) -> Node:
    """Turn free occurrences of ``name`` into the variable bound at ``depth``."""
    if isinstance(body, Free):
        return Bound(depth) if body.name == name else body
    if isinstance(body, Bound):
        return Bound(body.index + 1) if body.index >= depth else body
    return body.map_children(lambda c, s: abstract(c, name, depth + s))


def substitute_free(body: Node, name: str, value: Node) -> Node:
    """Replace free ``name`` by ``value`` (whose free names may be captured later)."""
    if isinstance(body, Free):
        return value if body.name == name else body
    if isinstance(body, Bound):
        return body
    return body.map_children(lambda c, s: substitute_free(c, name, _lift(value, s)))


def _lift(value: Node, by: int, depth: int = 0) -> Node:
    if by == 0:
        return value
    if isinstance(value, Bound):
        return Bound(value.index + by) if value.index >= depth else value
    if isinstance(value, Free):
        return value
    return value.map_children(lambda c, s: _lift(c, by, depth + s))


def free_names(e: Node) -> frozenset:
    out: set = set()

    def walk(u):
        if isinstance(u, Free):
            out.add(u.name)
        elif not isinstance(u, Bound):
            for c, _ in u.iter_children():
                walk(c)

    walk(e)
    return frozenset(out)


def loose_bound(e: Node, depth: int = 0) -> bool:
    """Whether ``e`` mentions a de Bruijn index that escapes it."""
    if isinstance(e, Bound):
        return e.index >= depth
    if isinstance(e, Free):
        return False
    return any(loose_bound(c, depth + s) for c, s in e.iter_children())


def is_closed(e: Node) -> bool:
    return not free_names(e) and not loose_bound(e)


def size(e: Node) -> int:
    return 1 + sum(size(c) for c, _ in e.iter_children())


def subexpressions(e: Node) -> Iterator[Node]:
    yield e
    for c, _ in e.iter_children():
        yield from subexpressions(c)


class NameSupply:
    """Fresh surface names for printing binders without capture."""

    def __init__(self, taken=()):
        self.taken = set(taken)

    def fresh(self, hint: str) -> str:
        hint = hint or "x"
        if hint not in self.taken:
            self.taken.add(hint)
            return hint
        i = 1
        while f"{hint}{i}" in self.taken:
            i += 1
        name = f"{hint}{i}"
        self.taken.add(name)
        return name


def hint_field():
    """Binder names are only printing hints and never affect equality."""
    return field(default="x", compare=False)


__all__ = [
    "ExprError", "Node", "Bound", "Free", "instantiate", "abstract", "substitute_free",
    "free_names", "loose_bound", "is_closed", "size", "subexpressions", "NameSupply",
    "hint_field",
]
