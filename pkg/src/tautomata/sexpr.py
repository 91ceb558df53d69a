"""Minimal s-expression reader and printer used by every file format."""

from __future__ import annotations

import re
from dataclasses import dataclass

_TOKEN = re.compile(r'\s*(?:(;[^\n]*)|(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()";]+))')


@dataclass(frozen=True)
class Str:
    """A quoted string atom, kept apart from bare symbols."""

    text: str

    def __str__(self) -> str:
        return self.text


class SexprError(ValueError):
    pass


def tokenize(text: str):
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip() == "":
                return
            raise SexprError(f"unexpected character at offset {pos}: {text[pos]!r}")
        pos = m.end()
        comment, lpar, rpar, string, atom = m.groups()
        if comment is not None:
            continue
        if lpar:
            yield "("
        elif rpar:
            yield ")"
        elif string is not None:
            yield Str(re.sub(r"\\(.)", r"\1", string))
        elif atom is not None:
            yield atom


def parse_all(text: str) -> list:
    stack: list[list] = [[]]
    for tok in tokenize(text):
        if tok == "(":
            stack.append([])
        elif tok == ")":
            if len(stack) == 1:
                raise SexprError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(tok)
    if len(stack) != 1:
        raise SexprError("unbalanced '('")
    return stack[0]


def parse(text: str):
    items = parse_all(text)
    if len(items) != 1:
        raise SexprError(f"expected exactly one expression, found {len(items)}")
    return items[0]


def _atom(x) -> str:
    if isinstance(x, Str):
        escaped = x.text.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return str(x)


def dumps(x, indent: int | None = None, _level: int = 0) -> str:
    if not isinstance(x, list):
        return _atom(x)
    flat = "(" + " ".join(dumps(y) for y in x) + ")"
    if indent is None or len(flat) + _level * indent <= 88:
        return flat
    pad = " " * (indent * (_level + 1))
    head = [dumps(y) for y in x[:1]]
    body = [pad + dumps(y, indent, _level + 1) for y in x[1:]]
    return "(" + "\n".join(head + body) + ")"


def symbol(x) -> str:
    """Text of an atom, quoted or not."""
    if isinstance(x, list):
        raise SexprError(f"expected an atom, got {dumps(x)}")
    return str(x)
