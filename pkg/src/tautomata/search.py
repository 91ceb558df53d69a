"""Breadth-first configuration search with fuel and control-graph pruning."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable

from .results import Accept, Reject, Unknown


@dataclass
class ControlGraph:
    """Over-approximation of a machine's moves that ignores its storage.

    ``tau`` and ``letter`` map a control node to the nodes reachable by one silent
    or one input-consuming move; ``final`` holds nodes that may accept.
    """

    tau: dict
    letter: dict
    final: set
    _sets: tuple | None = field(default=None, repr=False)

    def nodes(self):
        out = set(self.tau) | set(self.letter) | set(self.final)
        for succ in list(self.tau.values()) + list(self.letter.values()):
            out |= set(succ)
        return out

    def viable_sets(self) -> tuple[set, set]:
        """Nodes that can accept by silent moves only, and after at least one letter."""
        if self._sets is not None:
            return self._sets
        back_tau: dict = {}
        back_any: dict = {}
        for src, dsts in self.tau.items():
            for d in dsts:
                back_tau.setdefault(d, set()).add(src)
                back_any.setdefault(d, set()).add(src)
        for src, dsts in self.letter.items():
            for d in dsts:
                back_any.setdefault(d, set()).add(src)
        silent = _backward(self.final, back_tau)
        anywhere = _backward(self.final, back_any)
        seeds = {src for src, dsts in self.letter.items() if any(d in anywhere for d in dsts)}
        after_letter = _backward(seeds, back_any)
        self._sets = (silent, after_letter)
        return self._sets


def _backward(seeds, back):
    seen = set(seeds)
    todo = list(seeds)
    while todo:
        u = todo.pop()
        for v in back.get(u, ()):
            if v not in seen:
                seen.add(v)
                todo.append(v)
    return seen


def search(start: Hashable, successors: Callable[[Hashable], Iterable[Hashable]],
           accepting: Callable[[Hashable], bool], viable: Callable[[Hashable], bool],
           fuel: int):
    """Accept if an accepting configuration is generated, Reject if the search
    space is exhausted, Unknown once ``fuel`` expansions have been spent."""
    if not viable(start):
        return Reject
    if accepting(start):
        return Accept
    seen = {start}
    queue = deque([start])
    spent = 0
    while queue:
        if spent >= fuel:
            return Unknown
        spent += 1
        cfg = queue.popleft()
        for nxt in successors(cfg):
            if nxt in seen:
                continue
            seen.add(nxt)
            if not viable(nxt):
                continue
            if accepting(nxt):
                return Accept
            queue.append(nxt)
    return Reject
