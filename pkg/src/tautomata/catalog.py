"""Small ready-made automata and machines used by the tests, scripts and data files."""

from __future__ import annotations

from .automata import (MultiStackPredicateAlgebra, StackPredicateAlgebra, TAutomaton,
                       automaton_from_terms)
from .machines import DPDA, DTM
from .automata import SemiringAlgebra
from .monads import PowersetOps, SemimoduleOps, normalize
from .semirings import NAT, POLY_ONE, generator, inverse_generator, polyset
from .storemonads import MultiStackOps, StackOps


def powerset_example() -> TAutomaton:
    """Three-state nondeterministic automaton over ``a, b``."""
    return automaton_from_terms(PowersetOps(), "ab", {
        "q0": (False, {"a": "q0", "b": "q1"}),
        "q1": (False, {"a": "(empty)", "b": "(plus q0 q2)"}),
        "q2": (True, {"a": "q0", "b": "(empty)"}),
    })


def counting_example() -> TAutomaton:
    """Weighted automaton whose trace on ``w`` from ``x`` counts the ``a`` in ``w``."""
    return automaton_from_terms(SemimoduleOps(NAT), "ab", {
        "x": (0, {"a": "(plus x y)", "b": "x"}),
        "y": (1, {"a": "y", "b": "y"}),
    })


def anbn_dpda() -> DPDA:
    """Real-time machine for ``a^n b^n``, n >= 1. The lowest counter symbol is ``B``."""
    d = {
        ("p", "a", "Z"): ("q", "BZ"),
        ("q", "a", "B"): ("q", "AB"),
        ("q", "a", "A"): ("q", "AA"),
        ("q", "b", "A"): ("r", ""),
        ("q", "b", "B"): ("f", ""),
        ("r", "b", "A"): ("r", ""),
        ("r", "b", "B"): ("f", ""),
    }
    return DPDA(("p", "q", "r", "f"), ("a", "b"), "ABZ", "Z", "p", frozenset({"f"}), d).validate()


def dyck_dpda() -> DPDA:
    """Real-time machine for balanced brackets."""
    d = {
        ("p", "(", "Z"): ("q", "BZ"),
        ("q", "(", "B"): ("q", "AB"),
        ("q", "(", "A"): ("q", "AA"),
        ("q", ")", "A"): ("q", ""),
        ("q", ")", "B"): ("p", ""),
    }
    return DPDA(("p", "q"), ("(", ")"), "ABZ", "Z", "p", frozenset({"p"}), d).validate()


def dyck_stack_automaton() -> tuple[TAutomaton, str, str]:
    """Stack automaton for balanced brackets, run on a stack holding the marker ``_``."""
    monad = StackOps("L_")
    alg = StackPredicateAlgebra(monad)
    at_bottom = alg.parse(["pred", ["_", "1"], ["L", "0"]])
    aut = automaton_from_terms(monad, "()", {
        "x": (at_bottom, {"(": "(push:L x)", ")": "(pop x d d)"}),
        "d": (alg.parse("false"), {"(": "d", ")": "d"}),
    }, alg)
    return aut, "x", "_"


def anbncn_automaton() -> tuple[TAutomaton, str, tuple]:
    """Two-stack automaton for ``a^n b^n c^n``, n >= 1, on stacks holding ``_``.

    Each ``a`` pushes a counter on both stacks; ``b`` pops the first stack and
    ``c`` the second. The first ``c`` checks that the first stack is back at
    its marker.
    """
    monad = MultiStackOps(2, "A_")
    alg = MultiStackPredicateAlgebra(monad)
    done = alg.parse(["pred", [["_", "_"], "1"]])
    no = alg.parse("false")
    aut = automaton_from_terms(monad, "abc", {
        "p": (no, {"a": "(push:1:A (push:2:A p))", "b": "(pop:1 q d d)", "c": "d"}),
        "q": (no, {"a": "d", "b": "(pop:1 q d d)", "c": "(pop:1 d (push:1:_ (pop:2 r d d)) d)"}),
        "r": (done, {"a": "d", "b": "d", "c": "(pop:2 r d d)"}),
        "d": (no, {"a": "d", "b": "d", "c": "d"}),
    }, alg)
    return aut, "p", ("_", "_")


BRACKETS = ("()", "[]", "{}", "<>")


def dyck_valence_automaton(pairs: int = 1, rank: int = 2) -> TAutomaton:
    """One-state weighted automaton over sets of polycyclic words.

    Opening bracket ``i`` multiplies by generator ``i`` and closing bracket ``i``
    by its inverse, so a word is balanced exactly when its weight contains 1.
    """
    if not 1 <= pairs <= min(rank, len(BRACKETS)):
        raise ValueError("need 1 <= pairs <= rank")
    sr = polyset(rank)
    monad = SemimoduleOps(sr)
    inputs = tuple(c for pair in BRACKETS[:pairs] for c in pair)
    trans = {}
    for i, (open_, close) in enumerate(BRACKETS[:pairs], 1):
        trans[(open_, "x")] = normalize([(frozenset({generator(i)}), "x")], sr)
        trans[(close, "x")] = normalize([(frozenset({inverse_generator(i)}), "x")], sr)
    return TAutomaton(monad, SemiringAlgebra(sr), ("x",), inputs, {"x": sr.one}, trans, "x")


def recognized(value) -> bool:
    """Acceptance by the unit weight: the value is at least ``{1}``."""
    return POLY_ONE in value


def anbn_dtm() -> DTM:
    """Marking machine for ``a^n b^n``, n >= 0: cross off an ``a`` then a ``b``."""
    d = {
        ("q0", "a"): ("q1", "X", "R"),
        ("q0", "Y"): ("q3", "Y", "R"),
        ("q0", "_"): ("qa", "_", "N"),
        ("q1", "a"): ("q1", "a", "R"),
        ("q1", "Y"): ("q1", "Y", "R"),
        ("q1", "b"): ("q2", "Y", "L"),
        ("q2", "a"): ("q2", "a", "L"),
        ("q2", "Y"): ("q2", "Y", "L"),
        ("q2", "X"): ("q0", "X", "R"),
        ("q3", "Y"): ("q3", "Y", "R"),
        ("q3", "_"): ("qa", "_", "N"),
    }
    return DTM(("q0", "q1", "q2", "q3", "qa"), ("a", "b"), "_abXY", "q0",
               frozenset({"qa"}), d).validate()
