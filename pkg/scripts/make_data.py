#!/usr/bin/env python3
"""Regenerate the sample files in data/ from the catalog."""

from __future__ import annotations

import argparse
from pathlib import Path

from tautomata import catalog
from tautomata import fileformats as ff
from tautomata.automata import automaton_from_terms
from tautomata.expressions.kleene import automaton_to_expr
from tautomata.expressions.reactive import ReactiveLanguage
from tautomata.machines import dpda_as_npdqrt, dtm_to_rdtm
from tautomata.monads import PowersetOps

ANBN_CFG = """\
# a^n b^n, n >= 0, in Greibach normal form
S -> a B | eps
B -> b | a B C
C -> b
"""

DYCK_CFG = """\
# balanced brackets: B derives a balanced word followed by ')'
S -> ( B S | eps
B -> ) | ( B B
"""


def eps_nfa():
    # a* b, with a silent step before the b
    return automaton_from_terms(PowersetOps(), "ab", {
        "q0": (False, {"a": "q0", "b": "(empty)", "tau": "q1"}),
        "q1": (False, {"a": "(empty)", "b": "q2", "tau": "(empty)"}),
        "q2": (True, {"a": "(empty)", "b": "(empty)", "tau": "(empty)"}),
    })


def nfa_variant():
    # like nfa.aut, but q0 drops the a-loop
    return automaton_from_terms(PowersetOps(), "ab", {
        "q0": (False, {"a": "(empty)", "b": "q1"}),
        "q1": (False, {"a": "(empty)", "b": "(plus q0 q2)"}),
        "q2": (True, {"a": "q0", "b": "(empty)"}),
    })


def files():
    nfa = catalog.powerset_example()
    lang = ReactiveLanguage(nfa.monad, nfa.inputs, nfa.algebra)
    dyck, _, dyck_store = catalog.dyck_stack_automaton()
    anbncn, _, anbncn_store = catalog.anbncn_automaton()
    yield "nfa.aut", ff.dumps(nfa)
    yield "nfa.expr", ff.dumps(ff.ExpressionFile("reactive", lang, automaton_to_expr(nfa, "q0", lang)))
    yield "nfa_variant.aut", ff.dumps(nfa_variant())
    yield "count.aut", ff.dumps(catalog.counting_example())
    yield "enfa.aut", ff.dumps(eps_nfa())
    yield "anbn.dpda", ff.dumps(catalog.anbn_dpda())
    yield "dyck.dpda", ff.dumps(catalog.dyck_dpda())
    yield "anbn.npdqrt", ff.dumps(dpda_as_npdqrt(catalog.anbn_dpda()))
    yield "dyck.aut", ff.dumps(ff.AutomatonFile(dyck, dyck_store))
    yield "anbncn.aut", ff.dumps(ff.AutomatonFile(anbncn, anbncn_store))
    yield "dyck_valence.aut", ff.dumps(catalog.dyck_valence_automaton())
    yield "anbn.dtm", ff.dumps(catalog.anbn_dtm())
    yield "anbn.rdtm", ff.dumps(dtm_to_rdtm(catalog.anbn_dtm()))
    yield "anbn.cfg", ANBN_CFG
    yield "dyck.cfg", DYCK_CFG


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default=Path(__file__).resolve().parent.parent / "data", type=Path)
    args = p.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name, text in files():
        (args.out / name).write_text(text, encoding="utf-8")
        print(f"wrote {args.out / name}")


if __name__ == "__main__":
    main()
