import itertools
import random

import pytest
from hypothesis import given, strategies as st

import gen
from conftest import DATA
from oracles import all_words, balanced, cfg_derives, is_anbn
from tautomata import catalog, fileformats, terms
from tautomata.automata import bisimilar, bounded_equiv, trace, words
from tautomata.expressions.additive import Act, Base, Fix, guardedness, tree_equal
from tautomata.expressions.algebraic import EMPTY, HOLE, AlgebraicLanguage, Plus, Seq
from tautomata.expressions.cfg import GrammarError, cfg_to_algexpr, parse_grammar
from tautomata.expressions.core import Bound, ExprError, Free, is_closed
from tautomata.expressions.kleene import automaton_to_expr, expr_to_automaton
from tautomata.expressions.reactive import (Mu, Op, ReactiveLanguage, aci_normalize, closure,
                                            mu_count)
from tautomata.monads import PowersetOps, SemimoduleOps
from tautomata.results import BudgetExhausted
from tautomata.semirings import BOOL, NAT

POW = ReactiveLanguage(PowersetOps(), "ab")


def nfa():
    return fileformats.load(DATA / "nfa.expr").expr


def test_constant_series():
    c = POW.const("true")
    assert POW.out(c) is True
    assert POW.deriv(c, "a") == c and POW.deriv(c, "b") == c
    assert closure(POW, c) == [c]


def test_nfa_expression_outputs():
    e = nfa()
    assert POW.out(e) is False
    assert POW.out(POW.deriv_word(e, "bb")) is True
    m = catalog.powerset_example()
    for w in words("ab", 7):
        assert POW.trace(e, w) == trace(m, "q0", w)


def test_nfa_closure_is_finite_and_trace_distinct():
    members = closure(POW, nfa())
    # q0, q1, the empty sum and q0 + q2: one per reachable subset of states
    assert len(members) == 4
    for u, v in itertools.combinations(members, 2):
        assert not bisimilar(POW, u, POW, v, "ab").equivalent


def test_nested_closure_contains_substituted_inner_body():
    e = POW.loads("(mu x (a (mu y (a x) (b y) (out true))) (b x) (out false))")
    members = closure(POW, e)
    inner = POW.deriv(e, "a")
    assert inner in members and is_closed(inner)
    # unfolding the inner node puts the outer expression back in place of x
    assert POW.deriv(inner, "a") == e


@given(seed=st.integers(0, 10**9))
def test_closure_size_respects_recursion_count(seed):
    e = gen.reactive_expr(random.Random(seed))
    members = closure(POW, e, max_states=5000)
    assert not isinstance(members, BudgetExhausted)


def test_derivative_is_homomorphic_on_operations():
    e1, e2 = nfa(), POW.const("true")
    raw = ReactiveLanguage(PowersetOps(), "ab", normalize=False)
    for a in "ab":
        assert raw.deriv(Op("plus", (e1, e2)), a) == Op("plus", (raw.deriv(e1, a), raw.deriv(e2, a)))


def test_open_expression_is_rejected():
    with pytest.raises(ExprError):
        POW.out(Free("x"))
    with pytest.raises(ExprError):
        POW.check(Mu((("a", Bound(1)), ("b", Bound(0))), terms.Var("true"), "x"))


def test_parser_forbids_rebinding():
    with pytest.raises(ExprError):
        POW.loads("(mu x (a (mu x (a x) (b x) (out true))) (b x) (out true))")


# Kleene conversions


def test_nfa_expression_gives_three_state_automaton():
    m, start = expr_to_automaton(POW, nfa())
    assert m.states == ("q0", "q1", "q2") and start == "q0"
    ref = catalog.powerset_example()
    for x in m.states:
        for a in "ab":
            assert m.trans[(a, x)] == ref.trans[(a, x)]
        assert m.out[x] == ref.out[x]


def test_constant_expression_gives_one_state():
    m, start = expr_to_automaton(POW, POW.const("false"))
    assert m.states == (start,)


def test_weighted_expression_over_naturals():
    lang = ReactiveLanguage(SemimoduleOps(NAT), "ab")
    e = lang.loads("(mu x (a (scale 2 x)) (b x) (out 1))")
    m, x = expr_to_automaton(lang, e)
    assert m.states == (x,)
    assert dict(m.trans[("a", x)].items_) == {x: 2}
    assert dict(m.trans[("b", x)].items_) == {x: 1}
    for w in words("ab", 5):
        assert lang.trace(e, w) == trace(m, x, w) == 2 ** w.count("a")


def test_nfa_automaton_to_expression_is_equivalent():
    m = catalog.powerset_example()
    e = automaton_to_expr(m, "q0")
    assert is_closed(e) and mu_count(e) >= 3
    assert bisimilar(POW, e, POW, nfa(), "ab").equivalent
    assert bounded_equiv(lambda w: POW.trace(e, w), lambda w: trace(m, "q0", w), "ab", 6).equivalent


def test_self_loop_automaton_gives_constant_expression():
    m, x = expr_to_automaton(POW, POW.const("true"))
    e = automaton_to_expr(m, x)
    assert isinstance(e, Mu) and e.branches == (("a", Bound(0)), ("b", Bound(0)))
    assert e.out == terms.Var("true")


def test_two_state_chain_nests_second_state():
    m, x = expr_to_automaton(POW, POW.loads("(mu x (a (mu y (a x) (b y) (out true))) (b x) (out false))"))
    e = automaton_to_expr(m, x)
    inner = e.branch("a")
    assert isinstance(inner, Mu) and inner.branch("a") == Bound(1)


@given(seed=st.integers(0, 10**9))
def test_kleene_round_trip(seed):
    e = gen.reactive_expr(random.Random(seed))
    m, x = expr_to_automaton(POW, e)
    back = automaton_to_expr(m, x, POW)
    assert bounded_equiv(lambda w: POW.trace(e, w), lambda w: POW.trace(back, w), "ab", 6).equivalent


@given(seed=st.integers(0, 10**9))
def test_operations_respect_equivalence(seed):
    rng = random.Random(seed)
    e1, e2 = gen.reactive_expr(rng), gen.reactive_expr(rng)
    m, x = expr_to_automaton(POW, e1)
    s1 = automaton_to_expr(m, x, POW)
    lhs, rhs = Op("plus", (e1, e2)), Op("plus", (s1, e2))
    # exact equivalence implies the bounded one
    assert bisimilar(POW, lhs, POW, rhs, "ab").equivalent


# Guardedness


def test_guardedness_examples():
    add = gen.additive_language()
    assert guardedness(add.loads("(mu x (act a x))"))
    g = guardedness(add.loads("(mu x (plus x true))"))
    assert not g and g.variable == "x" and g.path == (0, 0)
    alg = AlgebraicLanguage(BOOL, "ab")
    e = alg.loads("(mu x (plus (seq (act a x) y) true))")
    assert alg.guardedness(e)
    assert not alg.guardedness(alg.loads("(mu x (plus (seq x (act a y)) true))"))


def test_unguarded_expression_raises():
    add = gen.additive_language()
    with pytest.raises(ExprError):
        add.out(add.loads("(mu x (plus x true))"))


# Translations between additive and reactive expressions


def test_trbar_of_constant_replaces_branches_by_sum():
    add = gen.additive_language()
    e = add.trbar(POW.const("true"))
    assert isinstance(e, Fix)
    assert aci_normalize(e.body) == aci_normalize(
        Op("plus", (Act("a", Bound(0)), Op("plus", (Act("b", Bound(0)), Base("true"))))))


def test_tr_of_output_literal():
    add = gen.additive_language()
    e = add.tr(Base("true"))
    assert isinstance(e, Mu) and e.out == terms.Var("true")
    assert all(isinstance(b, Op) and b.op == "empty" for _, b in e.branches)


def _same_out(lang):
    return lambda s, t: lang.algebra.evaluate_term(s) == lang.algebra.evaluate_term(t)


@given(seed=st.integers(0, 10**9))
def test_tr_commutes_with_coalgebra_structure(seed):
    add = gen.additive_language()
    e = gen.guarded_additive(random.Random(seed))
    t = add.tr(e)
    assert POW.out(t) == add.out(e)
    for a in "ab":
        assert tree_equal(POW.deriv(t, a), add.tr(add.deriv(e, a)), "ab",
                          modulo_aci=True, out_equal=_same_out(POW))


@given(seed=st.integers(0, 10**9))
def test_trbar_commutes_with_coalgebra_structure(seed):
    add = gen.additive_language()
    r = gen.reactive_expr(random.Random(seed))
    t = add.trbar(r)
    assert add.out(t) == POW.out(r)
    for a in "ab":
        assert tree_equal(add.tr(add.deriv(t, a)), add.tr(add.trbar(POW.deriv(r, a))), "ab",
                          modulo_aci=True, out_equal=_same_out(POW))


@given(seed=st.integers(0, 10**9))
def test_translation_round_trip(seed):
    add = gen.additive_language()
    e = gen.guarded_additive(random.Random(seed))
    back = add.trbar(add.tr(e))
    assert bounded_equiv(lambda w: add.trace(e, w), lambda w: add.trace(back, w), "ab", 6).equivalent


# Algebraic expressions


def test_hole_outputs():
    alg = AlgebraicLanguage(BOOL, "ab")
    assert alg.out(HOLE) is False and alg.hole_out(HOLE) is True
    assert alg.hole_out(Base("true")) is False


def test_action_derivatives():
    alg = AlgebraicLanguage(BOOL, "ab")
    body = Base("true")
    assert alg.deriv(Act("a", body), "a") == body
    assert alg.deriv(Act("a", body), "b") == EMPTY


def test_sequencing_derivative():
    alg = AlgebraicLanguage(BOOL, "ab", simplify=False)
    e1, e2 = Plus(Act("a", HOLE), HOLE), Act("b", Base("true"))
    d = alg.deriv(Seq(e1, e2), "b")
    # the first part cannot read b, but its hole weight lets e2 do so
    assert alg.out(d) is True


def test_dyck_style_expression():
    alg = AlgebraicLanguage(BOOL, "()")
    e = alg.loads('(seq (mu x (plus (act "(" (seq x (act ")" x))) (hole))) true)')
    assert alg.guardedness(e)
    for w, expected in [("", True), ("()", True), ("(", False), ("(()())", True), ("())", False)]:
        assert alg.trace(e, w) is expected


def test_scalars_weight_traces():
    alg = AlgebraicLanguage(NAT, "a")
    e = alg.loads("(mu x (plus (scale 3 (act a x)) 1))")
    assert [alg.trace(e, "a" * n) for n in range(4)] == [1, 3, 9, 27]


@given(seed=st.integers(0, 10**9))
def test_hole_closed_traces_are_values(seed):
    rng = random.Random(seed)
    g = parse_grammar("S -> a S B | eps\nB -> b")
    u, alg = cfg_to_algexpr(g)
    w = gen.word(rng, "ab", 6)
    assert alg.trace(u, w) in (True, False)


# Grammar import


def _productions(g):
    return [(lhs, rhs) for lhs, rhs in g.productions]


@pytest.mark.parametrize("name,alphabet,check", [
    ("anbn.cfg", "ab", is_anbn),
    ("dyck.cfg", "()", balanced),
])
def test_grammar_import_matches_span_oracle(name, alphabet, check):
    g = parse_grammar((DATA / name).read_text())
    u, alg = cfg_to_algexpr(g)
    prods = _productions(g)
    for w in all_words(alphabet, 8):
        expected = cfg_derives(prods, g.start, w)
        assert expected == check(w)
        assert alg.trace(u, w) == expected


def test_grammar_membership_examples():
    u, alg = cfg_to_algexpr(parse_grammar((DATA / "anbn.cfg").read_text()))
    assert alg.trace(u, "aabb") is True and alg.trace(u, "aab") is False
    u, alg = cfg_to_algexpr(parse_grammar((DATA / "dyck.cfg").read_text()))
    assert alg.trace(u, "(()())") is True and alg.trace(u, "(()") is False


def test_epsilon_only_grammar():
    u, alg = cfg_to_algexpr(parse_grammar("S -> eps"))
    assert alg.out(u) is True


def test_grammar_must_be_in_greibach_form():
    with pytest.raises(GrammarError):
        parse_grammar("S -> S a | b")
    with pytest.raises(GrammarError):
        parse_grammar("S -> a b")
