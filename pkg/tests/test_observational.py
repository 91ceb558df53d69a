import random

import pytest
from hypothesis import given, strategies as st

import gen
from oracles import all_words, enfa_accepts, is_anbn
from tautomata import catalog
from tautomata.automata import (TAU, AutomatonError, MooreAutomaton, OrAlgebra, PlainAlgebra,
                                SemiringAlgebra, TAutomaton, determinize, trace, words)
from tautomata.machines import dtm_to_rdtm, rdtm_accepts, rdtm_to_tape_automaton
from tautomata.monads import IdentityOps, PowersetOps, SemimoduleOps, normalize
from tautomata.observational import (BOOL_OMEGA, CpsOps, OmegaMonoid, cps_transform, obs_trace,
                                     semiring_omega, series_sum, tau_eliminate)
from tautomata.results import Accept, BudgetExhausted, Unknown
from tautomata.semirings import NAT, REAL


def enfa(delta, eps, final, states, inputs="ab"):
    trans = {(a, x): frozenset(delta.get((x, a), ())) for x in states for a in inputs}
    trans.update({(TAU, x): frozenset(eps.get(x, ())) for x in states})
    out = {x: x in final for x in states}
    return TAutomaton(PowersetOps(), OrAlgebra(), tuple(states), tuple(inputs), out, trans, states[0])


# Continuation tables


def test_cps_unit_and_bind_laws():
    ops = CpsOps(("x", "y"), (False, True))
    p = ops.element(lambda k: k("x") and not k("y"))
    f = {"x": ops.unit("y"), "y": ops.element(lambda k: k("x") or k("y"))}
    assert ops.kleisli(ops.unit, p) == p
    assert ops.kleisli(f.__getitem__, ops.unit("x")) == f["x"]
    g = {"x": ops.unit("x"), "y": ops.element(lambda k: not k("x"))}
    lhs = ops.kleisli(g.__getitem__, ops.kleisli(f.__getitem__, p))
    rhs = ops.kleisli(lambda y: ops.kleisli(g.__getitem__, f[y]), p)
    assert lhs == rhs


def test_nfa_cps_trace():
    m = catalog.powerset_example()
    c = cps_transform(m)
    assert trace(c, "q0", "bb") is True
    for w in words("ab", 6):
        assert trace(c, "q0", w) == trace(m, "q0", w)


def test_identity_monad_tables_evaluate_at_the_state():
    ops = IdentityOps()
    trans = {("a", "x"): "y", ("a", "y"): "x"}
    m = TAutomaton(ops, PlainAlgebra((0, 1)), ("x", "y"), ("a",), {"x": 0, "y": 1}, trans, "x")
    c = cps_transform(m)
    for key, target in trans.items():
        assert c.trans[key] == c.monad.unit(target)


@given(seed=st.integers(0, 10**9))
def test_cps_preserves_powerset_traces(seed):
    m = gen.powerset_automaton(random.Random(seed))
    c = cps_transform(m)
    for w in words("ab", 6):
        assert trace(c, m.start, w) == trace(m, m.start, w)
    assert not isinstance(determinize(c, m.start), BudgetExhausted)


@given(seed=st.integers(0, 10**9))
def test_cps_preserves_stack_traces(seed):
    m = gen.finite_stack_automaton(random.Random(seed))
    c = cps_transform(m)
    for w in words("ab", 6):
        assert trace(c, m.start, w) == trace(m, m.start, w)
    assert not isinstance(determinize(c, m.start), BudgetExhausted)


def test_cps_needs_finite_outputs():
    with pytest.raises(AutomatonError):
        cps_transform(catalog.counting_example())


# Silent steps


def test_single_silent_step():
    m = enfa({}, {"q0": {"q1"}}, {"q1"}, ("q0", "q1"))
    v = tau_eliminate(m, BOOL_OMEGA)
    assert v.out["q0"] is True
    assert obs_trace(m, "q0", "") is True


def test_no_silent_steps_gives_cps_transform():
    m = catalog.powerset_example()
    v = tau_eliminate(m, BOOL_OMEGA)
    c = cps_transform(m)
    assert v.trans == c.trans and v.out == c.out


def test_silent_cycle_saturates():
    m = enfa({("q0", "a"): {"q1"}}, {"q0": {"q0"}}, {"q1"}, ("q0", "q1"))
    history = []
    v = tau_eliminate(m, BOOL_OMEGA, history)
    for w in all_words("ab", 4):
        assert trace(v, "q0", w) == (w == ("a",))
    # saturation only grows
    for partials in history:
        for before, after in zip(partials, partials[1:]):
            assert all(BOOL_OMEGA.leq(b, c) for b, c in zip(before, after))


def test_missing_sum_structure_is_refused():
    m = enfa({}, {"q0": {"q1"}}, {"q1"}, ("q0", "q1"))
    with pytest.raises(TypeError):
        tau_eliminate(m, None)


@given(seed=st.integers(0, 10**9))
def test_tau_elimination_matches_closure_oracle(seed):
    m = gen.powerset_automaton(random.Random(seed), n_states=5, tau=True)
    delta, eps, final = gen.enfa_tables(m)
    v = tau_eliminate(m, BOOL_OMEGA)
    for w in all_words("ab", 6):
        expected = enfa_accepts(m.start, delta, eps, final, w)
        assert trace(v, m.start, w) == expected
        assert obs_trace(m, m.start, w) == expected


def _geometric(sr, loop):
    ops = SemimoduleOps(sr)
    trans = {("a", "x"): normalize([(sr.one, "x")], sr), ("a", "y"): normalize([], sr),
             (TAU, "x"): normalize([(loop, "x"), (sr.one, "y")], sr), (TAU, "y"): normalize([], sr)}
    return TAutomaton(ops, SemiringAlgebra(sr), ("x", "y"), ("a",), {"x": sr.zero, "y": sr.one},
                      trans, "x")


def test_weighted_silent_sums():
    m = _geometric(REAL, 0.5)
    # 1 + 1/2 + 1/4 + ... silent loops before reaching y
    assert obs_trace(m, "x", "") == pytest.approx(2.0, abs=1e-6)
    assert obs_trace(m, "x", "a") == pytest.approx(4.0, abs=1e-6)
    assert obs_trace(_geometric(NAT, 1), "x", "", fuel=500) is Unknown


def test_partial_sums():
    omega = semiring_omega(REAL)
    total = series_sum((1.0,), lambda v: (v[0] / 2,), omega)
    assert total[0] == pytest.approx(2.0)
    stuck = OmegaMonoid(0, lambda a, b: a + b, False, max_steps=50)
    assert series_sum((1,), lambda v: v, stuck) is Unknown


def test_no_silent_steps_obs_equals_trace():
    m = catalog.powerset_example()
    for w in words("ab", 5):
        assert obs_trace(m, "q0", w) == trace(m, "q0", w)
    aut, x, stacks = catalog.anbncn_automaton()
    for w in ["abc", "aabbcc", "abcc", ""]:
        assert obs_trace(aut, x, w, store=stacks) == trace(aut, x, w)(stacks)


def test_tape_automaton_from_machine():
    aut, x = rdtm_to_tape_automaton(dtm_to_rdtm(catalog.anbn_dtm()))
    assert obs_trace(aut, x, "ab", fuel=500) is True
    assert obs_trace(aut, x, "ba", fuel=500) is False
    assert obs_trace(aut, x, "aabb", fuel=5) is Unknown


def test_tape_obs_matches_machine():
    r = dtm_to_rdtm(catalog.anbn_dtm())
    aut, x = rdtm_to_tape_automaton(r)
    for w in all_words("ab", 6):
        fuel = 10 * len(w) ** 2 + 200
        assert obs_trace(aut, x, w, fuel=fuel) == (rdtm_accepts(r, w, fuel=fuel) is Accept) == is_anbn(w)


def test_silent_loop_machine_saturates():
    # a silent self-loop that never writes: the search runs out of configurations
    from tautomata.machines import RDTM
    delta = {("p", TAU, "_"): ("p", "_", "N"), ("p", "a", "_"): ("f", "_", "N")}
    r = RDTM(("p", "f"), ("a",), "_", "p", frozenset({"f"}), delta).validate()
    aut, x = rdtm_to_tape_automaton(r)
    for fuel in (10, 1000):
        assert obs_trace(aut, x, "", fuel=fuel) is False
        assert obs_trace(aut, x, "a", fuel=fuel) is True


def test_moore_automaton_output():
    m = MooreAutomaton((0, 1), ("a",), {0: "even", 1: "odd"}, {(0, "a"): 1, (1, "a"): 0}, 0)
    assert [m.output("a" * n) for n in range(3)] == ["even", "odd", "even"]
