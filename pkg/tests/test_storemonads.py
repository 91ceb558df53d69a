import random

import pytest
from hypothesis import given, strategies as st

import gen
import laws
from tautomata import terms
from tautomata.storemonads import (MultiStackOps, StackElement, StackOps, StoreBoundError,
                                   TapeOps, prefixes, windows)

INSTANCES = [i for i in laws.instances() if i[2] is not None]


@pytest.mark.parametrize("label,ops,kind,make", INSTANCES, ids=[i[0] for i in INSTANCES])
@given(seed=st.integers(0, 10**9))
def test_kleisli_laws_and_probes(label, ops, kind, make, seed):
    assert laws.run_sample(ops, kind, make, random.Random(seed)) == []


class _DropContinuation(StackOps):
    """A broken bind that ignores the continuation's stack effect."""

    def kleisli(self, f, p):
        return StackElement(self.gamma, p.k, {w: (f(x).apply(s)[0], s) for w, (x, s) in p.table.items()})


def test_probe_detects_a_wrong_bind():
    rng = random.Random(3)
    ops = _DropContinuation("AB")
    found = False
    for _ in range(50):
        p = gen.stack_element(rng)
        fs = {x: gen.stack_element(rng) for x in gen.RESULTS}
        found |= laws.probe_mismatch("stack", ops, p, fs.__getitem__)
    assert found


@given(seed=st.integers(0, 10**9))
def test_stack_composite_is_local_with_summed_bound(seed):
    rng = random.Random(seed)
    ops = StackOps("AB")
    p = gen.stack_element(rng)
    fs = {x: gen.stack_element(rng) for x in gen.RESULTS}
    comp = ops.kleisli(fs.__getitem__, p)
    bound = p.minimized.k + max(fs[x].minimized.k for x in p.results())
    assert comp.k <= bound
    assert laws.stack_local(comp, bound, "AB", laws.stack_probes("AB", 6))


@given(seed=st.integers(0, 10**9))
def test_tape_composite_is_local_with_summed_bound(seed):
    rng = random.Random(seed)
    ops = TapeOps("_a")
    p = gen.tape_element(rng)
    fs = {x: gen.tape_element(rng) for x in gen.RESULTS}
    comp = ops.kleisli(fs.__getitem__, p)
    bound = p.minimized.k + max(fs[x].minimized.k for x in p.results())
    assert comp.k <= bound
    assert laws.tape_local(comp, bound, "_a", rng)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_writes_at_distance_commute(k):
    ops = TapeOps("_ab")
    for g1 in ops.gamma:
        for g2 in ops.gamma:
            lhs, rhs = laws.tape_commutation(ops, g1, g2, k)
            assert lhs == rhs
            assert lhs.minimized.k == k


def test_writes_at_same_cell_do_not_commute():
    lhs, rhs = laws.tape_commutation(TapeOps("_ab"), "a", "b", 0)
    assert lhs != rhs


def test_stack_operations():
    S = StackOps("AB")
    pop = S.from_term(terms.loads("(pop x y z)"))
    assert pop.apply("AB") == ("x", "B")
    assert pop.apply("") == ("z", "")
    push = S.from_term(terms.loads("(push:B (push:A x))"))
    assert push.apply("") == ("x", "AB")
    t = S.from_term(terms.loads("(pop (push:A x) y z)"))
    assert S.from_term(S.to_term(t)) == t
    # pushing then popping the same symbol is the identity
    assert S.from_term(terms.loads("(push:A (pop x y z))")) == S.unit("x")


def test_multistack_tensor_law():
    """Operations on different stacks commute."""
    M = MultiStackOps(2, "AB")
    a = M.from_term(terms.loads("(push:1:A (pop:2 x y z))"))
    b = M.from_term(terms.loads("(pop:2 (push:1:A x) (push:1:A y) (push:1:A z))"))
    assert a == b
    assert M.from_term(M.to_term(a)) == a


def test_nondeterministic_stack_sum():
    N = MultiStackOps(1, "AB")
    p = N.from_term(terms.loads("(plus (push:A x) (pop y z w))"))
    assert p.apply(("B",)) == frozenset({("x", ("AB",)), ("z", ("",))})
    assert N.from_term(terms.loads("(empty)")).apply(("",)) == frozenset()


def test_tape_operations():
    T = TapeOps("_a")
    read = T.from_term(terms.loads("(read x y)"))
    assert read.apply(0, {}) == ("x", 0, {})
    assert read.apply(0, {0: "a"}) == ("y", 0, {0: "a"})
    w = T.from_term(terms.loads("(write:a (rmove x))"))
    assert w.apply(5, {}) == ("x", 6, {5: "a"})
    assert T.from_term(T.to_term(w)) == w


def test_cap_is_enforced():
    S = StackOps("A", cap=1)
    pop = S.from_term(terms.loads("(pop x y)"))
    with pytest.raises(StoreBoundError):
        S.kleisli(lambda _: pop, pop)


def test_domains():
    assert prefixes("AB", 2) == ("", "A", "B", "AA", "AB", "BA", "BB")
    assert len(windows("_a", 1)) == 8
    with pytest.raises(ValueError):
        StackOps("AA")
