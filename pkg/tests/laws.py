"""Monad-law checks shared by the unit tests and the acceptance run."""

from __future__ import annotations

import itertools
import random

import gen
from tautomata import terms
from tautomata.monads import PowersetOps, SemimoduleOps
from tautomata.semirings import BOOL, NAT, REAL, polyset
from tautomata.storemonads import MultiStackOps, StackOps, TapeOps, prefixes

RESULTS = gen.RESULTS


def kleisli_laws(ops, p, f, g, x) -> list[str]:
    """Names of the violated laws for one sample."""
    bad = []
    eq = ops.equal
    if not eq(ops.kleisli(f, ops.unit(x)), f(x)):
        bad.append("left unit")
    if not eq(ops.kleisli(ops.unit, p), p):
        bad.append("right unit")
    lhs = ops.kleisli(g, ops.kleisli(f, p))
    rhs = ops.kleisli(lambda y: ops.kleisli(g, f(y)), p)
    if not eq(lhs, rhs):
        bad.append("associativity")
    return bad


# Probes run an element on concrete stores, so they check the composite
# against step-by-step execution rather than against another table.


def stack_probes(gamma, depth=5):
    return [w + gamma[-1] * 2 for w in prefixes(gamma, depth)] + list(prefixes(gamma, 2))


def stack_sequential(p, f, s):
    x, s2 = p.apply(s)
    return f(x).apply(s2)


def multistack_probes(m, gamma, depth=3, limit=120):
    words = list(prefixes(gamma, depth))
    combos = list(itertools.product(words, repeat=m))
    rng = random.Random(len(combos))
    return combos if len(combos) <= limit else rng.sample(combos, limit)


def multistack_sequential(p, f, stacks):
    out = set()
    for x, s in p.apply(stacks):
        out |= f(x).apply(s)
    return frozenset(out)


def tape_probes(gamma, radius=4, count=40, seed=0):
    rng = random.Random(seed)
    probes = []
    for _ in range(count):
        cells = {i: c for i in range(-radius, radius + 1) if (c := rng.choice(gamma)) != "_"}
        probes.append((rng.randint(-2, 2), cells))
    return probes


def tape_sequential(p, f, pos, cells):
    x, pos2, cells2 = p.apply(pos, cells)
    return f(x).apply(pos2, cells2)


def probe_mismatch(kind, ops, p, f) -> bool:
    comp = ops.kleisli(f, p)
    if kind == "stack":
        return any(comp.apply(s) != stack_sequential(p, f, s) for s in stack_probes(ops.gamma))
    if kind == "multistack":
        return any(comp.apply(s) != multistack_sequential(p, f, s)
                   for s in multistack_probes(ops.m, ops.gamma))
    if kind == "tape":
        return any(comp.apply(i, c) != tape_sequential(p, f, i, c) for i, c in tape_probes(ops.gamma))
    return False


def instances():
    """(label, ops, kind, element generator) for every monad under test."""
    out = [("powerset", PowersetOps(), None, lambda r, ops: gen.powerset_element(r))]
    for sr in (BOOL, NAT, REAL, polyset(2)):
        out.append((f"semimodule {sr.name}", SemimoduleOps(sr), None,
                    lambda r, ops, sr=sr: gen.lincomb(r, sr)))
    out.append(("stack", StackOps("AB"), "stack", lambda r, ops: gen.stack_element(r, "AB", 2)))
    out.append(("nondeterministic stack", MultiStackOps(1, "AB"), "multistack",
                lambda r, ops: gen.multistack_element(r, 1, "AB", 1)))
    out.append(("2-stack", MultiStackOps(2, "AB"), "multistack",
                lambda r, ops: gen.multistack_element(r, 2, "AB", 1)))
    out.append(("3-stack", MultiStackOps(3, "A"), "multistack",
                lambda r, ops: gen.multistack_element(r, 3, "A", 1)))
    out.append(("tape", TapeOps("_a"), "tape", lambda r, ops: gen.tape_element(r, "_a", 1)))
    return out


def run_sample(ops, kind, make, rng) -> list[str]:
    p = make(rng, ops)
    fs = {x: make(rng, ops) for x in RESULTS}
    gs = {x: make(rng, ops) for x in RESULTS}
    bad = kleisli_laws(ops, p, fs.__getitem__, gs.__getitem__, rng.choice(RESULTS))
    if kind and probe_mismatch(kind, ops, p, fs.__getitem__):
        bad.append("probe")
    return bad


# Locality of composites


def stack_local(e, k, gamma, probes):
    """r(wu) = r(w) and t(wu) = t(w)u for every |w| = k."""
    for s in probes:
        if len(s) < k:
            continue
        r, t = e.apply(s[:k])
        if e.apply(s) != (r, t + s[k:]):
            return False
    return True


def tape_local(e, k, gamma, rng, trials=30):
    """Locality conditions A-H checked on random pairs of tapes."""
    for _ in range(trials):
        i = rng.randint(-3, 3)
        j = rng.randint(-3, 3)
        sigma = {c: rng.choice(gamma) for c in range(i - k - 4, i + k + 5)}
        other = dict(sigma)
        for c in sigma:
            if abs(c - i) > k:
                other[c] = rng.choice(gamma)
        clean = lambda d: {c: g for c, g in d.items() if g != "_"}  # noqa: E731
        r1, z1, t1 = e.apply(i, clean(sigma))
        r2, z2, t2 = e.apply(i, clean(other))
        near = range(i - k, i + k + 1)
        if r1 != r2 or z1 != z2 or abs(z1 - i) > k:
            return False
        if any(t1.get(c, "_") != t2.get(c, "_") for c in near):
            return False
        if any(t1.get(c, "_") != sigma.get(c, "_") for c in sigma if abs(c - i) > k):
            return False
        shifted = {c - j: g for c, g in clean(sigma).items()}
        rs, zs, ts = e.apply(i, shifted)
        rj, zj, tj = e.apply(i + j, clean(sigma))
        if rs != rj or zs != zj - j or ts != {c - j: g for c, g in tj.items()}:
            return False
    return True


def moves(name, n, t):
    for _ in range(n):
        t = terms.App(name, (t,))
    return t


def tape_commutation(ops, g1, g2, k):
    x = terms.Var("x")
    lhs = terms.App("write:" + g1, (moves("lmove", k, terms.App("write:" + g2, (moves("rmove", k, x),))),))
    rhs = moves("lmove", k, terms.App("write:" + g2, (moves("rmove", k, terms.App("write:" + g1, (x,))),)))
    return ops.from_term(lhs), ops.from_term(rhs)
