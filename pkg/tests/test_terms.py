import pytest
from hypothesis import given, strategies as st

from tautomata import sexpr, terms
from tautomata.terms import App, Signature, TermError, Var

SIG = Signature({"plus": 2, "empty": 0, "neg": 1})

names = st.sampled_from(["x", "y", "z"])


def term_strategy():
    leaves = st.one_of(names.map(Var), st.just(App("empty")))
    return st.recursive(leaves, lambda kids: st.one_of(
        kids.map(lambda t: App("neg", (t,))),
        st.tuples(kids, kids).map(lambda p: App("plus", p)),
    ), max_leaves=12)


@given(term_strategy())
def test_sexpr_round_trip(t):
    assert terms.loads(terms.dumps(t)) == t


@given(term_strategy())
def test_generated_terms_are_well_formed(t):
    assert terms.check_arity(SIG, t) is None


def test_check_arity_reports_path():
    t = terms.app("plus", Var("x"), terms.app("neg", Var("x"), Var("y")))
    assert terms.check_arity(SIG, t) == (1,)
    assert terms.check_arity(SIG, terms.app("nope")) == ()


@given(term_strategy())
def test_substitution_identity_and_variables(t):
    assert terms.substitute(t, {}) == t
    s = terms.substitute(t, {"x": Var("w")})
    assert "x" not in terms.variables(s)
    assert set(terms.variables(s)) <= set(terms.variables(t)) | {"w"}


@given(term_strategy(), st.dictionaries(names, st.integers(-5, 5), min_size=3))
def test_evaluate_matches_python(t, env):
    interp = {"plus": lambda a, b: a + b, "empty": lambda: 0, "neg": lambda a: -a}

    def direct(u):
        if isinstance(u, Var):
            return env[u.name]
        return interp[u.op](*(direct(a) for a in u.args))

    assert terms.evaluate(t, interp, env) == direct(t)


def test_evaluate_errors():
    with pytest.raises(TermError):
        terms.evaluate(Var("q"), {}, {})
    with pytest.raises(TermError):
        terms.evaluate(terms.app("zap"), {}, {})


def test_var_syntax_and_operations():
    t = terms.loads("(plus (var plus) y)")
    assert t == App("plus", (Var("plus"), Var("y")))
    assert terms.operations(t) == ["plus"]
    assert str(t) == "plus(plus, y)"


def test_negative_arity_rejected():
    with pytest.raises(TermError):
        Signature({"bad": -1})


def test_sexpr_strings_and_errors():
    x = sexpr.parse('(a "b c" (d))')
    assert x[1] == sexpr.Str("b c")
    assert sexpr.parse(sexpr.dumps(x)) == x
    with pytest.raises(sexpr.SexprError):
        sexpr.parse("(a")
    with pytest.raises(sexpr.SexprError):
        sexpr.parse("a)")
