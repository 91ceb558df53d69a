import pytest

from conftest import DATA
from oracles import all_words, balanced, is_anbn
from tautomata import catalog
from tautomata import fileformats as ff
from tautomata.automata import trace
from tautomata.expressions.cfg import Grammar
from tautomata.machines import DPDA, DTM, NPDQRT, RDTM, dpda_accepts, rdtm_accepts
from tautomata.results import Accept

DATA_FILES = sorted(p.name for p in DATA.iterdir() if p.is_file())


@pytest.mark.parametrize("name", DATA_FILES)
def test_data_files_round_trip(name):
    text = (DATA / name).read_text()
    obj = ff.loads(text)
    again = ff.dumps(obj)
    assert ff.dumps(ff.loads(again)) == again


def test_loaded_kinds():
    kinds = {
        "nfa.aut": ff.AutomatonFile, "nfa.expr": ff.ExpressionFile, "anbn.dpda": DPDA,
        "anbn.npdqrt": NPDQRT, "anbn.dtm": DTM, "anbn.rdtm": RDTM, "anbn.cfg": Grammar,
    }
    for name, cls in kinds.items():
        assert isinstance(ff.load(DATA / name), cls)


def test_loaded_objects_behave_like_the_catalog():
    f = ff.load(DATA / "nfa.aut")
    ref = catalog.powerset_example()
    for w in all_words("ab", 5):
        assert trace(f.automaton, "q0", w) == trace(ref, "q0", w)
    d = ff.load(DATA / "dyck.dpda")
    for w in all_words("()", 8):
        assert dpda_accepts(d, w) == balanced(w)
    r = ff.load(DATA / "anbn.rdtm")
    for w in all_words("ab", 4):
        assert (rdtm_accepts(r, w, fuel=400) is Accept) == is_anbn(w)


def test_store_survives_round_trip():
    f = ff.load(DATA / "anbncn.aut")
    assert f.store == ("_", "_")
    g = ff.loads(ff.dumps(f))
    assert g.store == ("_", "_")
    assert trace(g.automaton, g.automaton.start, "aabbcc")(g.store)


def test_weighted_automaton_file():
    f = ff.load(DATA / "count.aut")
    assert trace(f.automaton, "x", "aab") == 2


@pytest.mark.parametrize("text", [
    "(automaton (monad pow) (inputs a) (start q) (state q (out true)))",
    "(automaton (monad nosuch) (inputs a) (start q))",
    "(unknown-kind)",
    "(automaton (monad pow",
])
def test_bad_files_are_rejected(text):
    with pytest.raises(ValueError):
        ff.loads(text)


def test_machine_problems_survive_loading():
    # loading keeps a faulty machine so that it can be diagnosed
    d = ff.loads('(dpda (inputs a) (stack "Z") (bottom "Z") (start p) (state p (on a "Q" -> p "Z")))')
    assert any("unknown stack symbol" in p for p in d.problems())


def test_grammar_text_round_trip():
    g = ff.load(DATA / "dyck.cfg")
    assert ff.loads(ff.grammar_to_text(g)) == g
