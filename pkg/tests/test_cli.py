import io
import json

import pytest

from conftest import DATA
from oracles import all_words, balanced
from tautomata import fileformats as ff
from tautomata.cli import main, split_word


def run(*argv):
    out = io.StringIO()
    code = main([str(DATA / a) if (DATA / a).is_file() else a for a in argv], out)
    return code, out.getvalue()


def test_accept_examples():
    assert run("accept", "nfa.aut", "q0", "bb") == (0, "true\n")
    assert run("accept", "nfa.aut", "q0", "ab") == (1, "false\n")
    assert run("accept", "count.aut", "x", "aab") == (0, "2\n")
    assert run("accept", "anbn.rdtm", "--", "ab", "--fuel", "500") == (0, "accept\n")
    assert run("accept", "anbn.rdtm", "ba", "--fuel", "500") == (1, "reject\n")


def test_accept_unknown_on_low_fuel():
    assert run("accept", "anbn.rdtm", "aabb", "--fuel", "3") == (2, "unknown\n")


def test_accept_other_kinds():
    assert run("accept", "anbn.dpda", "aabb")[0] == 0
    assert run("accept", "anbn.npdqrt", "aab")[0] == 1
    assert run("accept", "dyck.aut", "(())")[0] == 0
    assert run("accept", "anbn.cfg", "eps")[0] == 0
    assert run("accept", "enfa.aut", "aab")[0] == 0
    assert run("accept", "nfa.expr", "bb") == (0, "true\n")


def test_enumerate_dyck_matches_oracle():
    code, text = run("enumerate", "dyck.aut", "--max-len", "6")
    got = [("" if w == "eps" else w) for w in text.split()]
    assert code == 0
    assert got == ["".join(w) for w in all_words("()", 6) if balanced(w)]


def test_enumerate_anbncn():
    assert run("enumerate", "anbncn.aut", "--max-len", "9") == (0, "abc\naabbcc\naaabbbccc\n")


def test_enumerate_empty_language(tmp_path):
    path = tmp_path / "none.aut"
    path.write_text("(automaton (monad pow) (inputs a b) (start q)"
                    " (state q (out false) (on a (empty)) (on b (empty))))")
    assert main(["enumerate", str(path)], io.StringIO()) == 0
    out = io.StringIO()
    main(["enumerate", str(path)], out)
    assert out.getvalue() == ""


def test_enumerate_reports_undecided_words():
    code, text = run("enumerate", "anbn.rdtm", "--max-len", "4", "--fuel", "10")
    assert code == 2 and "unknown: " in text


def test_enumerate_sample_is_reproducible():
    a = run("enumerate", "dyck.cfg", "--max-len", "10", "--sample", "200", "--seed", "4")
    b = run("enumerate", "dyck.cfg", "--max-len", "10", "--sample", "200", "--seed", "4")
    assert a == b and a[0] == 0
    for w in a[1].split():
        assert w == "eps" or balanced(w)


def test_equiv_examples():
    assert run("equiv", "nfa.expr", "nfa.aut", "q0") == (0, "equivalent\n")
    assert run("equiv", "nfa.aut", "nfa_variant.aut") == (1, "inequivalent: abb\n")
    assert run("equiv", "nfa.aut", "nfa.aut") == (0, "equivalent\n")
    assert run("equiv", "anbn.dpda", "anbn.npdqrt", "--mode", "bounded", "--bound", "6")[0] == 0


def test_equiv_exact_needs_exact_objects():
    code, text = run("equiv", "anbn.dpda", "anbn.npdqrt")
    assert code == 2 and text.startswith("unknown")


def test_convert_expression_and_automaton(tmp_path):
    code, text = run("convert", "expr2aut", "nfa.expr")
    assert code == 0
    f = ff.loads(text)
    assert len(f.automaton.states) == 3
    out = tmp_path / "back.expr"
    assert run("convert", "aut2expr", "nfa.aut", "q0", "-o", str(out))[0] == 0
    assert main(["equiv", str(out), str(DATA / "nfa.aut"), "q0"], io.StringIO()) == 0


def test_convert_dpda(tmp_path):
    out = tmp_path / "anbn.aut"
    assert run("convert", "dpda2aut", "anbn.dpda", "-o", str(out))[0] == 0
    code = main(["equiv", str(out), str(DATA / "anbn.dpda"), "--mode", "bounded", "--bound", "8"],
                io.StringIO())
    assert code == 0
    back = tmp_path / "dyck.dpda"
    assert run("convert", "aut2dpda", "dyck.aut", "-o", str(back))[0] == 0
    assert main(["check", str(back)], io.StringIO()) == 0


def test_convert_turing_machines(tmp_path):
    rdtm = tmp_path / "m.rdtm"
    tape = tmp_path / "m.aut"
    assert run("convert", "dtm2rdtm", "anbn.dtm", "-o", str(rdtm))[0] == 0
    assert main(["convert", "rdtm2tape", str(rdtm), "-o", str(tape)], io.StringIO()) == 0
    for w, expected in [("ab", 0), ("aab", 1)]:
        assert main(["accept", str(tape), w, "--fuel", "500"], io.StringIO()) == expected


def test_convert_grammar():
    code, text = run("convert", "cfg2expr", "anbn.cfg")
    assert code == 0 and ff.loads(text).kind == "algebraic"


def test_convert_wrong_kind():
    assert run("convert", "expr2aut", "anbn.dpda")[0] == 3
    assert run("convert", "nosuch", "anbn.dpda")[0] == 3


def test_check():
    assert run("check", "anbn.dpda") == (0, "DPDA: ok\n")
    assert run("check", "nfa.aut") == (0, "TAutomaton: ok\n")


def test_check_reports_unreachable_states(tmp_path):
    path = tmp_path / "lost.aut"
    path.write_text("(automaton (monad pow) (inputs a) (start p)"
                    " (state p (out false) (on a p)) (state q (out true) (on a q)))")
    out = io.StringIO()
    assert main(["check", str(path)], out) == 1
    assert "unreachable" in out.getvalue()


def test_input_errors():
    assert run("accept", "no/such/file.aut", "a")[0] == 3
    assert run("accept", "nfa.aut", "q0", "abz")[0] == 3
    assert run("bogus")[0] == 3


def test_json_output():
    code, text = run("accept", "count.aut", "x", "aab", "--format", "json")
    assert json.loads(text) == {"word": "aab", "value": "2"}
    code, text = run("equiv", "nfa.aut", "nfa_variant.aut", "--format", "json")
    assert json.loads(text)["witness"] == "abb"


def test_commands_are_deterministic():
    for argv in [("enumerate", "dyck.cfg", "--max-len", "8"), ("convert", "aut2expr", "nfa.aut", "q0")]:
        assert run(*argv) == run(*argv)


@pytest.mark.parametrize("text,inputs,expected", [
    ("abba", ("a", "b"), ("a", "b", "b", "a")),
    ("eps", ("a", "b"), ()),
    ("x1 x2", ("x1", "x2"), ("x1", "x2")),
    ("x1x2", ("x1", "x2"), ("x1", "x2")),
])
def test_split_word(text, inputs, expected):
    assert split_word(text, inputs) == expected
