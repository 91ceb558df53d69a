"""Readers and writers for automaton, expression, machine and grammar files.

Every file is one s-expression whose head names its kind::

    (automaton (monad pow) (inputs a b) (start q0)
      (state q0 (out false) (on a q0) (on b q1)) ...)
    (expression (kind reactive) (monad pow) (inputs a b) (body (mu x ...)))
    (dpda (inputs a b) (stack "ABZ") (bottom Z) (start p) (accept f)
      (state p (on a Z -> q "BZ") (eps Z -> q "Z")))
    (npdqrt (inputs a b) (stack "A_") (bottom _) (stacks 2) (start p) (accept f)
      (state p (on a ("_" "_") -> q ("A_" "A_"))))
    (dtm (inputs a b) (tape "_abXY") (start q0) (accept qa)
      (state q0 (on a -> q1 X R)))
    (rdtm (inputs a b) (tape "_ab") (start p) (accept f)
      (state p (on a _ -> p a R) (tau _ -> q _ L)))

Grammars are plain text, one production per line (see ``parse_grammar``).
Transitions of store automata are written as tables, e.g.
``(table 1 ("" bot "") ("A" q "BA"))`` for stacks; theory terms such as
``(push A x)`` are accepted as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import sexpr, terms
from .automata import (TAU, Algebra, FreeSemimoduleAlgebra, InfiniteStackAlgebra, PlainAlgebra,
                       TAutomaton, default_algebra)
from .expressions.additive import AdditiveLanguage
from .expressions.algebraic import AlgebraicLanguage
from .expressions.cfg import Grammar, parse_grammar
from .expressions.reactive import ReactiveLanguage
from .machines import DPDA, DTM, NPDQRT, RDTM
from .monads import IdentityOps, KleisliOps, PowersetOps, SemimoduleOps
from .semirings import by_name
from .storemonads import (MultiStackElement, MultiStackOps, StackElement, StackOps,
                          TapeElement, TapeOps, _tuples, prefixes, windows)
from .syntax import atom, term_from_surface, term_to_surface


class FormatError(ValueError):
    pass


def _sym(x) -> str:
    try:
        return sexpr.symbol(x)
    except sexpr.SexprError as err:
        raise FormatError(str(err)) from None


def _clauses(body: list) -> dict[str, list]:
    """Group ``(key ...)`` clauses by key, keeping their order."""
    out: dict[str, list] = {}
    for c in body:
        if not isinstance(c, list) or not c:
            raise FormatError(f"expected a clause, got {sexpr.dumps(c)}")
        out.setdefault(_sym(c[0]), []).append(c[1:])
    return out


def _one(cl: dict, key: str, default=None, required=True):
    rows = cl.get(key)
    if not rows:
        if required and default is None:
            raise FormatError(f"missing ({key} ...) clause")
        return default
    if len(rows) > 1:
        raise FormatError(f"duplicate ({key} ...) clause")
    return rows[0]


def _single(cl: dict, key: str, default=None):
    row = _one(cl, key, default=[default] if default is not None else None,
               required=default is None)
    if len(row) != 1:
        raise FormatError(f"({key} ...) takes one value")
    return row[0]


def _word(x) -> str:
    text = _sym(x)
    return "" if text in ("eps", "ε") and not isinstance(x, sexpr.Str) else text


# Monads and algebras


def parse_monad(x) -> KleisliOps:
    if not isinstance(x, list):
        name = _sym(x)
        if name == "pow":
            return PowersetOps()
        if name == "id":
            return IdentityOps()
        raise FormatError(f"unknown monad {name}")
    head, args = _sym(x[0]), x[1:]
    try:
        if head == "semimodule":
            return SemimoduleOps(by_name(_sym(args[0])))
        if head == "stack":
            return StackOps(_sym(args[0]))
        if head == "ndstack":
            return MultiStackOps(1, _sym(args[0]))
        if head == "multistack":
            return MultiStackOps(int(_sym(args[0])), _sym(args[1]))
        if head == "tape":
            return TapeOps(_sym(args[0]))
    except (IndexError, ValueError) as err:
        raise FormatError(f"bad monad {sexpr.dumps(x)}: {err}") from None
    raise FormatError(f"unknown monad {head}")


def monad_to_sexpr(m: KleisliOps):
    if isinstance(m, PowersetOps):
        return "pow"
    if isinstance(m, IdentityOps):
        return "id"
    if isinstance(m, SemimoduleOps):
        return ["semimodule", m.sr.name]
    if isinstance(m, StackOps):
        return ["stack", sexpr.Str(m.gamma)]
    if isinstance(m, MultiStackOps):
        if m.m == 1:
            return ["ndstack", sexpr.Str(m.gamma)]
        return ["multistack", str(m.m), sexpr.Str(m.gamma)]
    if isinstance(m, TapeOps):
        return ["tape", sexpr.Str(m.gamma)]
    raise FormatError(f"monad {m.name} has no file form")


def parse_algebra(x, monad: KleisliOps) -> Algebra:
    if x is None:
        return default_algebra(monad)
    if not isinstance(x, list):
        name = _sym(x)
        if name == "unbounded-stack" and isinstance(monad, StackOps):
            return InfiniteStackAlgebra(monad)
        if name == "default":
            return default_algebra(monad)
        raise FormatError(f"unknown algebra {name}")
    head = _sym(x[0])
    if head == "generators" and isinstance(monad, SemimoduleOps):
        return FreeSemimoduleAlgebra(monad.sr, [_sym(g) for g in x[1:]])
    if head == "values" and isinstance(monad, IdentityOps):
        return PlainAlgebra([_sym(v) for v in x[1:]])
    raise FormatError(f"unknown algebra {sexpr.dumps(x)}")


def algebra_to_sexpr(alg: Algebra):
    if isinstance(alg, InfiniteStackAlgebra):
        return "unbounded-stack"
    if isinstance(alg, FreeSemimoduleAlgebra):
        return ["generators"] + list(alg.generators)
    if isinstance(alg, PlainAlgebra):
        return ["values"] + [str(v) for v in alg.values]
    return None


# Transition elements


def _state_atom(x):
    return atom(str(x))


def parse_element(x, monad: KleisliOps, states: set):
    """A transition: a state name, a theory term, or a ``(table ...)``."""
    if isinstance(x, list) and x and _sym(x[0]) == "table":
        return _parse_table(x, monad)
    if isinstance(monad, IdentityOps):
        return _sym(x)
    try:
        t = term_from_surface(x, monad)
        return monad.from_term(t)
    except (terms.TermError, KeyError, ValueError) as err:
        raise FormatError(f"bad transition {sexpr.dumps(x)}: {err}") from None


def _parse_table(x, monad):
    try:
        k = int(_sym(x[1]))
    except (IndexError, ValueError):
        raise FormatError("(table k ...) needs a locality bound") from None
    rows = x[2:]
    if isinstance(monad, StackOps):
        table = {_word(r[0]): (_sym(r[1]), _word(r[2])) for r in rows}
        need = prefixes(monad.gamma, k)
        elem_cls = lambda: StackElement(monad.gamma, k, table)  # noqa: E731
    elif isinstance(monad, MultiStackOps):
        table = {}
        for r in rows:
            key = tuple(_word(s) for s in r[0])
            table[key] = {(_sym(o[0]), tuple(_word(s) for s in o[1])) for o in r[1:]}
        need = _tuples(monad.gamma, k, monad.m)
        elem_cls = lambda: MultiStackElement(monad.m, monad.gamma, k, table)  # noqa: E731
    elif isinstance(monad, TapeOps):
        table = {_sym(r[0]): (_sym(r[1]), int(_sym(r[2])), _sym(r[3])) for r in rows}
        need = windows(monad.gamma, k)
        elem_cls = lambda: TapeElement(monad.gamma, k, table)  # noqa: E731
    else:
        raise FormatError(f"tables are only for store monads, not {monad.name}")
    missing = [w for w in need if w not in table]
    if missing:
        raise FormatError(f"table misses entries for {missing[:3]}")
    return elem_cls()


def element_to_sexpr(p, monad: KleisliOps):
    if isinstance(monad, IdentityOps):
        return _state_atom(p)
    if isinstance(monad, StackOps):
        e = p.minimized
        return ["table", str(e.k)] + [[sexpr.Str(w), _state_atom(e.table[w][0]), sexpr.Str(e.table[w][1])]
                                      for w in prefixes(e.gamma, e.k)]
    if isinstance(monad, MultiStackOps):
        e = p.minimized
        rows = []
        for w in e.domain():
            outs = sorted(e.table[w], key=lambda o: (str(o[0]), o[1]))
            rows.append([[sexpr.Str(s) for s in w]]
                        + [[_state_atom(y), [sexpr.Str(s) for s in new]] for y, new in outs])
        return ["table", str(e.k)] + rows
    if isinstance(monad, TapeOps):
        e = p.minimized
        return ["table", str(e.k)] + [[sexpr.Str(w), _state_atom(e.table[w][0]), str(e.table[w][1]),
                                       sexpr.Str(e.table[w][2])] for w in windows(e.gamma, e.k)]
    return term_to_surface(monad.to_term(p, var=lambda y: terms.Var(str(y))))


# Automata


@dataclass
class AutomatonFile:
    automaton: TAutomaton
    store: Any = None


def automaton_from_sexpr(x) -> AutomatonFile:
    cl = _clauses(x[1:])
    monad = parse_monad(_single(cl, "monad"))
    alg = parse_algebra(_single(cl, "algebra", "default"), monad)
    inputs = tuple(_sym(a) for a in _one(cl, "inputs"))
    rows = cl.get("state", [])
    if not rows:
        raise FormatError("automaton has no states")
    names = [_sym(r[0]) for r in rows]
    out, trans = {}, {}
    for r in rows:
        q = _sym(r[0])
        sub = _clauses(r[1:])
        try:
            out[q] = alg.parse(_single(sub, "out"))
        except (ValueError, KeyError) as err:
            raise FormatError(f"state {q}: bad output: {err}") from None
        for on in sub.get("on", []):
            a = _sym(on[0])
            if (a, q) in trans:
                raise FormatError(f"state {q} has two transitions on {a}")
            trans[(a, q)] = parse_element(on[1], monad, set(names))
    start = _sym(_single(cl, "start", names[0]))
    store = None
    if "store" in cl:
        raw = _single(cl, "store")
        store = tuple(_word(s) for s in raw) if isinstance(raw, list) else _word(raw)
    try:
        aut = TAutomaton(monad, alg, tuple(names), inputs, out, trans, start)
    except ValueError as err:
        raise FormatError(str(err)) from None
    return AutomatonFile(aut, store)


def automaton_to_sexpr(m: TAutomaton, store=None, start=None) -> list:
    out = ["automaton", ["monad", monad_to_sexpr(m.monad)]]
    alg = algebra_to_sexpr(m.algebra)
    if alg is not None:
        out.append(["algebra", alg])
    out.append(["inputs"] + [atom(a) for a in m.inputs])
    s = start if start is not None else m.start
    if s is not None:
        out.append(["start", _state_atom(s)])
    if store is not None:
        out.append(["store", [sexpr.Str(t) for t in store] if isinstance(store, tuple) else sexpr.Str(store)])
    letters = tuple(m.inputs) + ((TAU,) if m.has_tau else ())
    for q in m.states:
        row = ["state", _state_atom(q), ["out", m.algebra.to_sexpr(m.out[q])]]
        for a in letters:
            row.append(["on", atom(a), element_to_sexpr(m.trans[(a, q)], m.monad)])
        out.append(row)
    return out


# Expressions


@dataclass
class ExpressionFile:
    kind: str
    lang: Any
    expr: Any


def expression_from_sexpr(x) -> ExpressionFile:
    cl = _clauses(x[1:])
    kind = _sym(_single(cl, "kind", "reactive"))
    inputs = tuple(_sym(a) for a in _one(cl, "inputs"))
    body = _single(cl, "body")
    if kind == "algebraic":
        lang = AlgebraicLanguage(by_name(_sym(_single(cl, "semiring", "bool"))), inputs)
    elif kind in ("reactive", "additive"):
        monad = parse_monad(_single(cl, "monad"))
        alg = parse_algebra(_single(cl, "algebra", "default"), monad)
        cls = ReactiveLanguage if kind == "reactive" else AdditiveLanguage
        lang = cls(monad, inputs, alg)
    else:
        raise FormatError(f"unknown expression kind {kind}")
    try:
        e = lang.parse(body)
        if kind == "reactive":
            lang.check(e)
    except (ValueError, KeyError, terms.TermError) as err:
        raise FormatError(f"bad expression: {err}") from None
    return ExpressionFile(kind, lang, e)


def expression_to_sexpr(kind: str, lang, e) -> list:
    out = ["expression", ["kind", kind]]
    if kind == "algebraic":
        out.append(["semiring", lang.sr.name])
    else:
        out.append(["monad", monad_to_sexpr(lang.monad)])
        alg = algebra_to_sexpr(lang.algebra)
        if alg is not None:
            out.append(["algebra", alg])
    out.append(["inputs"] + [atom(a) for a in lang.inputs])
    out.append(["body", lang.to_sexpr(e)])
    return out


# Machines


def _split_arrow(row, what):
    syms = [(_sym(t) if not isinstance(t, list) else None) for t in row]
    if "->" not in syms:
        raise FormatError(f"{what} row needs '->': {sexpr.dumps(row)}")
    i = syms.index("->")
    return row[:i], row[i + 1:]


def _header(cl):
    inputs = tuple(_sym(a) for a in _one(cl, "inputs"))
    start = _sym(_single(cl, "start"))
    accept = frozenset(_sym(q) for q in _one(cl, "accept", default=[], required=False))
    return inputs, start, accept


def dpda_from_sexpr(x) -> DPDA:
    cl = _clauses(x[1:])
    inputs, start, accept = _header(cl)
    stack, bottom = _sym(_single(cl, "stack")), _sym(_single(cl, "bottom"))
    states, delta = [], {}
    for r in cl.get("state", []):
        q = _sym(r[0])
        states.append(q)
        for c in r[1:]:
            kind = _sym(c[0])
            lhs, rhs = _split_arrow(c[1:], "dpda")
            if kind == "on" and len(lhs) == 2:
                key = (q, _sym(lhs[0]), _sym(lhs[1]))
            elif kind == "eps" and len(lhs) == 1:
                key = (q, None, _sym(lhs[0]))
            else:
                raise FormatError(f"bad dpda row {sexpr.dumps(c)}")
            if len(rhs) != 2:
                raise FormatError(f"dpda row must end with '-> state pushed': {sexpr.dumps(c)}")
            if key in delta:
                raise FormatError(f"duplicate dpda row {key}")
            delta[key] = (_sym(rhs[0]), _word(rhs[1]))
    return DPDA(tuple(states), inputs, stack, bottom, start, accept, delta)


def dpda_to_sexpr(m: DPDA) -> list:
    out = ["dpda", ["inputs"] + [atom(a) for a in m.inputs], ["stack", sexpr.Str(m.stack)],
           ["bottom", sexpr.Str(m.bottom)], ["start", atom(m.start)],
           ["accept"] + [atom(q) for q in m.states if q in m.accept]]
    for q in m.states:
        row = ["state", atom(q)]
        for (p, a, g), (q2, s) in m.delta.items():
            if p != q:
                continue
            head = ["eps"] if a is None else ["on", atom(a)]
            row.append(head + [sexpr.Str(g), "->", atom(q2), sexpr.Str(s)])
        out.append(row)
    return out


def npdqrt_from_sexpr(x) -> NPDQRT:
    cl = _clauses(x[1:])
    inputs, start, accept = _header(cl)
    stack, bottom = _sym(_single(cl, "stack")), _sym(_single(cl, "bottom"))
    m = int(_sym(_single(cl, "stacks", "1")))
    by_empty = _sym(_single(cl, "acceptance", "final")) == "empty"
    states, delta = [], {}
    for r in cl.get("state", []):
        q = _sym(r[0])
        states.append(q)
        for c in r[1:]:
            kind = _sym(c[0])
            lhs, rhs = _split_arrow(c[1:], "npdqrt")
            if kind == "on" and len(lhs) == 2:
                a, tops = _sym(lhs[0]), lhs[1]
            elif kind == "eps" and len(lhs) == 1:
                a, tops = None, lhs[0]
            else:
                raise FormatError(f"bad npdqrt row {sexpr.dumps(c)}")
            if len(rhs) != 2 or not isinstance(tops, list) or not isinstance(rhs[1], list):
                raise FormatError(f"npdqrt row must be '-> state (pushed ...)': {sexpr.dumps(c)}")
            key = (q, a, tuple(_word(t) for t in tops))
            delta.setdefault(key, set()).add((_sym(rhs[0]), tuple(_word(s) for s in rhs[1])))
    delta = {k: frozenset(v) for k, v in delta.items()}
    return NPDQRT(tuple(states), inputs, stack, bottom, m, start, accept, delta, by_empty)


def npdqrt_to_sexpr(m: NPDQRT) -> list:
    out = ["npdqrt", ["inputs"] + [atom(a) for a in m.inputs], ["stack", sexpr.Str(m.stack)],
           ["bottom", sexpr.Str(m.bottom)], ["stacks", str(m.m)], ["start", atom(m.start)],
           ["accept"] + [atom(q) for q in m.states if q in m.accept]]
    if m.by_empty:
        out.append(["acceptance", "empty"])
    for q in m.states:
        row = ["state", atom(q)]
        for (p, a, tops), moves in m.delta.items():
            if p != q:
                continue
            head = ["eps"] if a is None else ["on", atom(a)]
            for q2, pushed in sorted(moves, key=lambda mv: (str(mv[0]), mv[1])):
                row.append(head + [[sexpr.Str(t) for t in tops], "->", atom(q2),
                                   [sexpr.Str(s) for s in pushed]])
        out.append(row)
    return out


def _tm_rows(cl, with_letter: bool):
    states, delta = [], {}
    for r in cl.get("state", []):
        q = _sym(r[0])
        states.append(q)
        for c in r[1:]:
            kind = _sym(c[0])
            lhs, rhs = _split_arrow(c[1:], "machine")
            if with_letter:
                if kind == "on" and len(lhs) == 2:
                    key = (q, _sym(lhs[0]), _sym(lhs[1]))
                elif kind == TAU and len(lhs) == 1:
                    key = (q, TAU, _sym(lhs[0]))
                else:
                    raise FormatError(f"bad rdtm row {sexpr.dumps(c)}")
            else:
                if kind != "on" or len(lhs) != 1:
                    raise FormatError(f"bad dtm row {sexpr.dumps(c)}")
                key = (q, _sym(lhs[0]))
            if len(rhs) != 3:
                raise FormatError(f"row must end with '-> state written move': {sexpr.dumps(c)}")
            if key in delta:
                raise FormatError(f"duplicate row {key}")
            delta[key] = (_sym(rhs[0]), _sym(rhs[1]), _sym(rhs[2]))
    return tuple(states), delta


def dtm_from_sexpr(x) -> DTM:
    cl = _clauses(x[1:])
    inputs, start, accept = _header(cl)
    states, delta = _tm_rows(cl, False)
    return DTM(states, inputs, _sym(_single(cl, "tape")), start, accept, delta)


def rdtm_from_sexpr(x) -> RDTM:
    cl = _clauses(x[1:])
    inputs, start, accept = _header(cl)
    states, delta = _tm_rows(cl, True)
    return RDTM(states, inputs, _sym(_single(cl, "tape")), start, accept, delta)


def _tm_to_sexpr(head: str, m, rows) -> list:
    out = [head, ["inputs"] + [atom(a) for a in m.inputs], ["tape", sexpr.Str(m.tape)],
           ["start", atom(str(m.start))], ["accept"] + [atom(str(q)) for q in m.states if q in m.accept]]
    for q in m.states:
        out.append(["state", atom(str(q))] + rows(q))
    return out


def dtm_to_sexpr(m: DTM) -> list:
    def rows(q):
        return [["on", atom(g), "->", atom(q2), atom(g2), mv]
                for (p, g), (q2, g2, mv) in m.delta.items() if p == q]
    return _tm_to_sexpr("dtm", m, rows)


def rdtm_to_sexpr(m: RDTM) -> list:
    if not isinstance(m.states, tuple):
        raise FormatError("materialize the machine before writing it")

    def rows(q):
        out = []
        for (p, a, g), (q2, g2, mv) in m.delta.items():
            if p != q:
                continue
            head = [TAU] if a == TAU else ["on", atom(a)]
            out.append(head + [atom(g), "->", atom(str(q2)), atom(g2), mv])
        return out
    return _tm_to_sexpr("rdtm", m, rows)


# Dispatch


READERS = {
    "automaton": automaton_from_sexpr,
    "expression": expression_from_sexpr,
    "dpda": dpda_from_sexpr,
    "npdqrt": npdqrt_from_sexpr,
    "dtm": dtm_from_sexpr,
    "rdtm": rdtm_from_sexpr,
}


def loads(text: str):
    """Parse file contents; grammars are recognized by not starting with '('."""
    if not text.lstrip().startswith("(") and "->" in text:
        return parse_grammar(text)
    try:
        x = sexpr.parse(text)
    except sexpr.SexprError as err:
        raise FormatError(str(err)) from None
    if not isinstance(x, list) or not x:
        raise FormatError("expected a (kind ...) form")
    kind = _sym(x[0])
    if kind not in READERS:
        raise FormatError(f"unknown file kind {kind}")
    try:
        return READERS[kind](x)
    except (IndexError, TypeError) as err:
        raise FormatError(f"malformed {kind} file: {err}") from None


def load(path) -> Any:
    return loads(Path(path).read_text(encoding="utf-8"))


def to_sexpr(obj, **kw) -> list:
    if isinstance(obj, AutomatonFile):
        return automaton_to_sexpr(obj.automaton, obj.store, **kw)
    if isinstance(obj, TAutomaton):
        return automaton_to_sexpr(obj, **kw)
    if isinstance(obj, ExpressionFile):
        return expression_to_sexpr(obj.kind, obj.lang, obj.expr)
    if isinstance(obj, DPDA):
        return dpda_to_sexpr(obj)
    if isinstance(obj, NPDQRT):
        return npdqrt_to_sexpr(obj)
    if isinstance(obj, DTM):
        return dtm_to_sexpr(obj)
    if isinstance(obj, RDTM):
        return rdtm_to_sexpr(obj)
    raise FormatError(f"cannot write {type(obj).__name__}")


def dumps(obj, **kw) -> str:
    if isinstance(obj, Grammar):
        return grammar_to_text(obj)
    return sexpr.dumps(to_sexpr(obj, **kw), indent=2) + "\n"


def grammar_to_text(g: Grammar) -> str:
    lines = []
    for x in g.nonterminals:
        alts = [" ".join(rhs) if rhs else "eps" for rhs in g.rules(x)]
        lines.append(f"{x} -> " + " | ".join(alts))
    return "\n".join(lines) + "\n"
