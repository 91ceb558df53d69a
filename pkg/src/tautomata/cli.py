"""Command-line front end.

    tautomata accept FILE [START] WORD
    tautomata enumerate FILE [START] --max-len N
    tautomata equiv FILE1 [START1] FILE2 [START2] --mode exact|bounded --bound N
    tautomata convert KIND FILE [START] [-o OUT]
    tautomata check FILE

Exit codes: 0 success, accept or equivalent; 1 reject or inequivalent;
2 unknown; 3 bad input.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from typing import Any, Callable

from . import fileformats as ff
from . import sexpr
from .automata import (TAU, AutomatonError, MultiStackPredicateAlgebra, PowersetCoalgebra,
                       StackPredicateAlgebra, TapePredicateAlgebra, TAutomaton, bisimilar,
                       trace, words)
from .expressions.algebraic import AlgebraicLanguage
from .expressions.cfg import Grammar, GrammarError, cfg_to_algexpr
from .expressions.core import ExprError
from .expressions.kleene import automaton_to_expr, expr_to_automaton
from .expressions.reactive import ReactiveLanguage
from .machines import (DEFAULT_FUEL, DPDA, DTM, NPDQRT, RDTM, MachineError, dpda_accepts,
                       dpda_to_stack_automaton, dtm_run, dtm_to_rdtm, materialize,
                       multistack_automaton_to_npdqrt, npdqrt_accepts,
                       npdqrt_to_multistack_automaton, rdtm_accepts, rdtm_to_tape_automaton,
                       stack_automaton_to_dpda, tape_automaton_to_rdtm)
from .observational import obs_trace
from .results import Accept, Outcome, Reject, Unknown, Verdict
from .storemonads import MultiStackOps, StackOps

OK, NO, UNKNOWN, BAD_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


# Loaded objects as word functions


@dataclass
class Recognizer:
    """A loaded object seen as a function from words to values."""

    inputs: tuple
    run: Callable[[tuple], Any]
    accepts: Callable[[Any], Any]
    show: Callable[[Any], str]
    eq: Callable[[Any, Any], bool] = lambda b, c: b == c


def _show_outcome(v) -> str:
    return "unknown" if v is Unknown else str(v)


def _show_bool(v) -> str:
    if v is Unknown:
        return "unknown"
    return "true" if v else "false"


def _at_store(alg, b, store):
    if isinstance(alg, StackPredicateAlgebra):
        return b(store if store is not None else "")
    if isinstance(alg, MultiStackPredicateAlgebra):
        return b(store if store is not None else ("",) * alg.monad.m)
    if isinstance(alg, TapePredicateAlgebra):
        head, cells = store if store is not None else (0, {})
        return b(head, cells)
    return None


def _predicate_valued(alg) -> bool:
    return isinstance(alg, (StackPredicateAlgebra, MultiStackPredicateAlgebra, TapePredicateAlgebra))


def _start_of(m: TAutomaton, start):
    x = start if start is not None else m.start
    if x not in m.out:
        raise InputError(f"unknown start state {x}")
    return x


def automaton_recognizer(f: ff.AutomatonFile, start, fuel: int) -> Recognizer:
    m, store = f.automaton, f.store
    x = _start_of(m, start)
    alg = m.algebra
    if m.has_tau:
        return Recognizer(m.inputs, lambda w: obs_trace(m, x, w, fuel=fuel, store=store),
                          lambda v: v, _show_bool)
    if _predicate_valued(alg):
        return Recognizer(m.inputs, lambda w: bool(_at_store(alg, trace(m, x, w), store)),
                          lambda v: v, _show_bool)
    return Recognizer(m.inputs, lambda w: trace(m, x, w), alg.truthy,
                      lambda v: sexpr.dumps(alg.to_sexpr(v)), alg.eq)


def expression_recognizer(f: ff.ExpressionFile) -> Recognizer:
    lang, e = f.lang, f.expr
    if isinstance(lang, AlgebraicLanguage):
        sr = lang.sr
        return Recognizer(lang.inputs, lambda w: lang.trace(e, w),
                          lambda v: not sr.is_zero(v), lambda v: str(sr.show(v)), sr.eq)
    alg = lang.algebra
    if _predicate_valued(alg):
        return Recognizer(lang.inputs, lambda w: bool(_at_store(alg, lang.trace(e, w), None)),
                          lambda v: v, _show_bool)
    return Recognizer(lang.inputs, lambda w: lang.trace(e, w), alg.truthy,
                      lambda v: sexpr.dumps(alg.to_sexpr(v)), alg.eq)


def machine_recognizer(m, fuel: int) -> Recognizer:
    if isinstance(m, DPDA):
        run = lambda w: Accept if dpda_accepts(m, w, eps_limit=fuel) else Reject  # noqa: E731
    elif isinstance(m, NPDQRT):
        run = lambda w: npdqrt_accepts(m, w, fuel=fuel)  # noqa: E731
    elif isinstance(m, DTM):
        run = lambda w: dtm_run(m, w, fuel)  # noqa: E731
    elif isinstance(m, RDTM):
        run = lambda w: rdtm_accepts(m, w, fuel)  # noqa: E731
    else:
        raise InputError(f"cannot run {type(m).__name__}")
    return Recognizer(tuple(m.inputs), run, lambda v: v is Accept, _show_outcome)


def recognizer(obj, start, fuel: int) -> Recognizer:
    if isinstance(obj, ff.AutomatonFile):
        return automaton_recognizer(obj, start, fuel)
    if start is not None and not isinstance(obj, ff.AutomatonFile):
        raise InputError("a start state can only be given for automaton files")
    if isinstance(obj, ff.ExpressionFile):
        return expression_recognizer(obj)
    if isinstance(obj, Grammar):
        e, lang = cfg_to_algexpr(obj)
        return expression_recognizer(ff.ExpressionFile("algebraic", lang, e))
    return machine_recognizer(obj, fuel)


def split_word(text: str, inputs) -> tuple:
    """Letters of ``text``: space separated, or greedily matched against ``inputs``."""
    if text in ("", "eps", "ε"):
        return ()
    if " " in text.strip():
        letters = tuple(text.split())
    else:
        letters, i = [], 0
        by_len = sorted(inputs, key=len, reverse=True)
        while i < len(text):
            a = next((a for a in by_len if text.startswith(a, i)), None)
            if a is None:
                raise InputError(f"cannot split {text!r} into letters of {list(inputs)}")
            letters.append(a)
            i += len(a)
        letters = tuple(letters)
    bad = [a for a in letters if a not in inputs]
    if bad:
        raise InputError(f"{bad[0]!r} is not an input letter")
    return letters


def show_word(w, inputs) -> str:
    if not w:
        return "eps"
    sep = "" if all(len(a) == 1 for a in inputs) else " "
    return sep.join(w)


def status_of(value, rec: Recognizer) -> int:
    if value is Unknown:
        return UNKNOWN
    if isinstance(value, (bool, Outcome)):
        return OK if rec.accepts(value) else NO
    return OK


# Commands


def _load(path: str):
    try:
        return ff.load(path)
    except OSError as err:
        raise InputError(f"{path}: {err.strerror}") from None
    except (ff.FormatError, GrammarError, ExprError, MachineError, AutomatonError) as err:
        raise InputError(f"{path}: {err}") from None


def _file_and_start(args: list, n_after: int, what: str):
    """Split ``FILE [START] rest...`` where ``rest`` has ``n_after`` items."""
    if len(args) == n_after + 1:
        return args[0], None, args[1:]
    if len(args) == n_after + 2:
        return args[0], args[1], args[2:]
    raise InputError(f"usage: {what}")


def cmd_accept(opts, out) -> int:
    path, start, rest = _file_and_start(opts.args, 1, "accept FILE [START] WORD")
    rec = recognizer(_load(path), start, opts.fuel)
    w = split_word(rest[0], rec.inputs)
    value = rec.run(w)
    if opts.format == "json":
        shown = rec.show(value)
        out.write(json.dumps({"word": show_word(w, rec.inputs), "value": shown}) + "\n")
    else:
        out.write(rec.show(value) + "\n")
    return status_of(value, rec)


def _sample_words(inputs, max_len: int, count: int, seed: int):
    rng = random.Random(seed)
    picked = set()
    letters = sorted(inputs)
    for _ in range(count):
        n = rng.randint(0, max_len)
        picked.add(tuple(rng.choice(letters) for _ in range(n)))
    return sorted(picked, key=lambda w: (len(w), w))


def cmd_enumerate(opts, out) -> int:
    path, start, _ = _file_and_start(opts.args, 0, "enumerate FILE [START] --max-len N")
    rec = recognizer(_load(path), start, opts.fuel)
    if opts.sample is not None:
        candidates = _sample_words(rec.inputs, opts.max_len, opts.sample, opts.seed)
    else:
        candidates = [tuple(w) for w in words(sorted(rec.inputs), opts.max_len)]
    accepted, unknown = [], []
    for w in candidates:
        value = rec.run(w)
        if value is Unknown:
            unknown.append(w)
        elif rec.accepts(value):
            accepted.append(w)
    shown = [show_word(w, rec.inputs) for w in accepted]
    undecided = [show_word(w, rec.inputs) for w in unknown]
    if opts.format == "json":
        out.write(json.dumps({"accepted": shown, "unknown": undecided}) + "\n")
    else:
        for s in shown:
            out.write(s + "\n")
        for s in undecided:
            out.write(f"unknown: {s}\n")
    return UNKNOWN if unknown else OK


def _exact_view(obj, start):
    """(coalgebra, state, eq) for objects with exact derivative structure, else None."""
    if isinstance(obj, ff.AutomatonFile) and not obj.automaton.has_tau:
        m = obj.automaton
        if _predicate_valued(m.algebra):
            return None
        c = PowersetCoalgebra(m)
        return c, c.initial(_start_of(m, start)), m.algebra.eq
    if isinstance(obj, ff.ExpressionFile) and isinstance(obj.lang, ReactiveLanguage):
        return obj.lang, obj.expr, obj.lang.algebra.eq
    return None


def _equiv_args(args: list):
    if len(args) == 2:
        return args[0], None, args[1], None
    if len(args) == 4:
        return args[0], args[1], args[2], args[3]
    if len(args) == 3:
        # FILE1 START1 FILE2 or FILE1 FILE2 START2: a start is never an existing file
        from pathlib import Path
        if Path(args[1]).is_file():
            return args[0], None, args[1], args[2]
        return args[0], args[1], args[2], None
    raise InputError("usage: equiv FILE1 [START1] FILE2 [START2]")


def cmd_equiv(opts, out) -> int:
    p1, s1, p2, s2 = _equiv_args(opts.args)
    o1, o2 = _load(p1), _load(p2)
    r1, r2 = recognizer(o1, s1, opts.fuel), recognizer(o2, s2, opts.fuel)
    if set(r1.inputs) != set(r2.inputs):
        raise InputError("the two objects have different input alphabets")
    inputs = sorted(r1.inputs)
    verdict = None
    if opts.mode == "exact":
        v1, v2 = _exact_view(o1, s1), _exact_view(o2, s2)
        if v1 is None or v2 is None:
            verdict = Verdict(None, reason="exact mode needs automata or reactive expressions; use --mode bounded")
        else:
            verdict = bisimilar(v1[0], v1[1], v2[0], v2[1], inputs, v1[2], opts.max_states)
    else:
        verdict = Verdict(True)
        for w in words(inputs, opts.bound):
            a, b = r1.run(tuple(w)), r2.run(tuple(w))
            if a is Unknown or b is Unknown:
                verdict = Verdict(None, reason=f"fuel exhausted on {show_word(tuple(w), inputs)}")
                break
            if r1.accepts(a) != r2.accepts(b) or (not isinstance(a, (bool, Outcome)) and not r1.eq(a, b)):
                verdict = Verdict(False, tuple(w))
                break
    if verdict.equivalent is False:
        text = f"inequivalent: {show_word(tuple(verdict.witness), inputs)}"
    else:
        text = str(verdict)
    if opts.format == "json":
        out.write(json.dumps({"verdict": text.split(":")[0],
                              "witness": None if verdict.witness is None
                              else show_word(tuple(verdict.witness), inputs),
                              "reason": verdict.reason or None}) + "\n")
    else:
        out.write(text + "\n")
    if verdict.equivalent is None:
        return UNKNOWN
    return OK if verdict.equivalent else NO


def _need(obj, cls, kind):
    if not isinstance(obj, cls):
        raise InputError(f"{kind} expects a {cls.__name__} file, got {type(obj).__name__}")
    return obj


def _monad_kind(f: ff.AutomatonFile, cls, kind):
    if not isinstance(f.automaton.monad, cls):
        raise InputError(f"{kind} expects an automaton over {cls.__name__}")


def convert(kind: str, obj, start, max_states: int):
    if kind == "expr2aut":
        f = _need(obj, ff.ExpressionFile, kind)
        if f.kind != "reactive":
            raise InputError("expr2aut expects a reactive expression")
        aut, x0 = expr_to_automaton(f.lang, f.expr)
        return ff.AutomatonFile(aut), x0
    if kind == "aut2expr":
        f = _need(obj, ff.AutomatonFile, kind)
        m = f.automaton
        lang = ReactiveLanguage(m.monad, m.inputs, m.algebra)
        return ff.ExpressionFile("reactive", lang, automaton_to_expr(m, _start_of(m, start), lang)), None
    if kind == "dpda2aut":
        aut, x0, bottom = dpda_to_stack_automaton(_need(obj, DPDA, kind))
        return ff.AutomatonFile(aut, bottom), x0
    if kind == "aut2dpda":
        f = _need(obj, ff.AutomatonFile, kind)
        _monad_kind(f, StackOps, kind)
        return stack_automaton_to_dpda(f.automaton, _start_of(f.automaton, start), f.store or ""), None
    if kind == "npdqrt2aut":
        aut, x0, stacks = npdqrt_to_multistack_automaton(_need(obj, NPDQRT, kind))
        return ff.AutomatonFile(aut, stacks), x0
    if kind == "aut2npdqrt":
        f = _need(obj, ff.AutomatonFile, kind)
        _monad_kind(f, MultiStackOps, kind)
        return multistack_automaton_to_npdqrt(f.automaton, _start_of(f.automaton, start), f.store), None
    if kind == "dtm2rdtm":
        return dtm_to_rdtm(_need(obj, DTM, kind)), None
    if kind == "rdtm2tape":
        aut, x0 = rdtm_to_tape_automaton(_need(obj, RDTM, kind))
        return ff.AutomatonFile(aut), x0
    if kind == "tape2rdtm":
        f = _need(obj, ff.AutomatonFile, kind)
        return materialize(tape_automaton_to_rdtm(f.automaton, _start_of(f.automaton, start)),
                           max_states), None
    if kind == "cfg2expr":
        e, lang = cfg_to_algexpr(_need(obj, Grammar, kind))
        return ff.ExpressionFile("algebraic", lang, e), None
    raise InputError(f"unknown conversion {kind}")


CONVERSIONS = ("expr2aut", "aut2expr", "dpda2aut", "aut2dpda", "npdqrt2aut", "aut2npdqrt",
               "dtm2rdtm", "rdtm2tape", "tape2rdtm", "cfg2expr")


def cmd_convert(opts, out) -> int:
    if not opts.args:
        raise InputError("usage: convert KIND FILE [START]")
    kind, rest = opts.args[0], opts.args[1:]
    if kind not in CONVERSIONS:
        raise InputError(f"unknown conversion {kind}; choose from {', '.join(CONVERSIONS)}")
    path, start, _ = _file_and_start(rest, 0, "convert KIND FILE [START]")
    result, x0 = convert(kind, _load(path), start, opts.max_states)
    if isinstance(result, ff.AutomatonFile) and x0 is not None:
        text = ff.dumps(result, start=x0)
    else:
        text = ff.dumps(result)
    if opts.format == "json":
        text = json.dumps(_to_json(ff.to_sexpr(result))) + "\n"
    if opts.output:
        with open(opts.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return OK


def _to_json(x):
    if isinstance(x, list):
        return [_to_json(y) for y in x]
    return str(x)


def problems_of(obj) -> list[str]:
    if isinstance(obj, (DPDA, DTM)):
        return list(obj.problems()) if hasattr(obj, "problems") else []
    if isinstance(obj, ff.ExpressionFile) and isinstance(obj.lang, ReactiveLanguage):
        try:
            obj.lang.check(obj.expr)
        except ExprError as err:
            return [str(err)]
    if isinstance(obj, ff.AutomatonFile):
        m = obj.automaton
        return [f"state {x} is unreachable" for x in _unreachable(m)]
    return []


def _unreachable(m: TAutomaton):
    seen, todo = {m.start}, [m.start]
    letters = tuple(m.inputs) + ((TAU,) if m.has_tau else ())
    while todo:
        x = todo.pop()
        for a in letters:
            for y in m.monad.support(m.trans[(a, x)]):
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
    return [x for x in m.states if x not in seen]


def cmd_check(opts, out) -> int:
    if len(opts.args) != 1:
        raise InputError("usage: check FILE")
    obj = _load(opts.args[0])
    found = problems_of(obj)
    kind = type(obj.automaton if isinstance(obj, ff.AutomatonFile) else obj).__name__
    if opts.format == "json":
        out.write(json.dumps({"kind": kind, "problems": found}) + "\n")
    else:
        out.write(f"{kind}: ok\n" if not found else "".join(f"{p}\n" for p in found))
    return NO if found else OK


COMMANDS = {"accept": cmd_accept, "enumerate": cmd_enumerate, "equiv": cmd_equiv,
            "convert": cmd_convert, "check": cmd_check}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tautomata", description="Query and convert automata files.")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("args", nargs="*")
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL)
    p.add_argument("--max-states", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("sexpr", "json"), default="sexpr")
    p.add_argument("--max-len", type=int, default=6)
    p.add_argument("--sample", type=int, default=None, help="test this many random words instead")
    p.add_argument("--mode", choices=("exact", "bounded"), default="exact")
    p.add_argument("--bound", type=int, default=8)
    p.add_argument("-o", "--output")
    return p


def _split_argv(argv: list[str]) -> list[str]:
    """Let options follow ``--``: only bare words after it are positional."""
    if "--" not in argv:
        return argv
    i = argv.index("--")
    head, tail = argv[:i], argv[i + 1:]
    opts, words_ = [], []
    j = 0
    while j < len(tail):
        t = tail[j]
        if t.startswith("--") and len(t) > 2:
            opts.append(t)
            if "=" not in t and j + 1 < len(tail):
                opts.append(tail[j + 1])
                j += 1
        else:
            words_.append(t)
        j += 1
    return head + opts + ["--"] + words_


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        opts = parser.parse_intermixed_args(_split_argv(argv))
    except SystemExit as exc:
        return OK if exc.code == 0 else BAD_INPUT
    try:
        return COMMANDS[opts.command](opts, out)
    except (InputError, AutomatonError, ExprError, GrammarError, MachineError, ff.FormatError) as err:
        sys.stderr.write(f"error: {err}\n")
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
