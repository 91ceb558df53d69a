"""Automata whose transitions land in a monad: traces, expressions, machine bridges."""

__version__ = "0.1.0"
