"""Canonical text rendering for meta-programs.

The canonical grammar is sentence-per-statement; rendering then parsing
gives back a structurally equal program.
"""

from __future__ import annotations

from .ast import (
    Add,
    ConcatOf,
    Div,
    Flip,
    IsEqual,
    LastOf,
    MetaProgram,
    Mul,
    OptionOf,
    Query,
    Says,
    Statement,
    Sub,
    Swap,
    Value,
    ValueOf,
    format_value,
    quote_string,
)


def render_inits(inits: tuple[tuple[str, Value], ...]) -> str:
    """The init sentence, e.g. ``It is known that A = 1, B = 2, C = 3.``"""
    pairs = ", ".join(f"{sym} = {format_value(value)}" for sym, value in inits)
    return f"It is known that {pairs}."


def render_statement(stmt: Statement) -> str:
    """One statement sentence, without the trailing period."""
    match stmt:
        case Add(sym=sym, amount=amount):
            return f"Add {amount} to {sym}"
        case Sub(sym=sym, amount=amount):
            return f"Subtract {amount} from {sym}"
        case Mul(sym=sym, factor=factor):
            return f"Multiply {sym} by {factor}"
        case Div(sym=sym, divisor=divisor):
            return f"Divide {sym} by {divisor}"
        case Swap(left=left, right=right):
            return f"{left} and {right} swap"
        case Says(speaker=speaker, target=target, claimed=claimed):
            return f"{speaker} says {target} = {format_value(claimed)}"
        case Flip(sym=sym):
            return f"Flip {sym}"
        case LastOf(sym=sym, literal=literal):
            return f"{sym} = last({quote_string(literal)})"
    raise ValueError(f"unknown statement {stmt!r}")


def render_query(query: Query) -> str:
    """The query sentence, including the question mark."""
    match query:
        case ValueOf(sym=sym):
            return f"What is the value of {sym}?"
        case IsEqual(sym=sym, value=value):
            return f"Is {sym} = {format_value(value)}?"
        case OptionOf(sym=sym):
            return f"Which option equals {sym}?"
        case ConcatOf(syms=syms):
            return f"What is the concatenation of {' and '.join(syms)}?"
    raise ValueError(f"unknown query {query!r}")


def render_meta(program: MetaProgram) -> str:
    """Deterministic canonical text for a well-formed program."""
    sentences = []
    if program.inits:
        sentences.append(render_inits(program.inits))
    for stmt in program.stmts:
        sentences.append(render_statement(stmt) + ".")
    sentences.append(render_query(program.query))
    return " ".join(sentences)
