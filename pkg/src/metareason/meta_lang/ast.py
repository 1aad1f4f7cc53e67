"""Core types of the meta-question language: values, statements, queries, programs, traces."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DivideByZeroError,
    DuplicateSymbolError,
    InvalidProgramError,
    UndefinedSymbolError,
)

# Values are exact. Python bool stands in for the 0/1 bit kind (it is
# accepted wherever an integer is), ints are arbitrary precision, and
# rationals are fractions.Fraction (normalized, denominator > 0 by
# construction). No floats anywhere.
Value = bool | int | Fraction | str

SYMBOL_PATTERN = re.compile(r"[A-Z]{1,2}\Z")


def is_symbol(name: str) -> bool:
    return bool(SYMBOL_PATTERN.match(name))


def quote_string(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_value(value: Value) -> str:
    """Render a value the way the canonical grammar spells it."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, Fraction)):
        return str(value)
    return quote_string(value)


@dataclass(frozen=True)
class Add:
    sym: str
    amount: int


@dataclass(frozen=True)
class Sub:
    sym: str
    amount: int


@dataclass(frozen=True)
class Mul:
    sym: str
    factor: int


@dataclass(frozen=True)
class Div:
    sym: str
    divisor: int


@dataclass(frozen=True)
class Swap:
    left: str
    right: str


@dataclass(frozen=True)
class Says:
    """``speaker says target = claimed``: speaker becomes 1 if the claim holds, else 0.

    The speaker symbol is introduced by this statement and must be fresh.
    """

    speaker: str
    target: str
    claimed: Value


@dataclass(frozen=True)
class Flip:
    sym: str


@dataclass(frozen=True)
class LastOf:
    """``sym = last("word")``: define sym as the final character of a string literal."""

    sym: str
    literal: str


Statement = Add | Sub | Mul | Div | Swap | Says | Flip | LastOf


@dataclass(frozen=True)
class ValueOf:
    sym: str


@dataclass(frozen=True)
class IsEqual:
    sym: str
    value: Value


@dataclass(frozen=True)
class OptionOf:
    sym: str


@dataclass(frozen=True)
class ConcatOf:
    syms: tuple[str, ...]


Query = ValueOf | IsEqual | OptionOf | ConcatOf


@dataclass(frozen=True)
class MetaProgram:
    """Initial assignments, update statements, and a final query, in order."""

    inits: tuple[tuple[str, Value], ...]
    stmts: tuple[Statement, ...]
    query: Query


@dataclass(frozen=True)
class TraceStep:
    stmt: Statement
    env: tuple[tuple[str, Value], ...]


@dataclass(frozen=True)
class Trace:
    """Step-by-step execution record: one environment snapshot per statement."""

    steps: tuple[TraceStep, ...]
    final_env: tuple[tuple[str, Value], ...]
    answer: Value

    def final(self) -> dict[str, Value]:
        return dict(self.final_env)

    def value_of(self, sym: str) -> Value:
        env = dict(self.final_env)
        if sym not in env:
            raise UndefinedSymbolError(f"symbol {sym} is not defined")
        return env[sym]


def _check_symbol(sym: str) -> None:
    if not isinstance(sym, str) or not is_symbol(sym):
        raise InvalidProgramError(f"invalid symbol {sym!r}: must match [A-Z]{{1,2}}")


def _check_value(value: Value) -> None:
    if not isinstance(value, (bool, int, Fraction, str)):
        raise InvalidProgramError(f"unsupported value {value!r}")


def _need(sym: str, defined: set[str]) -> None:
    _check_symbol(sym)
    if sym not in defined:
        raise UndefinedSymbolError(f"symbol {sym} used before definition")


def _check_statement(stmt: Statement, defined: set[str]) -> None:
    match stmt:
        case Add(sym=sym) | Sub(sym=sym) | Mul(sym=sym) | Flip(sym=sym):
            _need(sym, defined)
        case Div(sym=sym, divisor=divisor):
            _need(sym, defined)
            if divisor == 0:
                raise DivideByZeroError(f"division of {sym} by zero")
        case Swap(left=left, right=right):
            _need(left, defined)
            _need(right, defined)
            if left == right:
                raise InvalidProgramError(f"swap needs two distinct symbols, got {left} twice")
        case Says(speaker=speaker, target=target, claimed=claimed):
            _need(target, defined)
            _check_symbol(speaker)
            _check_value(claimed)
            if speaker in defined:
                raise DuplicateSymbolError(f"symbol {speaker} re-introduced by a says statement")
            defined.add(speaker)
        case LastOf(sym=sym, literal=literal):
            _check_symbol(sym)
            if sym in defined:
                raise DuplicateSymbolError(f"symbol {sym} re-introduced by a string definition")
            if not literal:
                raise InvalidProgramError("last() needs a nonempty literal")
            defined.add(sym)
        case _:
            raise InvalidProgramError(f"unknown statement {stmt!r}")


def _check_query(query: Query, defined: set[str]) -> None:
    match query:
        case ValueOf(sym=sym) | OptionOf(sym=sym):
            _need(sym, defined)
        case IsEqual(sym=sym, value=value):
            _need(sym, defined)
            _check_value(value)
        case ConcatOf(syms=syms):
            if not syms:
                raise InvalidProgramError("concatenation query needs at least one symbol")
            for sym in syms:
                _need(sym, defined)
        case _:
            raise InvalidProgramError(f"unknown query {query!r}")


def validate_program(program: MetaProgram) -> None:
    """Check well-formedness; raises a MetaLangError subclass on the first violation.

    Well-formed means: init symbols pairwise distinct, every symbol defined
    before use (by init, says-introduction, or string definition), swap
    arguments distinct, literal divisors nonzero, string literals nonempty.
    """
    defined: set[str] = set()
    for sym, value in program.inits:
        _check_symbol(sym)
        _check_value(value)
        if sym in defined:
            raise DuplicateSymbolError(f"symbol {sym} initialized twice")
        defined.add(sym)
    for stmt in program.stmts:
        _check_statement(stmt, defined)
    _check_query(program.query, defined)
