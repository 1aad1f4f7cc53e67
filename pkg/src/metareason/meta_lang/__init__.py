"""The meta-question DSL: AST, canonical grammar, parser, exact interpreter, traces."""

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
    Trace,
    TraceStep,
    Value,
    ValueOf,
    format_value,
    is_symbol,
    quote_string,
    validate_program,
)
from .errors import (
    DivideByZeroError,
    DuplicateSymbolError,
    EvalTypeError,
    InvalidProgramError,
    MetaLangError,
    ParseError,
    UndefinedSymbolError,
)
from .interpreter import eval_program
from .parser import parse_meta, split_clauses
from .renderer import render_inits, render_meta, render_query, render_statement

__all__ = [
    "Add",
    "ConcatOf",
    "Div",
    "DivideByZeroError",
    "DuplicateSymbolError",
    "EvalTypeError",
    "Flip",
    "InvalidProgramError",
    "IsEqual",
    "LastOf",
    "MetaLangError",
    "MetaProgram",
    "Mul",
    "OptionOf",
    "ParseError",
    "Query",
    "Says",
    "Statement",
    "Sub",
    "Swap",
    "Trace",
    "TraceStep",
    "UndefinedSymbolError",
    "Value",
    "ValueOf",
    "eval_program",
    "format_value",
    "is_symbol",
    "parse_meta",
    "quote_string",
    "render_inits",
    "render_meta",
    "render_query",
    "render_statement",
    "split_clauses",
    "validate_program",
]
