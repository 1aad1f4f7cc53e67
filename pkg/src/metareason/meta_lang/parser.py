"""Parser for the meta-question language.

Accepts canonical renderings (``parse_meta(render_meta(p)) == p``) plus the
looser connective phrasings seen in running text ("..., then subtract 4
from A, and finally multiply A by 2, now what is the value of A?"):
clause connectives after a comma start a new sentence and leading
connective words are dropped before matching.
"""

from __future__ import annotations

import re
from fractions import Fraction

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
    validate_program,
)
from .errors import ParseError

_SYM = r"[A-Z]{1,2}"
_NUM = r"-?\d+"
_QUOTED = r'"(?:[^"\\]|\\.)*"'
_VAL = rf"(?:{_NUM}(?:\s*/\s*\d+)?|{_QUOTED})"

_INIT = re.compile(rf"It\s+is\s+known(?:\s+that)?\s+(?P<body>.+)\Z")
_PAIR = re.compile(rf"(?P<sym>{_SYM})\s*=\s*(?P<val>{_VAL})\Z")

_STATEMENTS: tuple[tuple[re.Pattern[str], str], ...] = (
    (re.compile(rf"Add\s+(?P<num>{_NUM})\s+to\s+(?P<sym>{_SYM})\Z"), "add"),
    (re.compile(rf"Subtract\s+(?P<num>{_NUM})\s+from\s+(?P<sym>{_SYM})\Z"), "sub"),
    (re.compile(rf"Multiply\s+(?P<sym>{_SYM})\s+by\s+(?P<num>{_NUM})\Z"), "mul"),
    (re.compile(rf"Divide\s+(?P<sym>{_SYM})\s+by\s+(?P<num>{_NUM})\Z"), "div"),
    (re.compile(rf"(?P<a>{_SYM})\s+and\s+(?P<b>{_SYM})\s+swap\Z"), "swap"),
    (re.compile(rf"(?P<speaker>{_SYM})\s+says\s+(?P<target>{_SYM})\s*=\s*(?P<val>{_VAL})\Z"), "says"),
    (re.compile(rf"Flip\s+(?P<sym>{_SYM})\Z"), "flip"),
    (re.compile(rf"(?P<sym>{_SYM})\s*=\s*last\(\s*(?P<lit>{_QUOTED})\s*\)\Z"), "last"),
)

_Q_VALUE = re.compile(rf"What\s+is\s+the\s+value\s+of\s+(?P<sym>{_SYM})\?\Z")
_Q_EQ = re.compile(rf"Is\s+(?P<sym>{_SYM})\s*=\s*(?P<val>{_VAL})\?\Z")
_Q_OPT = re.compile(rf"Which\s+option\s+equals\s+(?P<sym>{_SYM})\?\Z")
_Q_CONCAT = re.compile(
    rf"What\s+is\s+the\s+concatenation\s+of\s+(?P<syms>{_SYM}(?:\s+and\s+{_SYM})*)\?\Z"
)

_COMMA_CONNECTIVE = re.compile(
    r"\s*(?:and\s+)?(?:then|finally|now|next|lastly|after\s+that)\b", re.IGNORECASE
)
_LEADING_CONNECTIVE = re.compile(
    r"^(?:(?:and|then|finally|now|next|lastly|after\s+that)\b[,\s]+)+", re.IGNORECASE
)

_HINTS: tuple[tuple[str, str], ...] = (
    ("it is known", 'an init sentence: It is known that SYM = VAL, SYM = VAL, ...'),
    ("add", "Add NUM to SYM."),
    ("subtract", "Subtract NUM from SYM."),
    ("multiply", "Multiply SYM by NUM."),
    ("divide", "Divide SYM by NUM."),
    ("flip", "Flip SYM."),
    ("what is the value", "What is the value of SYM?"),
    ("what is the concatenation", "What is the concatenation of SYM and SYM ...?"),
    ("which", "Which option equals SYM?"),
    ("is ", "Is SYM = VAL?"),
)


def split_clauses(text: str) -> list[str]:
    """Split text into clause fragments.

    Quote-aware: terminators and commas inside string literals do not
    split. Sentences end at ``.`` or ``?``; a comma followed by a clause
    connective also ends a fragment. Leading connective words are dropped;
    the query's ``?`` is kept.
    """
    fragments: list[str] = []
    buf: list[str] = []
    in_quote = False
    escaped = False
    i = 0
    n = len(text)

    def flush(tail: str = "") -> None:
        frag = ("".join(buf) + tail).strip()
        frag = _LEADING_CONNECTIVE.sub("", frag).strip(" ,")
        if frag:
            fragments.append(frag)
        buf.clear()

    while i < n:
        ch = text[i]
        if in_quote:
            buf.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_quote = False
            i += 1
            continue
        if ch == '"':
            in_quote = True
            buf.append(ch)
            i += 1
            continue
        if ch in ".?" and (i + 1 >= n or text[i + 1].isspace()):
            flush("?" if ch == "?" else "")
            i += 1
            continue
        if ch == "," and _COMMA_CONNECTIVE.match(text, i + 1):
            flush()
            i += 1
            continue
        buf.append(ch)
        i += 1
    flush()
    return fragments


def _capitalized(fragment: str) -> str:
    return fragment[:1].upper() + fragment[1:]


def _hint_for(fragment: str) -> str:
    lowered = fragment.lower()
    for prefix, hint in _HINTS:
        if lowered.startswith(prefix):
            return hint
    if " says " in lowered:
        return "SYM says SYM = VAL."
    if " swap" in lowered:
        return "SYM and SYM swap."
    if "last(" in lowered:
        return 'SYM = last("WORD").'
    return "an init, statement, or query sentence in the canonical grammar"


def _unquote(text: str) -> str:
    body = text[1:-1]
    return re.sub(r"\\(.)", r"\1", body)


def _parse_value(text: str, index: int) -> Value:
    text = text.strip()
    if text.startswith('"'):
        return _unquote(text)
    if "/" in text:
        num_text, den_text = text.split("/", 1)
        den = int(den_text.strip())
        if den == 0:
            raise ParseError(f"zero denominator in {text!r}", index, "a nonzero denominator")
        return Fraction(int(num_text.strip()), den)
    number = int(text)
    if number in (0, 1):
        return bool(number)
    return number


def _parse_init_pairs(body: str, index: int) -> list[tuple[str, Value]]:
    pairs: list[tuple[str, Value]] = []
    for chunk in _split_top_commas(body):
        chunk = chunk.strip()
        m = _PAIR.match(chunk)
        if not m:
            raise ParseError(
                f"bad init pair {chunk!r}", index, 'SYM = VAL pairs separated by ", "'
            )
        pairs.append((m.group("sym"), _parse_value(m.group("val"), index)))
    if not pairs:
        raise ParseError("empty init sentence", index, "at least one SYM = VAL pair")
    return pairs


def _split_top_commas(text: str) -> list[str]:
    parts: list[str] = []
    buf: list[str] = []
    in_quote = False
    escaped = False
    for ch in text:
        if in_quote:
            buf.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_quote = False
            continue
        if ch == '"':
            in_quote = True
            buf.append(ch)
            continue
        if ch == ",":
            parts.append("".join(buf))
            buf.clear()
            continue
        buf.append(ch)
    parts.append("".join(buf))
    return parts


def _match_statement(fragment: str, index: int) -> Statement | None:
    normalized = _capitalized(fragment)
    for pattern, kind in _STATEMENTS:
        m = pattern.match(normalized)
        if not m:
            continue
        if kind == "add":
            return Add(sym=m.group("sym"), amount=int(m.group("num")))
        if kind == "sub":
            return Sub(sym=m.group("sym"), amount=int(m.group("num")))
        if kind == "mul":
            return Mul(sym=m.group("sym"), factor=int(m.group("num")))
        if kind == "div":
            return Div(sym=m.group("sym"), divisor=int(m.group("num")))
        if kind == "swap":
            return Swap(left=m.group("a"), right=m.group("b"))
        if kind == "says":
            return Says(
                speaker=m.group("speaker"),
                target=m.group("target"),
                claimed=_parse_value(m.group("val"), index),
            )
        if kind == "flip":
            return Flip(sym=m.group("sym"))
        if kind == "last":
            return LastOf(sym=m.group("sym"), literal=_unquote(m.group("lit").strip()))
    return None


def _parse_statement(fragment: str, index: int) -> Statement:
    stmt = _match_statement(fragment, index)
    if stmt is not None:
        return stmt
    if _INIT.match(_capitalized(fragment)):
        raise ParseError(
            "init sentence must come first", index, "statements after the init sentence"
        )
    if fragment.endswith("?"):
        raise ParseError(
            "query must be the final sentence", index, "a statement sentence"
        )
    raise ParseError(f"cannot parse {fragment!r}", index, _hint_for(fragment))


def _parse_query(fragment: str, index: int) -> Query:
    normalized = _capitalized(fragment)
    m = _Q_VALUE.match(normalized)
    if m:
        return ValueOf(sym=m.group("sym"))
    m = _Q_EQ.match(normalized)
    if m:
        return IsEqual(sym=m.group("sym"), value=_parse_value(m.group("val"), index))
    m = _Q_OPT.match(normalized)
    if m:
        return OptionOf(sym=m.group("sym"))
    m = _Q_CONCAT.match(normalized)
    if m:
        syms = tuple(re.findall(_SYM, m.group("syms")))
        return ConcatOf(syms=syms)
    if _match_statement(fragment, index) is not None or _INIT.match(normalized):
        raise ParseError(
            "program must end with a query", index, "a query sentence ending with '?'"
        )
    raise ParseError(f"cannot parse {fragment!r}", index, _hint_for(fragment))


def parse_meta(text: str) -> MetaProgram:
    """Parse meta-question text into a validated program.

    Raises ParseError (with a 1-based sentence index and an expected-form
    hint) on syntax problems, and the validation errors from
    ``validate_program`` on semantic ones.
    """
    fragments = split_clauses(text)
    if not fragments:
        raise ParseError("empty input", 1, "an init sentence or a query")
    inits: list[tuple[str, Value]] = []
    start = 0
    m = _INIT.match(_capitalized(fragments[0]))
    if m:
        inits = _parse_init_pairs(m.group("body"), 1)
        start = 1
    if start >= len(fragments):
        raise ParseError(
            "missing query sentence", len(fragments), "a query sentence ending with '?'"
        )
    stmts = tuple(
        _parse_statement(fragment, position + 1)
        for position, fragment in enumerate(fragments[start:-1], start=start)
    )
    query = _parse_query(fragments[-1], len(fragments))
    program = MetaProgram(inits=tuple(inits), stmts=stmts, query=query)
    validate_program(program)
    return program
