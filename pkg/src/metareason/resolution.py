"""Semantic resolution: deterministic reduction of template-family task
instances to (entity table, meta-program), and the inverse mapping from
symbolic answers back to surface answers.

Only the template families are resolved from raw text (option-tracking
swaps, truth chains, coin flips, last-letter concatenation, and template
arithmetic). Free-form arithmetic is not parsed; instances may instead
carry an externally authored meta rewrite as canonical DSL text.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

from .meta_lang import (
    ConcatOf,
    Flip,
    IsEqual,
    LastOf,
    MetaProgram,
    OptionOf,
    Says,
    Swap,
    Trace,
    ValueOf,
    eval_program,
    parse_meta,
)
from .meta_lang.ast import Add, Div, Mul, Sub, Value


class Task(str, Enum):
    MA = "MA"
    AS = "AS"
    LLC = "LLC"
    CF = "CF"
    WOL = "WoL"
    TSO3 = "TSO3"
    TSO5 = "TSO5"
    TSO7 = "TSO7"


TSO_TASKS = (Task.TSO3, Task.TSO5, Task.TSO7)
OPTION_TASKS = frozenset(TSO_TASKS)
YES_NO_TASKS = frozenset({Task.CF, Task.WOL})
NUMERIC_TASKS = frozenset({Task.MA, Task.AS})


def task_from_string(text: str) -> Task:
    key = text.strip().upper()
    for task in Task:
        if task.value.upper() == key:
            return task
    raise ValueError(f"unknown task {text!r}")


def tso_object_count(task: Task) -> int:
    return {Task.TSO3: 3, Task.TSO5: 5, Task.TSO7: 7}[task]


class ResolutionError(Exception):
    """Base class for resolution failures."""


class TemplateMismatchError(ResolutionError):
    """Surface text does not parse against the family template."""

    def __init__(self, message: str, span: str | None = None):
        self.span = span
        if span is not None:
            message = f"{message}: {span!r}"
        super().__init__(message)


class UnsupportedTaskError(ResolutionError):
    """Free-form text with no template and no attached meta rewrite."""


class MissingOptionMapError(ResolutionError):
    """An option query was answered but no option map is attached."""


class ValueOutOfOptionRangeError(ResolutionError):
    """The symbolic answer does not index any option."""


class TooManyEntitiesError(ResolutionError):
    """More than 702 distinct entities (A..Z then AA..ZZ) in one instance."""


# Operation vocabulary accepted by the reducers. Kept as data so template
# variants stay a table edit, not a code change.
SWAP_VERBS = ("switch", "swap", "trade")
ASSIGN_PHRASES = ("is dancing with", "has", "is playing", "is holding")
TRUTH_WORDS = {"tells the truth": True, "lies": False}
FLIP_PHRASES = ("flips the coin", "reverses the coin")
NON_FLIP_PHRASES = ("does not flip the coin", "doesn't flip the coin")
ADD_VERBS = ("buys", "finds", "gets")
SUB_VERBS = ("loses", "eats", "gives away")


@dataclass(frozen=True)
class Span:
    """A surface substring with character offsets (-1 when synthetic)."""

    text: str
    start: int = -1
    end: int = -1


@dataclass(frozen=True)
class EntityTable:
    """Per-instance realization of the entity and operation mappings.

    ``entries`` assigns symbols to surface entity spans in first-mention
    order. ``op_spans`` carries one surface span per statement (indexed by
    statement position) plus, when known, a final span for the query
    clause indexed one past the last statement.
    """

    entries: tuple[tuple[Span, str], ...] = ()
    op_spans: tuple[tuple[Span, int], ...] = ()

    def symbol_for(self, text: str) -> str:
        for span, sym in self.entries:
            if span.text == text:
                return sym
        raise KeyError(text)

    def surface_for(self, sym: str) -> str:
        for span, entry_sym in self.entries:
            if entry_sym == sym:
                return span.text
        raise KeyError(sym)

    def as_dict(self) -> dict[str, str]:
        return {span.text: sym for span, sym in self.entries}


@dataclass(frozen=True)
class TaskInstance:
    """One benchmark item. ``meta`` optionally carries canonical DSL text."""

    id: str
    task: Task
    question: str
    options: tuple[str, ...] | None
    gold: str
    meta: str | None = None

    def to_json_dict(self) -> dict:
        record: dict = {
            "id": self.id,
            "task": self.task.value,
            "question": self.question,
        }
        if self.options is not None:
            record["options"] = list(self.options)
        record["answer"] = self.gold
        if self.meta is not None:
            record["meta"] = self.meta
        return record

    @classmethod
    def from_json_dict(cls, record: dict) -> "TaskInstance":
        options = record.get("options")
        return cls(
            id=str(record["id"]),
            task=task_from_string(record["task"]),
            question=record["question"],
            options=tuple(options) if options is not None else None,
            gold=str(record["answer"]),
            meta=record.get("meta"),
        )


def load_instances(path) -> list[TaskInstance]:
    instances = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                instances.append(TaskInstance.from_json_dict(json.loads(line)))
    return instances


def save_instances(path, instances: Iterable[TaskInstance]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for inst in instances:
            handle.write(json.dumps(inst.to_json_dict(), ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class MetaQuestion:
    """A resolved instance: program, entity table, and the option back-map."""

    program: MetaProgram
    table: EntityTable
    option_map: tuple[tuple[int, str], ...] | None = None


def symbol_name(index: int) -> str:
    """Deterministic symbol sequence A..Z, AA..AZ, BA..ZZ (702 total)."""
    if index < 0:
        raise ValueError("negative symbol index")
    if index < 26:
        return chr(ord("A") + index)
    index -= 26
    if index < 26 * 26:
        return chr(ord("A") + index // 26) + chr(ord("A") + index % 26)
    raise TooManyEntitiesError("more than 702 distinct entities")


def allocate_symbols(spans: Sequence[Span] | Sequence[str]) -> EntityTable:
    """Assign symbols to spans in first-mention order; repeats are idempotent."""
    if not spans:
        raise ValueError("no spans to allocate")
    entries: list[tuple[Span, str]] = []
    seen: dict[str, str] = {}
    for raw in spans:
        span = raw if isinstance(raw, Span) else Span(text=raw)
        if span.text in seen:
            continue
        sym = symbol_name(len(seen))
        seen[span.text] = sym
        entries.append((span, sym))
    return EntityTable(entries=tuple(entries))


def _sentences_with_offsets(text: str) -> list[Span]:
    """Split on sentence boundaries, keeping offsets; the final clause may
    be an unterminated cloze ("..., Alice is dancing with")."""
    spans = []
    for match in re.finditer(r"[^.?!]+[.?!]?", text):
        chunk = match.group(0).strip()
        if not chunk:
            continue
        start = match.start() + (len(match.group(0)) - len(match.group(0).lstrip()))
        spans.append(Span(text=chunk, start=start, end=start + len(chunk)))
    return spans


def _entity_entries(question: str, names: Sequence[str]) -> tuple[tuple[Span, str], ...]:
    entries = []
    for index, name in enumerate(names):
        start = question.find(name)
        span = Span(text=name, start=start, end=start + len(name) if start >= 0 else -1)
        entries.append((span, symbol_name(index)))
    return tuple(entries)


_WORD = r"[A-Za-z][\w'-]*"

_TSO_SWAP = re.compile(
    rf"^(?:(?:First|Then|Next|Finally|Later|After that),\s+)?"
    rf"(?P<a>{_WORD}) and (?P<b>{_WORD}) (?:{'|'.join(SWAP_VERBS)})\b.*$"
)
_TSO_QUERY = re.compile(rf"^At the end of [^,]+, (?P<person>{_WORD})\b.*$")
_TSO_SKIP = re.compile(r"^(?:Throughout|As the|During)\b")

_WOL_FIRST = re.compile(rf"^(?P<person>{_WORD}) (?P<claim>tells the truth|lies)\.$")
_WOL_SAYS = re.compile(
    rf"^(?P<speaker>{_WORD}) says (?P<target>{_WORD}) (?P<claim>tells the truth|lies)\.$"
)
_WOL_QUERY = re.compile(rf"^Does (?P<person>{_WORD}) tell the truth\?$")

_CF_FIRST = re.compile(r"^A coin is heads up\.$")
_CF_FLIP = re.compile(rf"^(?P<person>{_WORD}) (?:{'|'.join(FLIP_PHRASES)})\.$")
_CF_NON_FLIP = re.compile(rf"^(?P<person>{_WORD}) (?:{'|'.join(NON_FLIP_PHRASES)})\.$")
_CF_QUERY = re.compile(r"^Is the coin still heads up\?$")

_LLC_QUESTION = re.compile(
    r'^Take the last letters of the words in "(?P<name>[^"]+)" and concatenate them\.?$'
)

_ARITH_INTRO = re.compile(rf"^(?P<name>{_WORD}) has (?P<value>\d+) (?P<noun>{_WORD})\.$")
_ARITH_ADD = re.compile(
    rf"^(?P<name>{_WORD}) (?:{'|'.join(ADD_VERBS)}) (?P<amount>\d+) more (?P<noun>{_WORD})\.$"
)
_ARITH_SUB = re.compile(
    rf"^(?P<name>{_WORD}) (?:{'|'.join(SUB_VERBS)}) (?P<amount>\d+) (?P<noun>{_WORD})\.$"
)
_ARITH_MUL = re.compile(
    rf"^The number of (?P<noun>{_WORD}) (?P<name>{_WORD}) has is multiplied by (?P<factor>\d+)\.$"
)
_ARITH_DIV = re.compile(
    rf"^The number of (?P<noun>{_WORD}) (?P<name>{_WORD}) has is divided by (?P<divisor>\d+)\.$"
)
_ARITH_QUERY = re.compile(rf"^How many (?P<noun>{_WORD}) does (?P<name>{_WORD}) have now\?$")


def _resolve_tso(question: str, options: tuple[str, ...] | None) -> MetaQuestion:
    if not options:
        raise TemplateMismatchError("option-tracking question without options")
    sentences = _sentences_with_offsets(question)
    if len(sentences) < 3:
        raise TemplateMismatchError("too few sentences", question)
    assignment = next((s for s in sentences if ": " in s.text), None)
    if assignment is None:
        raise TemplateMismatchError("no initial-assignment sentence", sentences[0].text)

    pairs_text = assignment.text.split(": ", 1)[1].rstrip(".")
    persons: list[str] = []
    objects: list[str] = []
    for chunk in pairs_text.split(", "):
        chunk = chunk.strip()
        if chunk.startswith("and "):
            chunk = chunk[4:]
        for phrase in ASSIGN_PHRASES:
            marker = f" {phrase} "
            if marker in chunk:
                person, obj = chunk.split(marker, 1)
                persons.append(person.strip())
                objects.append(obj.strip())
                break
        else:
            raise TemplateMismatchError("bad assignment pair", chunk)
    if len(persons) != len(set(persons)) or len(objects) != len(set(objects)):
        raise TemplateMismatchError("repeated person or object in assignment", pairs_text)

    entries = _entity_entries(question, persons)
    table = {span.text: sym for span, sym in entries}

    swap_stmts: list[Swap] = []
    op_spans: list[tuple[Span, int]] = []
    query_span: Span | None = None
    for sentence in sentences:
        if sentence is assignment or _TSO_SKIP.match(sentence.text):
            continue
        swap = _TSO_SWAP.match(sentence.text)
        if swap:
            a, b = swap.group("a"), swap.group("b")
            if a not in table or b not in table:
                raise TemplateMismatchError("swap names an unknown person", sentence.text)
            op_spans.append((sentence, len(swap_stmts)))
            swap_stmts.append(Swap(left=table[a], right=table[b]))
            continue
        query = _TSO_QUERY.match(sentence.text)
        if query:
            query_span = sentence
            queried = query.group("person")
            if queried not in table:
                raise TemplateMismatchError("query names an unknown person", sentence.text)
            continue
        if sentence is sentences[0]:
            continue  # scene-setting intro
        raise TemplateMismatchError("unrecognized sentence", sentence.text)
    if query_span is None:
        raise TemplateMismatchError("no query clause", sentences[-1].text)

    queried = _TSO_QUERY.match(query_span.text).group("person")
    option_map = []
    for position, obj in enumerate(objects, start=1):
        try:
            letter = chr(ord("A") + options.index(obj))
        except ValueError:
            # options may carry truncated text; fall back to position
            letter = chr(ord("A") + position - 1)
        option_map.append((position, letter))

    program = MetaProgram(
        inits=tuple((table[p], value) for p, value in zip(persons, range(1, len(persons) + 1))),
        stmts=tuple(swap_stmts),
        query=OptionOf(sym=table[queried]),
    )
    full_table = EntityTable(
        entries=entries, op_spans=tuple(op_spans) + ((query_span, len(swap_stmts)),)
    )
    return MetaQuestion(program=program, table=full_table, option_map=tuple(option_map))


def _resolve_wol(question: str, options: tuple[str, ...] | None) -> MetaQuestion:
    del options
    sentences = _sentences_with_offsets(question)
    if len(sentences) < 3:
        raise TemplateMismatchError("too few sentences", question)
    first = _WOL_FIRST.match(sentences[0].text)
    if not first:
        raise TemplateMismatchError("bad opening sentence", sentences[0].text)
    last = _WOL_QUERY.match(sentences[-1].text)
    if not last:
        raise TemplateMismatchError("bad query sentence", sentences[-1].text)

    order: list[str] = [first.group("person")]
    table: dict[str, str] = {first.group("person"): symbol_name(0)}
    stmts: list[Says] = []
    op_spans: list[tuple[Span, int]] = []
    for sentence in sentences[1:-1]:
        says = _WOL_SAYS.match(sentence.text)
        if not says:
            raise TemplateMismatchError("bad chain sentence", sentence.text)
        speaker, target = says.group("speaker"), says.group("target")
        if target not in table:
            raise TemplateMismatchError("claim about an unknown person", sentence.text)
        if speaker in table:
            raise TemplateMismatchError("speaker already introduced", sentence.text)
        table[speaker] = symbol_name(len(order))
        order.append(speaker)
        op_spans.append((sentence, len(stmts)))
        stmts.append(
            Says(speaker=table[speaker], target=table[target], claimed=TRUTH_WORDS[says.group("claim")])
        )
    queried = last.group("person")
    if queried not in table:
        raise TemplateMismatchError("query names an unknown person", sentences[-1].text)

    program = MetaProgram(
        inits=((table[order[0]], TRUTH_WORDS[first.group("claim")]),),
        stmts=tuple(stmts),
        query=IsEqual(sym=table[queried], value=True),
    )
    full_table = EntityTable(
        entries=_entity_entries(question, order),
        op_spans=tuple(op_spans) + ((sentences[-1], len(stmts)),),
    )
    return MetaQuestion(program=program, table=full_table)


def _resolve_cf(question: str, options: tuple[str, ...] | None) -> MetaQuestion:
    del options
    sentences = _sentences_with_offsets(question)
    if len(sentences) < 2 or not _CF_FIRST.match(sentences[0].text):
        raise TemplateMismatchError("bad opening sentence", sentences[0].text if sentences else question)
    if not _CF_QUERY.match(sentences[-1].text):
        raise TemplateMismatchError("bad query sentence", sentences[-1].text)

    coin_start = question.find("coin")
    coin_span = Span(text="coin", start=coin_start, end=coin_start + 4)
    sym = symbol_name(0)
    stmts: list[Flip] = []
    op_spans: list[tuple[Span, int]] = []
    for sentence in sentences[1:-1]:
        if _CF_FLIP.match(sentence.text):
            op_spans.append((sentence, len(stmts)))
            stmts.append(Flip(sym=sym))
        elif _CF_NON_FLIP.match(sentence.text):
            continue  # non-flips change nothing and emit no statement
        else:
            raise TemplateMismatchError("bad flip sentence", sentence.text)

    program = MetaProgram(
        inits=((sym, True),),
        stmts=tuple(stmts),
        query=IsEqual(sym=sym, value=True),
    )
    table = EntityTable(
        entries=((coin_span, sym),),
        op_spans=tuple(op_spans) + ((sentences[-1], len(stmts)),),
    )
    return MetaQuestion(program=program, table=table)


def _resolve_llc(question: str, options: tuple[str, ...] | None) -> MetaQuestion:
    del options
    m = _LLC_QUESTION.match(question.strip())
    if not m:
        raise TemplateMismatchError("not a last-letter question", question)
    name = m.group("name")
    words = name.split()
    if not words:
        raise TemplateMismatchError("empty name", question)

    name_start = question.find('"') + 1
    spans: list[Span] = []
    cursor = 0
    for word in words:
        offset = name.find(word, cursor)
        spans.append(Span(text=word, start=name_start + offset, end=name_start + offset + len(word)))
        cursor = offset + len(word)

    table: dict[str, str] = {}
    entries: list[tuple[Span, str]] = []
    stmts: list[LastOf] = []
    op_spans: list[tuple[Span, int]] = []
    for span in spans:
        if span.text in table:
            continue
        sym = symbol_name(len(table))
        table[span.text] = sym
        entries.append((span, sym))
        op_spans.append((span, len(stmts)))
        stmts.append(LastOf(sym=sym, literal=span.text))

    question_span = Span(text=question.strip(), start=0, end=len(question.strip()))
    program = MetaProgram(
        inits=(),
        stmts=tuple(stmts),
        query=ConcatOf(syms=tuple(table[w] for w in words)),
    )
    full_table = EntityTable(
        entries=tuple(entries),
        op_spans=tuple(op_spans) + ((question_span, len(stmts)),),
    )
    return MetaQuestion(program=program, table=full_table)


def _resolve_arith(question: str, options: tuple[str, ...] | None) -> MetaQuestion:
    del options
    sentences = _sentences_with_offsets(question)
    if len(sentences) < 2:
        raise TemplateMismatchError("too few sentences", question)
    intro = _ARITH_INTRO.match(sentences[0].text)
    if not intro:
        raise TemplateMismatchError("bad opening sentence", sentences[0].text)
    query = _ARITH_QUERY.match(sentences[-1].text)
    if not query or query.group("name") != intro.group("name"):
        raise TemplateMismatchError("bad query sentence", sentences[-1].text)

    sym = symbol_name(0)
    stmts = []
    op_spans: list[tuple[Span, int]] = []
    for sentence in sentences[1:-1]:
        add = _ARITH_ADD.match(sentence.text)
        sub = _ARITH_SUB.match(sentence.text)
        mul = _ARITH_MUL.match(sentence.text)
        div = _ARITH_DIV.match(sentence.text)
        if add:
            stmt = Add(sym=sym, amount=int(add.group("amount")))
        elif sub:
            stmt = Sub(sym=sym, amount=int(sub.group("amount")))
        elif mul:
            stmt = Mul(sym=sym, factor=int(mul.group("factor")))
        elif div:
            stmt = Div(sym=sym, divisor=int(div.group("divisor")))
        else:
            raise TemplateMismatchError("bad operation sentence", sentence.text)
        op_spans.append((sentence, len(stmts)))
        stmts.append(stmt)

    program = MetaProgram(
        inits=((sym, int(intro.group("value"))),),
        stmts=tuple(stmts),
        query=ValueOf(sym=sym),
    )
    table = EntityTable(
        entries=_entity_entries(question, [intro.group("name")]),
        op_spans=tuple(op_spans) + ((sentences[-1], len(stmts)),),
    )
    return MetaQuestion(program=program, table=table)


def _from_attached_meta(inst: TaskInstance) -> MetaQuestion:
    program = parse_meta(inst.meta)
    option_map = None
    if isinstance(program.query, OptionOf) and inst.options:
        option_map = tuple(
            (position, chr(ord("A") + position - 1))
            for position in range(1, len(inst.options) + 1)
        )
    return MetaQuestion(program=program, table=EntityTable(), option_map=option_map)


_RESOLVERS = {
    Task.TSO3: _resolve_tso,
    Task.TSO5: _resolve_tso,
    Task.TSO7: _resolve_tso,
    Task.WOL: _resolve_wol,
    Task.CF: _resolve_cf,
    Task.LLC: _resolve_llc,
    Task.MA: _resolve_arith,
    Task.AS: _resolve_arith,
}


def resolve(inst: TaskInstance) -> MetaQuestion:
    """Reduce a surface instance to its meta-question.

    Template families are parsed deterministically; anything else must
    carry an attached meta rewrite. Raises TemplateMismatchError or, for
    free-form arithmetic without a rewrite, UnsupportedTaskError.
    """
    resolver = _RESOLVERS[inst.task]
    try:
        mq = resolver(inst.question, inst.options)
    except TemplateMismatchError:
        if inst.meta:
            return _from_attached_meta(inst)
        if inst.task in NUMERIC_TASKS:
            raise UnsupportedTaskError(
                f"free-form {inst.task.value} text needs an attached meta rewrite"
            ) from None
        raise
    if inst.task in OPTION_TASKS:
        expected = tso_object_count(inst.task)
        if len(mq.program.inits) != expected:
            raise TemplateMismatchError(
                f"expected {expected} tracked objects, found {len(mq.program.inits)}"
            )
    return mq


def resolve_any(question: str, options: tuple[str, ...] | None = None) -> tuple[Task, MetaQuestion]:
    """Resolve a bare question by trying each family template in turn."""
    candidates: list[tuple[Task, object]] = [
        (Task.CF, _resolve_cf),
        (Task.WOL, _resolve_wol),
        (Task.LLC, _resolve_llc),
        (Task.MA, _resolve_arith),
    ]
    for task, resolver in candidates:
        try:
            return task, resolver(question, options)
        except TemplateMismatchError:
            continue
    try:
        mq = _resolve_tso(question, options)
    except TemplateMismatchError:
        pass
    else:
        count = len(mq.program.inits)
        for task in TSO_TASKS:
            if tso_object_count(task) == count:
                return task, mq
        return Task.TSO3, mq
    raise TemplateMismatchError("no family template matches", question)


def surface_answer(mq: MetaQuestion, trace: Trace) -> str:
    """Map a trace's symbolic answer back to the surface answer string."""
    query = mq.program.query
    if isinstance(query, OptionOf):
        if not mq.option_map:
            raise MissingOptionMapError("option query without an option map")
        value = trace.answer
        for candidate, letter in mq.option_map:
            if candidate == value:
                return letter
        raise ValueOutOfOptionRangeError(f"answer {value!r} indexes no option")
    if isinstance(query, (IsEqual, ConcatOf)):
        return str(trace.answer)
    # ValueOf: exact decimal string; rationals stay exact ("7/2")
    value = trace.answer
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, Fraction)):
        return str(value)
    return str(value)


def solve_surface(inst: TaskInstance) -> str:
    """Resolve, evaluate, and back-map in one step."""
    mq = resolve(inst)
    return surface_answer(mq, eval_program(mq.program))
