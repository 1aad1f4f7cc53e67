"""Seeded synthetic generators for the template task families, each paired
with an independent brute-force oracle that supplies the gold answer.

The oracle recomputes answers from the surface text alone (array
simulation, parity counting, boolean folds, string slicing, exact
rational folds): it never touches the symbolic reducer or the
interpreter, so the two answer routes stay independent.
"""

from __future__ import annotations

import hashlib
import random
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .resolution import Task, TaskInstance, TemplateMismatchError


class GenerationError(Exception):
    """Base class for generator failures."""


class LexiconTooSmallError(GenerationError):
    """A lexicon cannot supply enough distinct entries for one instance."""


class InvalidParamsError(GenerationError):
    """Config parameters are out of range for the task."""


DEFAULT_PERSON_NAMES = (
    "Alice", "Bob", "Claire", "Dave", "Eve", "Fred", "Gertrude", "Helga",
    "Isabella", "Jamey", "Karl", "Liam", "Mia", "Noah", "Olga", "Paul",
    "Quinn", "Rosa", "Sam", "Tina", "Ursula", "Victor", "Wendy", "Yara",
    "Zack", "Sherrie", "Ryan", "Bernita", "Tamika", "Jerry", "Ka",
    "Millicent", "Vina", "Raymond", "Teressa", "Shalonda", "Kristian",
    "Fidel", "Delbert", "Leda", "Osvaldo", "Maybelle", "Fletcher", "Sima",
    "Inga", "Audrie", "Gwenn", "Conception",
)
DEFAULT_PARTNER_NAMES = (
    "Lola", "Rodrigo", "Patrick", "Melissa", "Jamie", "Ophelia", "Izzi",
    "Marco", "Dana", "Yuki", "Helena", "Stefan",
)
DEFAULT_BOOK_TITLES = (
    "Moby Dick", "The Great Gatsby", "Ulysses", "The Odyssey",
    "Frankenstein", "Hamlet", "Catch-22", "The Pearl", "Lolita",
    "The Fellowship of the Ring", "Brave New World", "Middlemarch",
)
DEFAULT_POSITIONS = (
    "goalkeeper", "left winger", "right winger", "striker",
    "center midfielder", "left midfielder", "right midfielder", "fullback",
    "benchwarmer", "cheerleader", "sweeper", "left back",
)
DEFAULT_OBJECT_NOUNS = (
    "apples", "oranges", "marbles", "pencils", "coins", "stickers",
    "candies", "cards", "balloons", "seashells",
)
DEFAULT_LLC_WORDS = (
    "Elon", "Musk", "Bill", "Gates", "Larry", "Page", "Sergey", "Brin",
    "Lady", "Gaga", "Taylor", "Swift", "Barack", "Obama", "Angela",
    "Merkel", "Serena", "Williams", "Roger", "Federer", "Marie", "Curie",
    "Albert", "Einstein", "Isaac", "Newton", "Ada", "Lovelace", "Alan",
    "Turing", "Grace", "Hopper", "Nelson", "Mandela", "Frida", "Kahlo",
)


def load_wordlist(path) -> tuple[str, ...]:
    """Read a one-entry-per-line lexicon file, skipping blanks."""
    with open(path, "r", encoding="utf-8") as handle:
        return tuple(line.strip() for line in handle if line.strip())


@dataclass(frozen=True)
class Lexicon:
    """Surface vocabulary for the templates; entries must be unique."""

    person_names: tuple[str, ...] = DEFAULT_PERSON_NAMES
    partner_names: tuple[str, ...] = DEFAULT_PARTNER_NAMES
    book_titles: tuple[str, ...] = DEFAULT_BOOK_TITLES
    positions: tuple[str, ...] = DEFAULT_POSITIONS
    object_nouns: tuple[str, ...] = DEFAULT_OBJECT_NOUNS
    llc_words: tuple[str, ...] = DEFAULT_LLC_WORDS


DEFAULT_LEXICON = Lexicon()


@dataclass(frozen=True)
class GenConfig:
    """Generation parameters. Only the fields for ``task`` are read."""

    task: Task
    count: int
    seed: int
    n_swaps: int | None = None          # tracking tasks; default = object count
    chain_len: int = 5                  # truth chains: number of persons
    n_people: int = 4                   # coin flips: number of actors
    n_words: int = 2                    # last-letter: words per name
    n_ops: int = 3                      # arithmetic: operation count
    value_range: tuple[int, int] = (2, 30)
    lexicon: Lexicon = field(default_factory=Lexicon)


def _validate(cfg: GenConfig) -> None:
    if cfg.count < 1:
        raise InvalidParamsError("count must be >= 1")
    if cfg.task in (Task.TSO3, Task.TSO5, Task.TSO7):
        if cfg.n_swaps is not None and cfg.n_swaps < 0:
            raise InvalidParamsError("n_swaps must be >= 0")
    elif cfg.task is Task.WOL:
        if cfg.chain_len < 2:
            raise InvalidParamsError("chain_len must be >= 2")
    elif cfg.task is Task.CF:
        if cfg.n_people < 1:
            raise InvalidParamsError("n_people must be >= 1")
    elif cfg.task is Task.LLC:
        if cfg.n_words < 1:
            raise InvalidParamsError("n_words must be >= 1")
    elif cfg.task in (Task.MA, Task.AS):
        if cfg.n_ops < 1:
            raise InvalidParamsError("n_ops must be >= 1")
        lo, hi = cfg.value_range
        if lo > hi or lo < 0:
            raise InvalidParamsError("bad value_range")


def child_rng(seed: int, task: Task, index: int) -> random.Random:
    """One child stream per instance index, so adding tasks or extending a
    run never perturbs previously generated instances."""
    digest = hashlib.sha256(f"{seed}:{task.value}:{index}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _sample(rng: random.Random, pool: tuple[str, ...], k: int, what: str) -> list[str]:
    if k > len(pool):
        raise LexiconTooSmallError(f"need {k} distinct {what}, lexicon has {len(pool)}")
    return rng.sample(list(pool), k)


def _people_list(names: list[str]) -> str:
    if len(names) == 2:
        return f"{names[0]} and {names[1]}"
    return ", ".join(names[:-1]) + f", and {names[-1]}"


@dataclass(frozen=True)
class _TsoScenario:
    intro: str
    assign_lead: str
    assign: str
    action: str
    swap: str
    query: str
    object_pool: str  # Lexicon attribute name


_TSO_SCENARIOS = (
    _TsoScenario(
        intro="{people} are dancers at a square dance.",
        assign_lead="At the start of a song, they each have a partner: ",
        assign="{person} is dancing with {obj}",
        action="Throughout the song, the dancers often trade partners.",
        swap="{a} and {b} switch partners.",
        query="At the end of the dance, {person} is dancing with",
        object_pool="partner_names",
    ),
    _TsoScenario(
        intro="{people} are friends and have just finished reading different books.",
        assign_lead="At the start of the semester, they each have a book: ",
        assign="{person} has {obj}",
        action="As the semester proceeds, they start trading books.",
        swap="{a} and {b} swap books.",
        query="At the end of the semester, {person} has",
        object_pool="book_titles",
    ),
    _TsoScenario(
        intro="{people} are on the same team in a soccer match.",
        assign_lead="At the start of the match, they are each assigned to a position: ",
        assign="{person} is playing {obj}",
        action="As the match progresses, pairs of players occasionally swap positions.",
        swap="{a} and {b} trade positions.",
        query="At the end of the match, {person} is playing",
        object_pool="positions",
    ),
)


def _ordinal_word(index: int, total: int) -> str:
    if index == 0:
        return "First"
    if index == total - 1:
        return "Finally"
    return "Then"


def _build_tso(cfg: GenConfig, rng: random.Random) -> tuple[str, tuple[str, ...] | None]:
    n = {Task.TSO3: 3, Task.TSO5: 5, Task.TSO7: 7}[cfg.task]
    n_swaps = cfg.n_swaps if cfg.n_swaps is not None else n
    scenario = rng.choice(_TSO_SCENARIOS)
    persons = _sample(rng, cfg.lexicon.person_names, n, "person names")
    objects = _sample(rng, getattr(cfg.lexicon, scenario.object_pool), n, "objects")

    assignment = scenario.assign_lead + ", ".join(
        scenario.assign.format(person=p, obj=o) for p, o in zip(persons[:-1], objects[:-1])
    )
    if n > 1:
        assignment += ", and " + scenario.assign.format(person=persons[-1], obj=objects[-1])
    assignment += "."

    sentences = [scenario.intro.format(people=_people_list(persons)), assignment, scenario.action]
    for k in range(n_swaps):
        i, j = rng.sample(range(n), 2)
        sentences.append(
            f"{_ordinal_word(k, n_swaps)}, "
            + scenario.swap.format(a=persons[i], b=persons[j])
        )
    queried = rng.choice(persons)
    sentences.append(scenario.query.format(person=queried))
    return " ".join(sentences), tuple(objects)


def _build_wol(cfg: GenConfig, rng: random.Random) -> tuple[str, None]:
    persons = _sample(rng, cfg.lexicon.person_names, cfg.chain_len, "person names")
    sentences = [f"{persons[0]} {'tells the truth' if rng.random() < 0.5 else 'lies'}."]
    for speaker, target in zip(persons[1:], persons):
        claim = "tells the truth" if rng.random() < 0.5 else "lies"
        sentences.append(f"{speaker} says {target} {claim}.")
    sentences.append(f"Does {persons[-1]} tell the truth?")
    return " ".join(sentences), None


def _build_cf(cfg: GenConfig, rng: random.Random) -> tuple[str, None]:
    persons = _sample(rng, cfg.lexicon.person_names, cfg.n_people, "person names")
    sentences = ["A coin is heads up."]
    for person in persons:
        if rng.random() < 0.5:
            sentences.append(f"{person} flips the coin.")
        else:
            sentences.append(f"{person} does not flip the coin.")
    sentences.append("Is the coin still heads up?")
    return " ".join(sentences), None


def _build_llc(cfg: GenConfig, rng: random.Random) -> tuple[str, None]:
    words = _sample(rng, cfg.lexicon.llc_words, cfg.n_words, "name words")
    name = " ".join(words)
    return f'Take the last letters of the words in "{name}" and concatenate them.', None


_ARITH_ADD_VERBS = ("buys", "finds", "gets")
_ARITH_SUB_VERBS = ("loses", "eats", "gives away")


def _build_arith(cfg: GenConfig, rng: random.Random) -> tuple[str, None]:
    name = rng.choice(list(cfg.lexicon.person_names))
    noun = rng.choice(list(cfg.lexicon.object_nouns))
    value = Fraction(rng.randint(*cfg.value_range))
    sentences = [f"{name} has {value} {noun}."]
    kinds = ("add", "sub") if cfg.task is Task.AS else ("add", "sub", "mul", "div")
    for _ in range(cfg.n_ops):
        kind = rng.choice(kinds)
        if kind == "sub" and value < 2:
            kind = "add"
        if kind == "add":
            amount = rng.randint(1, 12)
            sentences.append(f"{name} {rng.choice(_ARITH_ADD_VERBS)} {amount} more {noun}.")
            value += amount
        elif kind == "sub":
            amount = rng.randint(1, min(12, int(value)))
            sentences.append(f"{name} {rng.choice(_ARITH_SUB_VERBS)} {amount} {noun}.")
            value -= amount
        elif kind == "mul":
            factor = rng.randint(2, 5)
            sentences.append(f"The number of {noun} {name} has is multiplied by {factor}.")
            value *= factor
        else:
            divisor = rng.randint(2, 5)
            sentences.append(f"The number of {noun} {name} has is divided by {divisor}.")
            value /= divisor
    sentences.append(f"How many {noun} does {name} have now?")
    return " ".join(sentences), None


_BUILDERS = {
    Task.TSO3: _build_tso,
    Task.TSO5: _build_tso,
    Task.TSO7: _build_tso,
    Task.WOL: _build_wol,
    Task.CF: _build_cf,
    Task.LLC: _build_llc,
    Task.MA: _build_arith,
    Task.AS: _build_arith,
}


def generate(cfg: GenConfig) -> list[TaskInstance]:
    """Deterministically generate ``cfg.count`` instances with oracle gold."""
    _validate(cfg)
    builder = _BUILDERS[cfg.task]
    instances = []
    for index in range(cfg.count):
        rng = child_rng(cfg.seed, cfg.task, index)
        question, options = builder(cfg, rng)
        draft = TaskInstance(
            id=f"{cfg.task.value}-{cfg.seed}-{index:04d}",
            task=cfg.task,
            question=question,
            options=options,
            gold="",
        )
        instances.append(replace(draft, gold=oracle_answer(draft)))
    return instances


# --- brute-force oracles over the surface text ---------------------------

_ORACLE_ASSIGN = re.compile(r": (?P<pairs>.+?)\.(?: |$)")
_ORACLE_SWAP = re.compile(r"(?:^|[.!?] )(?:\w+, )?(\w+) and (\w+) (?:switch|swap|trade)")
_ORACLE_QUERY = re.compile(r"At the end of [^,]+, (\w+)\b")
_ORACLE_WOL_FIRST = re.compile(r"^(\w+) (tells the truth|lies)\.")
_ORACLE_WOL_LINK = re.compile(r"(\w+) says (\w+) (tells the truth|lies)\.")
_ORACLE_NAME = re.compile(r'"([^"]+)"')
_ORACLE_INTRO = re.compile(r"^(\w+) has (\d+) \w+\.")
_ORACLE_ARITH_ADD = re.compile(r"\w+ (?:buys|finds|gets) (\d+) more \w+\.")
_ORACLE_ARITH_SUB = re.compile(r"\w+ (?:loses|eats|gives away) (\d+) \w+\.")
_ORACLE_ARITH_MUL = re.compile(r"is multiplied by (\d+)\.")
_ORACLE_ARITH_DIV = re.compile(r"is divided by (\d+)\.")


def _oracle_tso(question: str, options: tuple[str, ...] | None) -> str:
    m = _ORACLE_ASSIGN.search(question)
    if not m or not options:
        raise TemplateMismatchError("oracle cannot read assignments", question)
    holdings: dict[str, str] = {}
    order: list[str] = []
    for chunk in m.group("pairs").split(", "):
        chunk = chunk.strip()
        if chunk.startswith("and "):
            chunk = chunk[4:]
        words = chunk.split(" ")
        person = words[0]
        for marker in (" is dancing with ", " has ", " is playing ", " is holding "):
            if marker in chunk:
                obj = chunk.split(marker, 1)[1]
                break
        else:
            raise TemplateMismatchError("oracle cannot read pair", chunk)
        holdings[person] = obj
        order.append(obj)
    for a, b in _ORACLE_SWAP.findall(question):
        holdings[a], holdings[b] = holdings[b], holdings[a]
    queried = _ORACLE_QUERY.search(question)
    if not queried or queried.group(1) not in holdings:
        raise TemplateMismatchError("oracle cannot read query", question)
    obj = holdings[queried.group(1)]
    try:
        return chr(ord("A") + options.index(obj))
    except ValueError:
        return chr(ord("A") + order.index(obj))


def _oracle_wol(question: str) -> str:
    first = _ORACLE_WOL_FIRST.match(question)
    if not first:
        raise TemplateMismatchError("oracle cannot read opening", question)
    truthful = first.group(2) == "tells the truth"
    for _, _, claim in _ORACLE_WOL_LINK.findall(question):
        truthful = truthful == (claim == "tells the truth")
    return "yes" if truthful else "no"


def _oracle_cf(question: str) -> str:
    flips = len(re.findall(r"\w+ (?:flips|reverses) the coin\.", question))
    return "yes" if flips % 2 == 0 else "no"


def _oracle_llc(question: str) -> str:
    m = _ORACLE_NAME.search(question)
    if not m:
        raise TemplateMismatchError("oracle cannot read name", question)
    return "".join(word[-1] for word in m.group(1).split())


def _oracle_arith(question: str) -> str:
    intro = _ORACLE_INTRO.match(question)
    if not intro:
        raise TemplateMismatchError("oracle cannot read opening", question)
    value = Fraction(int(intro.group(2)))
    rest = question[intro.end():]
    for sentence in re.findall(r"[^.?]+[.?]", rest):
        sentence = sentence.strip()
        if sentence.startswith("How many"):
            continue
        add = _ORACLE_ARITH_ADD.search(sentence)
        sub = _ORACLE_ARITH_SUB.search(sentence)
        mul = _ORACLE_ARITH_MUL.search(sentence)
        div = _ORACLE_ARITH_DIV.search(sentence)
        if add:
            value += int(add.group(1))
        elif mul:
            value *= int(mul.group(1))
        elif div:
            value /= int(div.group(1))
        elif sub:
            value -= int(sub.group(1))
        else:
            raise TemplateMismatchError("oracle cannot read operation", sentence)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def oracle_answer(inst: TaskInstance) -> str:
    """Ground truth by direct simulation of the surface text."""
    if inst.task in (Task.TSO3, Task.TSO5, Task.TSO7):
        return _oracle_tso(inst.question, inst.options)
    if inst.task is Task.WOL:
        return _oracle_wol(inst.question)
    if inst.task is Task.CF:
        return _oracle_cf(inst.question)
    if inst.task is Task.LLC:
        return _oracle_llc(inst.question)
    return _oracle_arith(inst.question)
