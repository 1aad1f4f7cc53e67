"""Shared fixtures: golden instances for the square-dance tracking question,
the truth-chain question, and a money-style arithmetic item, plus sample
model completions used by the extraction goldens."""

from __future__ import annotations

import pytest

from metareason.resolution import Task, TaskInstance

SQUARE_DANCE_QUESTION = (
    "Alice, Bob, and Claire are dancers at a square dance. At the start of a song, "
    "they each have a partner: Alice is dancing with Lola, Bob is dancing with "
    "Rodrigo, and Claire is dancing with Patrick. Throughout the song, the dancers "
    "often trade partners. First, Alice and Bob switch partners. Then, Claire and "
    "Bob switch partners. Finally, Bob and Alice switch partners. At the end of the "
    "dance, Alice is dancing with"
)

TRUTH_CHAIN_QUESTION = (
    "Sherrie tells the truth. Ryan says Sherrie lies. Bernita says Ryan tells the "
    "truth. Tamika says Bernita lies. Jerry says Tamika lies. Does Jerry tell the truth?"
)

COIN_QUESTION = (
    "A coin is heads up. Ka flips the coin. Sherrie does not flip the coin. "
    "Is the coin still heads up?"
)

EGGS_QUESTION = (
    "Janet has 16 eggs. Janet eats 3 eggs. Janet eats 4 eggs. The number of eggs "
    "Janet has is multiplied by 2. How many eggs does Janet have now?"
)

LOOSE_META_TEXT = (
    "It is known A = 16. Subtract 3 from A, then subtract 4 from A, and finally "
    "multiply A by 2, now what is the value of A?"
)

# A typical step-by-step completion for the square-dance question that
# reaches the wrong conclusion (A); extraction must still return "A".
SAMPLE_COT_COMPLETION_TSO = (
    "Let's think step by step. (0) At the start: Alice: Lola, Bob: Rodrigo, "
    "Claire: Patrick.\n"
    "(1) Alice and Bob switch partners: Alice: Rodrigo, Bob: Lola, Claire: Patrick.\n"
    "(2) Claire and Bob switch partners: Alice: Rodrigo, Bob: Patrick, Claire: Lola.\n"
    "(3) Bob and Alice switch partners: Alice: Lola, Bob: Patrick, Claire: Rodrigo.\n"
    "At the end of the dance, Alice is dancing with Lola. So the answer is (A)."
)

# A symbolic completion for the truth-chain question.
SAMPLE_META_COMPLETION_WOL = (
    "The question can be simplified to: It is known that A = 1.\n"
    "Ryan says Sherrie lies: lies → A' = 0. Since A = 1, A is not equal to A', so B = 0.\n"
    "Bernita says Ryan tells the truth: truth → B' = 1. Since B = 0, B is not equal "
    "to B', so C = 0.\n"
    "Tamika says Bernita lies: lies → C' = 0. Since C = 0, C is equal to C', so D = 1.\n"
    "Jerry says Tamika lies: lies → D' = 0. Since D = 1, D is not equal to D', so E = 0.\n"
    "Since E = 0, so the answer is: no."
)

# A free-text chain for a money question whose last number carries a
# currency symbol.
SAMPLE_COT_COMPLETION_MONEY = (
    "Let's think step by step. Janet's ducks lay 16 eggs per day. She eats three "
    "for breakfast every morning. That leaves her with 13 eggs. She bakes muffins "
    "for her friends every day with four. That leaves her with 9 eggs. She sells "
    "the remainder at the farmers' market daily for $2 per fresh duck egg. That's "
    "9 eggs times $2 per egg, for a total of $18. So, Janet makes $18 per day from "
    "selling eggs at the farmers' market."
)


@pytest.fixture
def dance_instance() -> TaskInstance:
    return TaskInstance(
        id="tso3-golden",
        task=Task.TSO3,
        question=SQUARE_DANCE_QUESTION,
        options=("Lola", "Rodrigo", "Patrick"),
        gold="C",
    )


@pytest.fixture
def dance_instance_truncated_options() -> TaskInstance:
    return TaskInstance(
        id="tso3-golden-truncated",
        task=Task.TSO3,
        question=SQUARE_DANCE_QUESTION,
        options=("Lola", "Rodrigo", "Pa"),
        gold="C",
    )


@pytest.fixture
def truth_chain_instance() -> TaskInstance:
    return TaskInstance(
        id="wol-golden",
        task=Task.WOL,
        question=TRUTH_CHAIN_QUESTION,
        options=None,
        gold="no",
    )


@pytest.fixture
def coin_instance() -> TaskInstance:
    return TaskInstance(
        id="cf-golden",
        task=Task.CF,
        question=COIN_QUESTION,
        options=None,
        gold="no",
    )


@pytest.fixture
def eggs_instance() -> TaskInstance:
    return TaskInstance(
        id="ma-golden",
        task=Task.MA,
        question=EGGS_QUESTION,
        options=None,
        gold="18",
    )
