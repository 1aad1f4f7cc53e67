"""Prompt assembly for the five prompting paradigms."""

from __future__ import annotations

from enum import Enum
from typing import Sequence

from ..demos import Demonstration, render_question
from ..resolution import TaskInstance


class HarnessError(Exception):
    """Base class for harness failures."""


class IncompatibleDemosError(HarnessError):
    """Demonstration count does not fit the paradigm."""


class Paradigm(str, Enum):
    ZERO_SHOT = "zero-shot"
    ZERO_SHOT_COT = "zero-shot-cot"
    FEW_SHOT = "few-shot"
    FEW_SHOT_COT = "few-shot-cot"
    META_REASONING = "meta-reasoning"


DISPLAY_NAMES = {
    Paradigm.ZERO_SHOT: "Zero-Shot",
    Paradigm.ZERO_SHOT_COT: "Zero-Shot-CoT",
    Paradigm.FEW_SHOT: "Few-Shot",
    Paradigm.FEW_SHOT_COT: "Few-Shot-CoT",
    Paradigm.META_REASONING: "Meta-Reasoning",
}

COT_TRIGGER = "Let's think step by step."

_DEMO_PARADIGMS = (Paradigm.FEW_SHOT, Paradigm.FEW_SHOT_COT, Paradigm.META_REASONING)


def paradigm_from_string(text: str) -> Paradigm:
    key = text.strip().lower().replace("_", "-")
    for paradigm in Paradigm:
        if paradigm.value == key:
            return paradigm
    raise ValueError(f"unknown paradigm {text!r}")


def assemble_prompt(
    paradigm: Paradigm, demos: Sequence[Demonstration], inst: TaskInstance
) -> str:
    """Build the full prompt text; blocks are separated by blank lines."""
    if paradigm in _DEMO_PARADIGMS and not demos:
        raise IncompatibleDemosError(f"{paradigm.value} needs at least one demonstration")
    if paradigm not in _DEMO_PARADIGMS and demos:
        raise IncompatibleDemosError(f"{paradigm.value} takes no demonstrations")

    target = f"Q: {render_question(inst.question, inst.options)}\nA:"
    if paradigm is Paradigm.ZERO_SHOT:
        return target
    if paradigm is Paradigm.ZERO_SHOT_COT:
        return f"{target} {COT_TRIGGER}"
    if paradigm is Paradigm.FEW_SHOT:
        blocks = [f"Q: {demo.question}\nA: {demo.answer}" for demo in demos]
    else:
        blocks = [f"Q: {demo.question}\nA: {demo.rationale}" for demo in demos]
    return "\n\n".join(blocks + [target])
