"""Demonstration builder tests: structure, faithfulness, extractability."""

from __future__ import annotations

import pytest

from metareason.demos import (
    AlignmentError,
    Demonstration,
    FusionMode,
    PoolTooSmallError,
    TraceMismatchError,
    build_completely_serial,
    build_cross_serial,
    build_demonstration,
    default_mode,
    load_demonstrations,
    render_question,
    save_demonstrations,
    select_demos,
)
from metareason.harness import extract_answer
from metareason.meta_lang import eval_program, format_value
from metareason.resolution import EntityTable, Task, TaskInstance, resolve
from metareason.taskgen import GenConfig, generate


def _resolved(inst):
    mq = resolve(inst)
    return mq, eval_program(mq.program)


class TestCompletelySerial:
    def test_arithmetic_chain_lines(self, eggs_instance):
        demo = build_completely_serial(eggs_instance, *_resolved(eggs_instance))
        lines = demo.rationale.splitlines()
        assert lines[0].startswith("The question can be simplified to: It is known that A = 16.")
        assert "A = 16" in lines[1]
        assert "A - 3 = 16 - 3 = 13" in demo.rationale
        assert "A - 4 = 13 - 4 = 9" in demo.rationale
        assert "A * 2 = 9 * 2 = 18" in demo.rationale
        assert demo.rationale.count("simplified to:") == 1
        assert demo.answer == "18"
        assert demo.mode is FusionMode.COMPLETELY_SERIAL

    def test_division_line_renders_exact_rational(self):
        inst = TaskInstance(
            id="ma-div",
            task=Task.MA,
            question=(
                "Paul has 9 coins. The number of coins Paul has is divided by 2. "
                "How many coins does Paul have now?"
            ),
            options=None,
            gold="9/2",
        )
        demo = build_completely_serial(inst, *_resolved(inst))
        assert "A / 2 = 9 / 2 = 9/2" in demo.rationale

    def test_zero_statement_program(self):
        inst = TaskInstance(
            id="ma-zero",
            task=Task.MA,
            question="Paul has 5 coins. How many coins does Paul have now?",
            options=None,
            gold="5",
        )
        demo = build_completely_serial(inst, *_resolved(inst))
        assert demo.rationale.splitlines() == [
            "The question can be simplified to: It is known that A = 5. "
            "What is the value of A?",
            "A = 5",
            "Therefore, the value of A is 5, so the answer is 5.",
        ]

    def test_trace_mismatch_rejected(self, eggs_instance, coin_instance):
        mq, _ = _resolved(eggs_instance)
        _, wrong_trace = _resolved(coin_instance)
        with pytest.raises(TraceMismatchError):
            build_completely_serial(eggs_instance, mq, wrong_trace)


class TestCrossSerial:
    def test_tracking_subblocks(self, dance_instance):
        demo = build_cross_serial(dance_instance, *_resolved(dance_instance))
        lines = demo.rationale.splitlines()
        assert demo.n_substeps == 3
        assert len(lines) == 1 + 3 + 1
        assert lines[0] == (
            "The question can be simplified to: It is known that A = 1, B = 2, C = 3."
        )
        assert lines[1] == (
            "First, A and B switch partners: A and B → (A = 1, B = 2 → A = 2, B = 1)"
            " → A = 2, B = 1, C = 3."
        )
        assert "A = 3, B = 2, C = 1" in lines[3]
        assert "the 3-rd option" in lines[4]
        assert lines[4].endswith("the answer is (C).")

    def test_truth_chain_subblocks(self, truth_chain_instance):
        demo = build_cross_serial(truth_chain_instance, *_resolved(truth_chain_instance))
        lines = demo.rationale.splitlines()
        assert demo.n_substeps == 4
        assert lines[1] == (
            "Ryan says Sherrie lies: lies → A' = 0. Since A = 1, "
            "A is not equal to A', so B = 0."
        )
        assert lines[3] == (
            "Tamika says Bernita lies: lies → C' = 0. Since C = 0, "
            "C is equal to C', so D = 1."
        )
        assert lines[-1] == "Since E = 0, so the answer is: no."

    def test_single_swap_has_one_subblock(self):
        inst = generate(GenConfig(task=Task.TSO3, count=1, seed=21, n_swaps=1))[0]
        demo = build_cross_serial(inst, *_resolved(inst))
        assert demo.n_substeps == 1
        assert len(demo.rationale.splitlines()) == 3

    def test_coin_flip_blocks(self, coin_instance):
        demo = build_cross_serial(coin_instance, *_resolved(coin_instance))
        lines = demo.rationale.splitlines()
        assert demo.n_substeps == 1
        assert lines[1] == "Ka flips the coin: flip → (A = 1 → A = 0) → A = 0."
        assert lines[-1] == "Since A = 0, so the answer is: no."

    def test_last_letter_blocks(self):
        inst = TaskInstance(
            id="llc-demo",
            task=Task.LLC,
            question='Take the last letters of the words in "Elon Musk" and concatenate them.',
            options=None,
            gold="nk",
        )
        demo = build_cross_serial(inst, *_resolved(inst))
        lines = demo.rationale.splitlines()
        assert 'Elon: A = last("Elon") → A = "n".' in lines
        assert lines[-1] == '"n" + "k" = "nk", so the answer is: nk.'

    def test_snapshots_match_trace(self, dance_instance):
        mq, trace = _resolved(dance_instance)
        demo = build_cross_serial(dance_instance, mq, trace)
        for step, line in zip(trace.steps, demo.rationale.splitlines()[1:]):
            snapshot = ", ".join(f"{s} = {format_value(v)}" for s, v in step.env)
            assert line.endswith(snapshot + ".")

    def test_alignment_error_without_fragments(self, dance_instance):
        from dataclasses import replace

        mq, trace = _resolved(dance_instance)
        stripped = replace(mq, table=EntityTable(entries=mq.table.entries, op_spans=()))
        with pytest.raises(AlignmentError):
            build_cross_serial(dance_instance, stripped, trace)


class TestDefaults:
    def test_mode_per_task(self):
        assert default_mode(Task.MA) is FusionMode.COMPLETELY_SERIAL
        assert default_mode(Task.AS) is FusionMode.COMPLETELY_SERIAL
        for task in (Task.LLC, Task.CF, Task.WOL, Task.TSO3, Task.TSO5, Task.TSO7):
            assert default_mode(task) is FusionMode.CROSS_SERIAL

    def test_build_demonstration_uses_default(self, eggs_instance, dance_instance):
        assert build_demonstration(eggs_instance).mode is FusionMode.COMPLETELY_SERIAL
        assert build_demonstration(dance_instance).mode is FusionMode.CROSS_SERIAL

    def test_question_includes_options_block(self, dance_instance):
        demo = build_demonstration(dance_instance)
        assert demo.question.endswith("Options:\n(A) Lola\n(B) Rodrigo\n(C) Patrick")
        assert render_question("q", None) == "q"


class TestExtractability:
    @pytest.mark.parametrize("task", list(Task))
    def test_extraction_recovers_demo_answer(self, task):
        for inst in generate(GenConfig(task=task, count=10, seed=22)):
            demo = build_demonstration(inst)
            assert extract_answer(task, demo.rationale) == demo.answer
            assert demo.rationale.splitlines()[-1].count("the answer is") == 1


class TestSelection:
    def _pool(self, size):
        return [
            Demonstration(question=f"q{i}", rationale=f"r{i}", answer="1", mode=FusionMode.CROSS_SERIAL)
            for i in range(size)
        ]

    def test_full_pool_in_seeded_order(self):
        pool = self._pool(4)
        picked = select_demos(pool, 4, seed=5)
        assert sorted(d.question for d in picked) == [d.question for d in pool]
        assert picked == select_demos(pool, 4, seed=5)

    def test_k_one(self):
        pool = self._pool(6)
        assert len(select_demos(pool, 1, seed=1)) == 1

    def test_pool_too_small(self):
        with pytest.raises(PoolTooSmallError):
            select_demos(self._pool(2), 3, seed=0)

    def test_jsonl_round_trip(self, tmp_path, dance_instance):
        demo = build_demonstration(dance_instance)
        path = tmp_path / "demos.jsonl"
        save_demonstrations(path, [demo])
        assert load_demonstrations(path) == [demo]
