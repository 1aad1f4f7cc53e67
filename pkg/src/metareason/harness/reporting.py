"""Report rendering: a fixed-layout accuracy table (one column per task
plus tracking and overall averages), a machine-readable JSON document,
and CSV."""

from __future__ import annotations

import io
import json

from ..resolution import Task
from .prompts import DISPLAY_NAMES, Paradigm
from .runner import EvalReport

_COLUMN_TASKS = (
    Task.MA,
    Task.AS,
    Task.LLC,
    Task.CF,
    Task.WOL,
    Task.TSO3,
    Task.TSO5,
    Task.TSO7,
)
_COLUMN_HEADERS = {
    Task.MA: "MA",
    Task.AS: "AS",
    Task.LLC: "LLC",
    Task.CF: "CF",
    Task.WOL: "WoL",
    Task.TSO3: "TSO(3)",
    Task.TSO5: "TSO(5)",
    Task.TSO7: "TSO(7)",
}


def format_pct(fraction: float | None) -> str:
    return "-" if fraction is None else f"{fraction * 100:.1f}"


def _row_values(report: EvalReport, paradigm: Paradigm) -> list[str]:
    cells = report.task_cells(paradigm)
    values = [
        format_pct(cells[task].accuracy) if task in cells else "-"
        for task in _COLUMN_TASKS
    ]
    values.append(format_pct(report.tso_average(paradigm)))
    values.append(format_pct(report.overall_average(paradigm)))
    return values


def render_table(report: EvalReport) -> str:
    headers = ["Method"] + [_COLUMN_HEADERS[t] for t in _COLUMN_TASKS] + ["TSO(Avg.)", "Avg."]
    rows = [headers]
    for paradigm in report.paradigms():
        rows.append([DISPLAY_NAMES[paradigm]] + _row_values(report, paradigm))
    widths = [max(len(row[i]) for row in rows) for i in range(len(headers))]
    lines = []
    for row in rows:
        lines.append("  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip())
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines)


def report_json(report: EvalReport) -> str:
    """Deterministic JSON document: accuracies, per-item verdicts, config.

    Prompts, completions, and latencies stay in records.jsonl; excluding
    them here keeps resumed and uninterrupted runs byte-identical.
    """
    cells = []
    for (dataset, paradigm), stats in sorted(
        report.cells.items(), key=lambda item: (item[0][0], item[0][1].value)
    ):
        cells.append(
            {
                "dataset": dataset,
                "task": report.dataset_tasks[dataset].value,
                "paradigm": paradigm.value,
                "correct": stats.correct,
                "total": stats.total,
                "accuracy_pct": format_pct(stats.accuracy),
            }
        )
    summary = {}
    for paradigm in report.paradigms():
        task_cells = report.task_cells(paradigm)
        row = {
            _COLUMN_HEADERS[task]: format_pct(task_cells[task].accuracy)
            for task in _COLUMN_TASKS
            if task in task_cells
        }
        row["TSO(Avg.)"] = format_pct(report.tso_average(paradigm))
        row["Avg."] = format_pct(report.overall_average(paradigm))
        summary[paradigm.value] = row
    document = {
        "cells": cells,
        "summary": summary,
        "records": [
            {
                "instance_id": record.instance_id,
                "dataset": record.dataset,
                "paradigm": record.paradigm.value,
                "extracted": record.extracted,
                "gold": record.gold,
                "correct": record.correct,
            }
            for record in report.records
        ],
        "config": report.config,
    }
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def report_csv(report: EvalReport) -> str:
    import csv

    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow(["dataset", "task", "paradigm", "correct", "total", "accuracy_pct"])
    for (dataset, paradigm), stats in sorted(
        report.cells.items(), key=lambda item: (item[0][0], item[0][1].value)
    ):
        writer.writerow(
            [
                dataset,
                report.dataset_tasks[dataset].value,
                paradigm.value,
                stats.correct,
                stats.total,
                format_pct(stats.accuracy),
            ]
        )
    return buffer.getvalue()
