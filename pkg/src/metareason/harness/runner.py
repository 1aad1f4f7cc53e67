"""Evaluation runner: dispatches prompts to a backend with bounded
parallelism, persists one record per item (resumable), and scores reports.
"""

from __future__ import annotations

import json
import os
import threading
import time
from concurrent.futures import FIRST_COMPLETED, ThreadPoolExecutor, wait
from dataclasses import dataclass, field

from ..demos import Demonstration, load_demonstrations, select_demos
from ..resolution import Task, TaskInstance, load_instances, task_from_string
from .backends import BackendSpec, ConfigError, backend_from_config, complete
from .extraction import extract_answer, is_correct
from .prompts import Paradigm, assemble_prompt, paradigm_from_string


class EmptyDatasetError(ConfigError):
    """A dataset file contains no instances (or no records were given)."""


@dataclass(frozen=True)
class EvalRecord:
    """One scored item. ``correct`` is recomputed from extracted/gold at
    scoring time, so aggregation is order-independent."""

    instance_id: str
    dataset: str
    task: Task
    paradigm: Paradigm
    prompt: str
    completion: str
    extracted: str
    gold: str
    correct: bool
    latency_ms: float

    def key(self) -> tuple[str, str, str]:
        return (self.dataset, self.paradigm.value, self.instance_id)

    def to_json_dict(self) -> dict:
        return {
            "instance_id": self.instance_id,
            "dataset": self.dataset,
            "task": self.task.value,
            "paradigm": self.paradigm.value,
            "prompt": self.prompt,
            "completion": self.completion,
            "extracted": self.extracted,
            "gold": self.gold,
            "correct": self.correct,
            "latency_ms": self.latency_ms,
        }

    @classmethod
    def from_json_dict(cls, record: dict) -> "EvalRecord":
        return cls(
            instance_id=str(record["instance_id"]),
            dataset=record["dataset"],
            task=task_from_string(record["task"]),
            paradigm=paradigm_from_string(record["paradigm"]),
            prompt=record.get("prompt", ""),
            completion=record.get("completion", ""),
            extracted=record.get("extracted", ""),
            gold=str(record.get("gold", "")),
            correct=bool(record.get("correct", False)),
            latency_ms=float(record.get("latency_ms", 0.0)),
        )


def load_records(path) -> list[EvalRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if line:
                records.append(EvalRecord.from_json_dict(json.loads(line)))
    return records


class RecordStore:
    """Append-only JSONL persistence; one complete line per record, flushed
    immediately, so an interrupted run resumes from what reached disk."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._records: list[EvalRecord] = []
        self._keys: set[tuple[str, str, str]] = set()
        if os.path.exists(path):
            for record in load_records(path):
                self._records.append(record)
                self._keys.add(record.key())

    def __contains__(self, key: tuple[str, str, str]) -> bool:
        return key in self._keys

    def append(self, record: EvalRecord) -> None:
        line = json.dumps(record.to_json_dict(), ensure_ascii=False) + "\n"
        with self._lock:
            if record.key() in self._keys:
                return
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()
            self._records.append(record)
            self._keys.add(record.key())

    def records(self) -> list[EvalRecord]:
        with self._lock:
            return list(self._records)


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    path: str


@dataclass(frozen=True)
class DemoSpec:
    path: str
    k: int = 1


@dataclass(frozen=True)
class EvalConfig:
    datasets: tuple[DatasetSpec, ...]
    paradigms: tuple[Paradigm, ...]
    backend: BackendSpec
    demos: dict[str, DemoSpec] = field(default_factory=dict)
    seed: int = 0
    output_dir: str = "eval-out"
    snapshot: dict = field(default_factory=dict)

    @classmethod
    def from_json_dict(cls, config: dict) -> "EvalConfig":
        try:
            datasets = tuple(
                DatasetSpec(name=d["name"], path=d["path"]) for d in config["datasets"]
            )
            paradigms = tuple(paradigm_from_string(p) for p in config["paradigms"])
            backend = backend_from_config(config["backend"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config: {exc}") from exc
        if not datasets:
            raise ConfigError("config names no datasets")
        if not paradigms:
            raise ConfigError("config names no paradigms")
        if len({d.name for d in datasets}) != len(datasets):
            raise ConfigError("dataset names must be unique")
        demos = {}
        for name, spec in (config.get("demos") or {}).items():
            try:
                demos[name] = DemoSpec(path=spec["path"], k=int(spec.get("k", 1)))
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"bad demo spec for {name!r}: {exc}") from exc
        return cls(
            datasets=datasets,
            paradigms=paradigms,
            backend=backend,
            demos=demos,
            seed=int(config.get("seed", 0)),
            output_dir=config.get("output_dir", "eval-out"),
            snapshot=config,
        )

    @classmethod
    def from_file(cls, path) -> "EvalConfig":
        with open(path, "r", encoding="utf-8") as handle:
            return cls.from_json_dict(json.load(handle))


@dataclass(frozen=True)
class CellStats:
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0


@dataclass
class EvalReport:
    """Per-(dataset, paradigm) accuracies plus the raw records."""

    records: list[EvalRecord]
    cells: dict[tuple[str, Paradigm], CellStats]
    dataset_tasks: dict[str, Task]
    config: dict | None = None

    def paradigms(self) -> list[Paradigm]:
        present = {paradigm for _, paradigm in self.cells}
        return [p for p in Paradigm if p in present]

    def task_cells(self, paradigm: Paradigm) -> dict[Task, CellStats]:
        merged: dict[Task, list[int]] = {}
        for (dataset, cell_paradigm), stats in self.cells.items():
            if cell_paradigm is not paradigm:
                continue
            task = self.dataset_tasks[dataset]
            bucket = merged.setdefault(task, [0, 0])
            bucket[0] += stats.correct
            bucket[1] += stats.total
        return {task: CellStats(c, t) for task, (c, t) in merged.items()}

    def tso_average(self, paradigm: Paradigm) -> float | None:
        """Arithmetic mean of the three tracking-task accuracies."""
        cells = self.task_cells(paradigm)
        values = [cells[t].accuracy for t in (Task.TSO3, Task.TSO5, Task.TSO7) if t in cells]
        if not values:
            return None
        return sum(values) / len(values)

    def overall_average(self, paradigm: Paradigm) -> float | None:
        """Mean over the per-dataset accuracies (tracking average excluded)."""
        cells = self.task_cells(paradigm)
        if not cells:
            return None
        return sum(stats.accuracy for stats in cells.values()) / len(cells)


def score(records: list[EvalRecord], config: dict | None = None) -> EvalReport:
    """Aggregate records into a report; correctness is recomputed."""
    if not records:
        raise EmptyDatasetError("no records to score")
    cells: dict[tuple[str, Paradigm], list[int]] = {}
    dataset_tasks: dict[str, Task] = {}
    for record in sorted(records, key=lambda r: r.key()):
        dataset_tasks[record.dataset] = record.task
        bucket = cells.setdefault((record.dataset, record.paradigm), [0, 0])
        bucket[0] += int(is_correct(record.task, record.extracted, record.gold))
        bucket[1] += 1
    return EvalReport(
        records=sorted(records, key=lambda r: r.key()),
        cells={key: CellStats(c, t) for key, (c, t) in cells.items()},
        dataset_tasks=dataset_tasks,
        config=config,
    )


def _demo_pools(config: EvalConfig) -> dict[str, list[Demonstration]]:
    needs_demos = any(
        paradigm in (Paradigm.FEW_SHOT, Paradigm.FEW_SHOT_COT, Paradigm.META_REASONING)
        for paradigm in config.paradigms
    )
    if not needs_demos:
        return {}
    pools: dict[str, list[Demonstration]] = {}
    for dataset in config.datasets:
        spec = config.demos.get(dataset.name)
        if spec is None:
            raise ConfigError(
                f"paradigms with demonstrations need a demo file for {dataset.name!r}"
            )
        pool = load_demonstrations(spec.path)
        pools[dataset.name] = select_demos(pool, spec.k, config.seed)
    return pools


def _run_one(
    backend: BackendSpec,
    dataset: str,
    paradigm: Paradigm,
    demos: list[Demonstration],
    inst: TaskInstance,
) -> EvalRecord:
    prompt = assemble_prompt(paradigm, demos, inst)
    started = time.perf_counter()
    completion = complete(backend, prompt)
    latency_ms = (time.perf_counter() - started) * 1000.0
    extracted = extract_answer(inst.task, completion)
    return EvalRecord(
        instance_id=inst.id,
        dataset=dataset,
        task=inst.task,
        paradigm=paradigm,
        prompt=prompt,
        completion=completion,
        extracted=extracted,
        gold=inst.gold,
        correct=is_correct(inst.task, extracted, inst.gold),
        latency_ms=latency_ms,
    )


def run_eval(config: EvalConfig, max_records: int | None = None) -> EvalReport:
    """Run the evaluation described by ``config``; resumable.

    Completed records are persisted one JSONL line at a time and skipped on
    rerun. ``max_records`` bounds how many new records this call produces
    (the hook that models an interrupted run). Writes ``records.jsonl``,
    ``report.json``, and ``report.txt`` under the output directory.
    """
    os.makedirs(config.output_dir, exist_ok=True)
    datasets: list[tuple[DatasetSpec, list[TaskInstance]]] = []
    for spec in config.datasets:
        instances = load_instances(spec.path)
        if not instances:
            raise EmptyDatasetError(f"dataset {spec.name!r} is empty")
        datasets.append((spec, instances))
    pools = _demo_pools(config)

    store = RecordStore(os.path.join(config.output_dir, "records.jsonl"))
    demo_paradigms = (Paradigm.FEW_SHOT, Paradigm.FEW_SHOT_COT, Paradigm.META_REASONING)
    jobs = []
    for spec, instances in datasets:
        for paradigm in config.paradigms:
            demos = pools.get(spec.name, []) if paradigm in demo_paradigms else []
            for inst in instances:
                if (spec.name, paradigm.value, inst.id) not in store:
                    jobs.append((spec.name, paradigm, demos, inst))

    budget = len(jobs) if max_records is None else min(max_records, len(jobs))
    parallelism = getattr(config.backend, "parallelism", 1)
    if parallelism <= 1:
        for dataset, paradigm, demos, inst in jobs[:budget]:
            store.append(_run_one(config.backend, dataset, paradigm, demos, inst))
    else:
        submitted = 0
        pending = set()
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            while submitted < budget or pending:
                while submitted < budget and len(pending) < parallelism:
                    dataset, paradigm, demos, inst = jobs[submitted]
                    pending.add(
                        pool.submit(_run_one, config.backend, dataset, paradigm, demos, inst)
                    )
                    submitted += 1
                if not pending:
                    break
                done, pending = wait(pending, return_when=FIRST_COMPLETED)
                for future in done:
                    store.append(future.result())

    report = score(store.records(), config=config.snapshot)
    _write_reports(report, config.output_dir)
    return report


def _write_reports(report: EvalReport, output_dir: str) -> None:
    from .reporting import render_table, report_json

    with open(os.path.join(output_dir, "report.json"), "w", encoding="utf-8") as handle:
        handle.write(report_json(report))
    with open(os.path.join(output_dir, "report.txt"), "w", encoding="utf-8") as handle:
        handle.write(render_table(report) + "\n")
