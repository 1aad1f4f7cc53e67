"""Evaluation harness: prompts, backends, extraction, runner, reports."""

from .backends import (
    BackendSpec,
    ConfigError,
    FixtureMissError,
    HttpBackend,
    OracleBackend,
    OracleUnresolvableError,
    ReplayBackend,
    TransportError,
    backend_from_config,
    complete,
    load_fixtures,
    prompt_sha256,
    save_fixtures,
)
from .extraction import AnswerKind, answer_kind, extract_answer, is_correct, normalize_answer
from .prompts import (
    COT_TRIGGER,
    DISPLAY_NAMES,
    HarnessError,
    IncompatibleDemosError,
    Paradigm,
    assemble_prompt,
    paradigm_from_string,
)
from .reporting import format_pct, render_table, report_csv, report_json
from .runner import (
    CellStats,
    DatasetSpec,
    DemoSpec,
    EmptyDatasetError,
    EvalConfig,
    EvalRecord,
    EvalReport,
    RecordStore,
    load_records,
    run_eval,
    score,
)

__all__ = [
    "AnswerKind",
    "BackendSpec",
    "CellStats",
    "COT_TRIGGER",
    "ConfigError",
    "DISPLAY_NAMES",
    "DatasetSpec",
    "DemoSpec",
    "EmptyDatasetError",
    "EvalConfig",
    "EvalRecord",
    "EvalReport",
    "FixtureMissError",
    "HarnessError",
    "HttpBackend",
    "IncompatibleDemosError",
    "OracleBackend",
    "OracleUnresolvableError",
    "Paradigm",
    "RecordStore",
    "ReplayBackend",
    "TransportError",
    "assemble_prompt",
    "answer_kind",
    "backend_from_config",
    "complete",
    "extract_answer",
    "format_pct",
    "is_correct",
    "load_fixtures",
    "load_records",
    "normalize_answer",
    "paradigm_from_string",
    "prompt_sha256",
    "render_table",
    "report_csv",
    "report_json",
    "run_eval",
    "save_fixtures",
    "score",
]
