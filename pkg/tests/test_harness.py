"""Harness tests: prompt assembly, backends, runner, scoring, reports."""

from __future__ import annotations

import json
import random

import pytest
import requests

from metareason.demos import build_demonstration, save_demonstrations
from metareason.harness import (
    COT_TRIGGER,
    ConfigError,
    EvalConfig,
    EvalRecord,
    FixtureMissError,
    HttpBackend,
    IncompatibleDemosError,
    OracleBackend,
    OracleUnresolvableError,
    Paradigm,
    ReplayBackend,
    TransportError,
    assemble_prompt,
    backend_from_config,
    complete,
    format_pct,
    prompt_sha256,
    render_table,
    report_csv,
    report_json,
    run_eval,
    save_fixtures,
    score,
)
from metareason.resolution import Task, save_instances
from metareason.taskgen import GenConfig, generate


def _record(dataset, task, paradigm, instance_id, extracted, gold):
    return EvalRecord(
        instance_id=instance_id,
        dataset=dataset,
        task=task,
        paradigm=paradigm,
        prompt="p",
        completion="c",
        extracted=extracted,
        gold=gold,
        correct=extracted == gold,
        latency_ms=1.0,
    )


class TestPrompts:
    def test_zero_shot_ends_with_answer_cue(self, eggs_instance):
        prompt = assemble_prompt(Paradigm.ZERO_SHOT, [], eggs_instance)
        assert prompt.endswith("\nA:")
        assert prompt.startswith("Q: ")

    def test_zero_shot_cot_trigger(self, eggs_instance):
        prompt = assemble_prompt(Paradigm.ZERO_SHOT_COT, [], eggs_instance)
        assert prompt.endswith(f"A: {COT_TRIGGER}")

    def test_meta_reasoning_two_blocks(self, dance_instance):
        demo = build_demonstration(dance_instance)
        prompt = assemble_prompt(Paradigm.META_REASONING, [demo], dance_instance)
        blocks = prompt.split("\n\n")
        assert len(blocks) == 2
        assert "The question can be simplified to:" in blocks[0]
        assert blocks[1].endswith("\nA:")

    def test_options_rendered_under_question(self, dance_instance):
        prompt = assemble_prompt(Paradigm.ZERO_SHOT, [], dance_instance)
        assert "\nOptions:\n(A) Lola\n(B) Rodrigo\n(C) Patrick\nA:" in prompt

    def test_few_shot_uses_bare_answers(self, dance_instance):
        demo = build_demonstration(dance_instance)
        prompt = assemble_prompt(Paradigm.FEW_SHOT, [demo], dance_instance)
        assert f"\nA: {demo.answer}\n" in prompt
        assert "simplified" not in prompt

    def test_demo_compatibility(self, dance_instance):
        demo = build_demonstration(dance_instance)
        with pytest.raises(IncompatibleDemosError):
            assemble_prompt(Paradigm.ZERO_SHOT, [demo], dance_instance)
        with pytest.raises(IncompatibleDemosError):
            assemble_prompt(Paradigm.META_REASONING, [], dance_instance)


class TestOracleBackend:
    def test_tracking_prompt(self, dance_instance):
        prompt = assemble_prompt(Paradigm.ZERO_SHOT, [], dance_instance)
        completion = complete(OracleBackend(), prompt)
        assert completion.rstrip(".").endswith("the answer is (C)")

    def test_target_is_last_block(self, dance_instance, coin_instance):
        demo = build_demonstration(dance_instance)
        prompt = assemble_prompt(Paradigm.META_REASONING, [demo], coin_instance)
        completion = complete(OracleBackend(), prompt)
        assert completion.endswith("the answer is: no.")

    def test_strips_cot_trigger_from_target(self, truth_chain_instance):
        prompt = assemble_prompt(Paradigm.ZERO_SHOT_COT, [], truth_chain_instance)
        completion = complete(OracleBackend(), prompt)
        assert completion.endswith("the answer is: no.")

    def test_unresolvable_prompt(self):
        with pytest.raises(OracleUnresolvableError):
            complete(OracleBackend(), "Q: What is the meaning of life?\nA:")


class TestReplayBackend:
    def test_lookup_and_miss(self, tmp_path):
        path = tmp_path / "fixtures.jsonl"
        save_fixtures(path, {"prompt one": "completion one"})
        backend = ReplayBackend(fixture_path=str(path))
        assert complete(backend, "prompt one") == "completion one"
        with pytest.raises(FixtureMissError):
            complete(backend, "prompt two")

    def test_fixture_hashes_are_sha256(self, tmp_path):
        path = tmp_path / "fixtures.jsonl"
        save_fixtures(path, {"p": "c"})
        record = json.loads(path.read_text().strip())
        assert record["prompt_sha256"] == prompt_sha256("p")
        assert len(record["prompt_sha256"]) == 64


class TestHttpBackend:
    def test_retries_then_transport_error(self, monkeypatch):
        calls = []

        def failing_post(*args, **kwargs):
            calls.append(1)
            raise requests.ConnectionError("refused")

        monkeypatch.setattr(requests, "post", failing_post)
        monkeypatch.setattr("time.sleep", lambda _: None)
        backend = HttpBackend(
            endpoint_url="http://localhost:1/v1/completions",
            model_name="m",
            max_retries=2,
        )
        with pytest.raises(TransportError):
            complete(backend, "prompt")
        assert len(calls) == 3  # initial attempt + two retries

    def test_success_parses_completion_text(self, monkeypatch):
        class FakeResponse:
            status_code = 200

            @staticmethod
            def json():
                return {"choices": [{"text": " the answer is 4"}]}

        seen = {}

        def fake_post(url, json=None, headers=None, timeout=None):
            seen["payload"] = json
            seen["headers"] = headers
            return FakeResponse()

        monkeypatch.setattr(requests, "post", fake_post)
        monkeypatch.setenv("FAKE_TOKEN", "secret")
        backend = HttpBackend(
            endpoint_url="http://example/v1/completions",
            model_name="m",
            auth_token_env_var="FAKE_TOKEN",
        )
        assert complete(backend, "2+2?") == " the answer is 4"
        assert seen["payload"]["prompt"] == "2+2?"
        assert seen["payload"]["temperature"] == 0.0
        assert seen["headers"]["Authorization"] == "Bearer secret"

    def test_non_retryable_status_fails_fast(self, monkeypatch):
        class Denied:
            status_code = 401

        calls = []

        def fake_post(*args, **kwargs):
            calls.append(1)
            return Denied()

        monkeypatch.setattr(requests, "post", fake_post)
        backend = HttpBackend(endpoint_url="http://x", model_name="m", max_retries=5)
        with pytest.raises(TransportError):
            complete(backend, "p")
        assert len(calls) == 1

    def test_against_live_local_server(self):
        import threading
        from http.server import BaseHTTPRequestHandler, HTTPServer

        class Handler(BaseHTTPRequestHandler):
            hits = 0

            def do_POST(self):
                type(self).hits += 1
                if type(self).hits == 1:  # first attempt fails, retry succeeds
                    self.send_response(503)
                    self.end_headers()
                    return
                length = int(self.headers["Content-Length"])
                body = json.loads(self.rfile.read(length))
                reply = json.dumps(
                    {"choices": [{"text": f"echo:{body['model']}:the answer is 7"}]}
                ).encode()
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(reply)))
                self.end_headers()
                self.wfile.write(reply)

            def log_message(self, *args):
                pass

        server = HTTPServer(("127.0.0.1", 0), Handler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            backend = HttpBackend(
                endpoint_url=f"http://127.0.0.1:{server.server_port}/v1/completions",
                model_name="test-model",
                max_retries=2,
                timeout=5.0,
            )
            completion = complete(backend, "Q: 3+4?\nA:")
            assert completion == "echo:test-model:the answer is 7"
            assert Handler.hits == 2
        finally:
            server.shutdown()
            thread.join(timeout=5)


class TestBackendConfig:
    def test_kinds(self):
        assert isinstance(backend_from_config({"kind": "oracle"}), OracleBackend)
        assert isinstance(
            backend_from_config({"kind": "replay", "fixture_path": "f"}), ReplayBackend
        )
        http = backend_from_config(
            {"kind": "http", "endpoint_url": "u", "model_name": "m", "parallelism": 4}
        )
        assert http.parallelism == 4 and http.max_tokens == 512

    def test_bad_configs(self):
        with pytest.raises(ConfigError):
            backend_from_config({"kind": "warp"})
        with pytest.raises(ConfigError):
            backend_from_config({"kind": "http", "endpoint_url": "u"})
        with pytest.raises(ConfigError):
            backend_from_config({"kind": "oracle", "parallelism": 0})


class TestScore:
    def test_all_correct_is_one(self):
        records = [
            _record("cf", Task.CF, Paradigm.ZERO_SHOT, f"i{i}", "yes", "yes")
            for i in range(250)
        ]
        report = score(records)
        assert report.cells[("cf", Paradigm.ZERO_SHOT)].accuracy == 1.0

    def test_tracking_average_matches_reported_rule(self):
        records = []
        for dataset, task, correct in (
            ("TSO3", Task.TSO3, 243),
            ("TSO5", Task.TSO5, 250),
            ("TSO7", Task.TSO7, 248),
        ):
            for i in range(250):
                extracted = "A" if i < correct else "B"
                records.append(
                    _record(dataset, task, Paradigm.META_REASONING, f"{dataset}-{i}", extracted, "A")
                )
        report = score(records)
        cells = report.task_cells(Paradigm.META_REASONING)
        assert format_pct(cells[Task.TSO3].accuracy) == "97.2"
        assert format_pct(cells[Task.TSO5].accuracy) == "100.0"
        assert format_pct(cells[Task.TSO7].accuracy) == "99.2"
        assert format_pct(report.tso_average(Paradigm.META_REASONING)) == "98.8"
        expected = (0.972 + 1.0 + 0.992) / 3
        assert report.tso_average(Paradigm.META_REASONING) == pytest.approx(expected)

    def test_order_independence(self):
        rng = random.Random(0)
        records = [
            _record("cf", Task.CF, Paradigm.ZERO_SHOT, f"i{i}", "yes" if i % 3 else "no", "yes")
            for i in range(60)
        ]
        shuffled = list(records)
        rng.shuffle(shuffled)
        assert report_json(score(records)) == report_json(score(shuffled))

    def test_empty_records_rejected(self):
        from metareason.harness import EmptyDatasetError

        with pytest.raises(EmptyDatasetError):
            score([])

    def test_table_layout(self):
        records = [_record("TSO3", Task.TSO3, Paradigm.META_REASONING, "a", "A", "A")]
        table = render_table(score(records))
        head, _, row = table.splitlines()[:3]
        assert head.split() == [
            "Method", "MA", "AS", "LLC", "CF", "WoL",
            "TSO(3)", "TSO(5)", "TSO(7)", "TSO(Avg.)", "Avg.",
        ]
        assert row.split() == [
            "Meta-Reasoning", "-", "-", "-", "-", "-", "100.0", "-", "-", "100.0", "100.0",
        ]

    def test_csv_output(self):
        records = [_record("cf", Task.CF, Paradigm.ZERO_SHOT, "a", "yes", "yes")]
        lines = report_csv(score(records)).strip().splitlines()
        assert lines[0] == "dataset,task,paradigm,correct,total,accuracy_pct"
        assert lines[1] == "cf,CF,zero-shot,1,1,100.0"


def _write_eval_setup(tmp_path, count=12, backend=None):
    dataset_path = tmp_path / "cf.jsonl"
    instances = generate(GenConfig(task=Task.CF, count=count, seed=51))
    save_instances(dataset_path, instances)
    demo_pool_path = tmp_path / "cf-demos.jsonl"
    demo_instances = generate(GenConfig(task=Task.CF, count=3, seed=52))
    save_demonstrations(demo_pool_path, [build_demonstration(i) for i in demo_instances])
    config = {
        "datasets": [{"name": "cf", "path": str(dataset_path)}],
        "paradigms": ["meta-reasoning"],
        "backend": backend or {"kind": "oracle"},
        "demos": {"cf": {"path": str(demo_pool_path), "k": 2}},
        "seed": 7,
        "output_dir": str(tmp_path / "out"),
    }
    return config, instances


class TestRunEval:
    def test_oracle_backend_reaches_ceiling(self, tmp_path):
        config, instances = _write_eval_setup(tmp_path)
        report = run_eval(EvalConfig.from_json_dict(config))
        cell = report.cells[("cf", Paradigm.META_REASONING)]
        assert cell.total == len(instances)
        assert cell.accuracy == 1.0
        assert (tmp_path / "out" / "records.jsonl").exists()
        assert (tmp_path / "out" / "report.json").exists()
        assert (tmp_path / "out" / "report.txt").exists()

    def test_resume_equivalence(self, tmp_path):
        import shutil

        config, _ = _write_eval_setup(tmp_path)
        out_dir = tmp_path / "out"
        run_eval(EvalConfig.from_json_dict(config), max_records=5)
        partial = (out_dir / "records.jsonl").read_text().strip().splitlines()
        assert len(partial) == 5
        run_eval(EvalConfig.from_json_dict(config))
        resumed_report = (out_dir / "report.json").read_bytes()

        shutil.rmtree(out_dir)
        run_eval(EvalConfig.from_json_dict(config))
        assert (out_dir / "report.json").read_bytes() == resumed_report

    def test_missing_demo_spec_is_config_error(self, tmp_path):
        config, _ = _write_eval_setup(tmp_path)
        config["demos"] = {}
        with pytest.raises(ConfigError):
            run_eval(EvalConfig.from_json_dict(config))

    def test_empty_dataset_rejected(self, tmp_path):
        config, _ = _write_eval_setup(tmp_path)
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        config["datasets"] = [{"name": "cf", "path": str(empty)}]
        from metareason.harness import EmptyDatasetError

        with pytest.raises(EmptyDatasetError):
            run_eval(EvalConfig.from_json_dict(config))

    def test_parallel_dispatch_matches_sequential(self, tmp_path):
        config, _ = _write_eval_setup(tmp_path, backend={"kind": "oracle", "parallelism": 4})
        report = run_eval(EvalConfig.from_json_dict(config))
        assert report.cells[("cf", Paradigm.META_REASONING)].accuracy == 1.0

    def test_zero_shot_needs_no_demos(self, tmp_path):
        config, _ = _write_eval_setup(tmp_path)
        config["paradigms"] = ["zero-shot"]
        config["demos"] = {}
        report = run_eval(EvalConfig.from_json_dict(config))
        assert report.cells[("cf", Paradigm.ZERO_SHOT)].accuracy == 1.0
