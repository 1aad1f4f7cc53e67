"""Pluggable completion backends: HTTP transport with retries, recorded
replay fixtures, and a template-solving oracle."""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass

import requests

from ..demos import FusionMode, build_completely_serial, build_cross_serial, default_mode
from ..meta_lang import eval_program
from ..resolution import TaskInstance, TemplateMismatchError, resolve_any, surface_answer
from .prompts import COT_TRIGGER, HarnessError


class TransportError(HarnessError):
    """HTTP completion failed after exhausting retries."""


class FixtureMissError(HarnessError):
    """No recorded completion for this prompt."""


class OracleUnresolvableError(HarnessError):
    """The oracle backend cannot reduce the target question."""


class ConfigError(HarnessError):
    """Malformed evaluation or backend configuration."""


@dataclass(frozen=True)
class HttpBackend:
    endpoint_url: str
    model_name: str
    auth_token_env_var: str | None = None
    temperature: float = 0.0
    max_tokens: int = 512
    timeout: float = 60.0
    max_retries: int = 3
    parallelism: int = 1


@dataclass(frozen=True)
class ReplayBackend:
    fixture_path: str
    parallelism: int = 1


@dataclass(frozen=True)
class OracleBackend:
    parallelism: int = 1


BackendSpec = HttpBackend | ReplayBackend | OracleBackend


def backend_from_config(config: dict) -> BackendSpec:
    kind = config.get("kind")
    if kind == "http":
        required = ("endpoint_url", "model_name")
        for key in required:
            if key not in config:
                raise ConfigError(f"http backend needs {key!r}")
        spec = HttpBackend(
            endpoint_url=config["endpoint_url"],
            model_name=config["model_name"],
            auth_token_env_var=config.get("auth_token_env_var"),
            temperature=float(config.get("temperature", 0.0)),
            max_tokens=int(config.get("max_tokens", 512)),
            timeout=float(config.get("timeout", 60.0)),
            max_retries=int(config.get("max_retries", 3)),
            parallelism=int(config.get("parallelism", 1)),
        )
    elif kind == "replay":
        if "fixture_path" not in config:
            raise ConfigError("replay backend needs 'fixture_path'")
        spec = ReplayBackend(
            fixture_path=config["fixture_path"],
            parallelism=int(config.get("parallelism", 1)),
        )
    elif kind == "oracle":
        spec = OracleBackend(parallelism=int(config.get("parallelism", 1)))
    else:
        raise ConfigError(f"unknown backend kind {kind!r}")
    if spec.parallelism < 1:
        raise ConfigError("parallelism must be >= 1")
    if isinstance(spec, HttpBackend) and spec.temperature < 0:
        raise ConfigError("temperature must be >= 0")
    return spec


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


def load_fixtures(path) -> dict[str, str]:
    fixtures: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            fixtures[record["prompt_sha256"]] = record["completion"]
    return fixtures


def save_fixtures(path, pairs: dict[str, str]) -> None:
    """Write prompt→completion pairs as replay fixture records."""
    with open(path, "w", encoding="utf-8") as handle:
        for prompt, completion in pairs.items():
            record = {"prompt_sha256": prompt_sha256(prompt), "completion": completion}
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


_FIXTURE_CACHE: dict[str, dict[str, str]] = {}


def _replay_complete(backend: ReplayBackend, prompt: str) -> str:
    fixtures = _FIXTURE_CACHE.get(backend.fixture_path)
    if fixtures is None:
        fixtures = load_fixtures(backend.fixture_path)
        _FIXTURE_CACHE[backend.fixture_path] = fixtures
    digest = prompt_sha256(prompt)
    if digest not in fixtures:
        raise FixtureMissError(f"no fixture for prompt {digest[:12]}…")
    return fixtures[digest]


_RETRYABLE_STATUS = {408, 409, 429, 500, 502, 503, 504}


def _http_complete(backend: HttpBackend, prompt: str) -> str:
    headers = {"Content-Type": "application/json"}
    if backend.auth_token_env_var:
        token = os.environ.get(backend.auth_token_env_var, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
    payload = {
        "model": backend.model_name,
        "prompt": prompt,
        "temperature": backend.temperature,
        "max_tokens": backend.max_tokens,
    }
    attempts = backend.max_retries + 1
    last_error: str = "no attempts made"
    for attempt in range(attempts):
        try:
            response = requests.post(
                backend.endpoint_url, json=payload, headers=headers, timeout=backend.timeout
            )
        except requests.RequestException as exc:
            last_error = str(exc)
        else:
            if response.status_code == 200:
                return _completion_text(response)
            last_error = f"HTTP {response.status_code}"
            if response.status_code not in _RETRYABLE_STATUS:
                raise TransportError(f"completion failed: {last_error}")
        if attempt + 1 < attempts:
            time.sleep(min(8.0, 0.5 * (2**attempt)))
    raise TransportError(f"completion failed after {attempts} attempts: {last_error}")


def _completion_text(response) -> str:
    try:
        body = response.json()
    except ValueError as exc:
        raise TransportError(f"non-JSON completion response: {exc}") from exc
    try:
        choice = body["choices"][0]
    except (KeyError, IndexError, TypeError):
        if isinstance(body, dict) and isinstance(body.get("text"), str):
            return body["text"]
        raise TransportError("completion response has no choices") from None
    if isinstance(choice.get("text"), str):
        return choice["text"]
    message = choice.get("message")
    if isinstance(message, dict) and isinstance(message.get("content"), str):
        return message["content"]
    raise TransportError("completion choice has no text")


def _target_question(prompt: str) -> tuple[str, tuple[str, ...] | None]:
    """The last Q block of a prompt, split into question text and options."""
    block = prompt.split("\n\nQ: ")[-1]
    if block.startswith("Q: "):
        block = block[len("Q: "):]
    body = block.rsplit("\nA:", 1)[0]
    if body.endswith(COT_TRIGGER):
        body = body[: -len(COT_TRIGGER)].rstrip()
    if "\nOptions:\n" in body:
        question, options_text = body.split("\nOptions:\n", 1)
        options = tuple(
            line.split(") ", 1)[1]
            for line in options_text.splitlines()
            if ") " in line
        )
        return question.strip(), options
    return body.strip(), None


def _oracle_complete(prompt: str) -> str:
    question, options = _target_question(prompt)
    try:
        task, mq = resolve_any(question, options)
    except TemplateMismatchError as exc:
        raise OracleUnresolvableError(f"target question is not template-resolvable: {exc}") from exc
    trace = eval_program(mq.program)
    gold = surface_answer(mq, trace)
    inst = TaskInstance(
        id="oracle", task=task, question=question, options=options, gold=gold
    )
    if default_mode(task) is FusionMode.COMPLETELY_SERIAL:
        demo = build_completely_serial(inst, mq, trace)
    else:
        demo = build_cross_serial(inst, mq, trace)
    return demo.rationale


def complete(backend: BackendSpec, prompt: str) -> str:
    """Dispatch one prompt to the backend and return the completion text."""
    if isinstance(backend, HttpBackend):
        return _http_complete(backend, prompt)
    if isinstance(backend, ReplayBackend):
        return _replay_complete(backend, prompt)
    if isinstance(backend, OracleBackend):
        return _oracle_complete(prompt)
    raise ConfigError(f"unknown backend {backend!r}")
