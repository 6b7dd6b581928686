"""Evaluation harness: run problems against OpenAI-compatible chat
endpoints, persist every exchange to an append-only line-delimited store,
and apply the exclusion rules.

Each (model, problem, order) key yields exactly one record; re-running
over an existing store skips completed keys, so interrupted runs resume.
"""

from __future__ import annotations

import hashlib
import json
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Optional, Sequence

import httpx

from . import judge as judge_mod
from .generator import Problem, reverse_premises
from .render import ThemeMapping, bind_theme, load_themes, render_prompt, theme_for_problem

ORDERS = ("original", "reversed")
DEFAULT_TEMPERATURE = 0.0


@dataclass
class ModelSpec:
    provider: str
    model: str
    max_output_tokens: int = 3000
    thinking_tokens: Optional[int] = None  # reasoning models: default 2400
    timeout: float = 120.0
    max_attempts: int = 3
    backoff: float = 1.0

    def __post_init__(self):
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be positive")
        if self.thinking_tokens is not None:
            if self.thinking_tokens <= 0:
                raise ValueError("thinking_tokens must be positive")
            if self.thinking_tokens > self.max_output_tokens:
                raise ValueError("thinking budget exceeds output budget")


@dataclass
class RunRecord:
    problem_id: str
    order: str  # "original" | "reversed"
    model: str
    prompt_sha256: str
    raw_reply: Optional[str]
    parse_status: str  # parsed | nothing-follows | parse-error | transport-error
    parsed_conclusion: Optional[str]
    verdict: Optional[dict]
    mapping_seed: int
    theme: str
    elapsed_s: float
    usage: Optional[dict]
    attempts: int
    temperature: float = DEFAULT_TEMPERATURE
    translator_prompt_version: str = judge_mod.TRANSLATOR_PROMPT_VERSION

    def key(self):
        return (self.model, self.problem_id, self.order)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        return cls(**json.loads(line))


class TransportError(Exception):
    pass


class ChatClient:
    """Minimal OpenAI-compatible chat-completions client."""

    def __init__(self, base_url: str, api_key: str = "", timeout: float = 120.0):
        self._client = httpx.Client(
            base_url=base_url.rstrip("/"),
            headers={"Authorization": f"Bearer {api_key}"} if api_key else {},
            timeout=timeout,
        )

    def close(self):
        self._client.close()

    def complete_spec(self, spec: ModelSpec, prompt: str) -> tuple:
        """Returns (text, usage dict). Raises TransportError on failure."""
        payload = {
            "model": spec.model,
            "messages": [{"role": "user", "content": prompt}],
            "max_tokens": spec.max_output_tokens,
            "temperature": DEFAULT_TEMPERATURE,
        }
        if spec.thinking_tokens is not None:
            payload["reasoning"] = {"max_tokens": spec.thinking_tokens}
        try:
            resp = self._client.post("/chat/completions", json=payload)
            resp.raise_for_status()
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise TransportError(str(exc)) from exc
        return text, data.get("usage")

    def complete(self, prompt: str, model: str = "", max_tokens: int = 1000) -> str:
        """Simple completion used by the translation layer."""
        text, _ = self.complete_spec(
            ModelSpec(provider="", model=model, max_output_tokens=max_tokens), prompt
        )
        return text


@dataclass
class _Translator:
    client: ChatClient
    model: str

    def complete(self, prompt: str) -> str:
        return self.client.complete(prompt, model=self.model)


@dataclass
class HarnessConfig:
    base_url: str
    api_key: str = ""
    max_in_flight: int = 8
    mapping_seed: int = 0
    judge_mode: str = "endorsement"
    translator_model: Optional[str] = None
    include_reversed: bool = True
    oracle_bound: int = 64


class RunStore:
    """Append-only JSONL store of RunRecords, keyed for resumption."""

    def __init__(self, path):
        self.path = path
        self._lock = threading.Lock()
        self._keys = set()
        self.records = []
        try:
            with open(path) as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rec = RunRecord.from_json(line)
                        self.records.append(rec)
                        self._keys.add(rec.key())
        except FileNotFoundError:
            pass

    def __contains__(self, key):
        return key in self._keys

    def append(self, rec: RunRecord):
        with self._lock:
            if rec.key() in self._keys:
                return
            with open(self.path, "a") as fh:
                fh.write(rec.to_json() + "\n")
            self._keys.add(rec.key())
            self.records.append(rec)


def _prompt_for(problem: Problem, order: str, cfg: HarnessConfig, themes) -> tuple:
    p = problem if order == "original" else reverse_premises(problem)
    theme = theme_for_problem(problem.id, themes)
    mapping = bind_theme(p, theme, random.Random(cfg.mapping_seed))
    return p, mapping, render_prompt(p, mapping)


def _run_one(
    spec: ModelSpec,
    problem: Problem,
    order: str,
    cfg: HarnessConfig,
    client: ChatClient,
    themes,
) -> RunRecord:
    oriented, mapping, prompt = _prompt_for(problem, order, cfg, themes)
    digest = hashlib.sha256(prompt.encode()).hexdigest()
    start = time.time()
    reply = usage = None
    attempts = 0
    error = None
    for attempts in range(1, spec.max_attempts + 1):
        try:
            reply, usage = client.complete_spec(spec, prompt)
            error = None
            break
        except TransportError as exc:
            error = exc
            time.sleep(spec.backoff * (2 ** (attempts - 1)) * (1 + random.random()))
    elapsed = time.time() - start
    common = dict(
        problem_id=problem.id,
        order=order,
        model=spec.model,
        prompt_sha256=digest,
        mapping_seed=cfg.mapping_seed,
        theme=mapping.theme.name,
        elapsed_s=round(elapsed, 3),
        usage=usage,
        attempts=attempts,
    )
    if error is not None:
        return RunRecord(
            raw_reply=None, parse_status="transport-error",
            parsed_conclusion=None, verdict=None, **common,
        )
    answer = judge_mod.parse_answer(reply, mapping)
    if answer.status == "parse-error" and cfg.translator_model:
        translator = _Translator(client, cfg.translator_model)
        try:
            constrained = judge_mod.translate_freeform(reply, translator)
            answer = judge_mod.parse_answer(constrained, mapping)
        except TransportError:
            pass
    verdict = None
    if answer.status != "parse-error":
        v = judge_mod.judge_response(oriented, answer, cfg.judge_mode, cfg.oracle_bound)
        verdict = {
            "logically_correct": v.logically_correct,
            "etr_predicted": v.etr_predicted,
            "human_like_fallacy": v.human_like_fallacy,
            "mode": v.mode,
        }
    return RunRecord(
        raw_reply=reply,
        parse_status=answer.status,
        parsed_conclusion=(
            None if answer.conclusion is None else str(answer.conclusion)
        ),
        verdict=verdict,
        **common,
    )


def run_suite(
    models: Sequence[ModelSpec],
    problems: Sequence[Problem],
    cfg: HarnessConfig,
    store: RunStore,
    themes=None,
) -> RunStore:
    """Evaluate every (model, problem, order); skip keys already stored."""
    themes = themes or load_themes()
    orders = ORDERS if cfg.include_reversed else ("original",)
    work = [
        (spec, problem, order)
        for spec in models
        for problem in problems
        for order in orders
        if (spec.model, problem.id, order) not in store
    ]
    client = ChatClient(cfg.base_url, cfg.api_key)
    try:
        with ThreadPoolExecutor(max_workers=cfg.max_in_flight) as pool:
            futures = {
                pool.submit(_run_one, spec, problem, order, cfg, client, themes)
                for spec, problem, order in work
            }
            for fut in as_completed(futures):
                store.append(fut.result())
    finally:
        client.close()
    return store


@dataclass
class ExclusionManifest:
    threshold: float
    per_model: dict  # model -> {"n": int, "parse_errors": int, "rate": float, "excluded": bool}
    dropped_records: list  # (model, problem_id, order) for per-response drops

    def excluded_models(self):
        return sorted(m for m, row in self.per_model.items() if row["excluded"])


def exclusion_report(store: RunStore, threshold: float = 0.20) -> ExclusionManifest:
    """Per-model parse-error rates; models over the threshold are excluded
    wholesale, the rest lose only the unparseable rows."""
    per_model: dict = {}
    for rec in store.records:
        row = per_model.setdefault(rec.model, {"n": 0, "parse_errors": 0})
        row["n"] += 1
        if rec.parse_status in ("parse-error", "transport-error"):
            row["parse_errors"] += 1
    dropped = []
    for model, row in per_model.items():
        row["rate"] = row["parse_errors"] / row["n"] if row["n"] else 0.0
        row["excluded"] = row["rate"] > threshold
    for rec in store.records:
        if per_model[rec.model]["excluded"]:
            continue
        if rec.parse_status in ("parse-error", "transport-error"):
            dropped.append((rec.model, rec.problem_id, rec.order))
    return ExclusionManifest(threshold, per_model, dropped)


def analysis_records(store: RunStore, manifest: Optional[ExclusionManifest] = None):
    """Records that survive the exclusion rules."""
    manifest = manifest or exclusion_report(store)
    dropped = set(manifest.dropped_records)
    out = []
    for rec in store.records:
        if manifest.per_model[rec.model]["excluded"]:
            continue
        if (rec.model, rec.problem_id, rec.order) in dropped:
            continue
        out.append(rec)
    return out
