"""Chat-completions client: greedy decoding, retries, ordered batching.

Any backend exposing the OpenAI-compatible chat wire contract works.  The
API key comes from ``TERMEX_API_KEY`` (falling back to ``OPENAI_API_KEY``)
and is never logged.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import requests

from termex.prompting import PromptBundle

__all__ = [
    "ModelConfig",
    "CompletionResult",
    "BatchItem",
    "LlmClientError",
    "HttpError",
    "TimeoutError",
    "RetriesExhausted",
    "ContentFilterError",
    "complete",
    "run_batch",
    "prompt_sha256",
    "append_response_log",
    "load_response_log",
]

logger = logging.getLogger(__name__)

API_KEY_ENV_VARS = ("TERMEX_API_KEY", "OPENAI_API_KEY")


class LlmClientError(RuntimeError):
    pass


class HttpError(LlmClientError):
    def __init__(self, status: int, body: str):
        super().__init__(f"HTTP {status}: {body[:200]}")
        self.status = status
        self.body = body


class TimeoutError(LlmClientError):  # noqa: A001 - mirrors the wire failure mode
    pass


class RetriesExhausted(LlmClientError):
    def __init__(self, attempts: int, last: Exception):
        super().__init__(f"gave up after {attempts} attempts: {last}")
        self.attempts = attempts
        self.last = last


class ContentFilterError(LlmClientError):
    """Endpoint returned an empty choice set."""


@dataclass(frozen=True)
class ModelConfig:
    endpoint: str
    model_name: str
    temperature: float = 0.0
    max_output_tokens: int = 256
    request_timeout: float = 60.0
    max_retries: int = 3
    parallelism: int = 1
    retry_base_delay: float = 0.25
    allow_sampling: bool = False

    def __post_init__(self):
        if self.temperature != 0.0 and not self.allow_sampling:
            raise ValueError(
                "temperature must be 0 (greedy) unless allow_sampling is set"
            )
        if self.parallelism < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism}")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    usage: dict
    request_id: Optional[str]
    latency_ms: float
    retries: int


@dataclass(frozen=True)
class BatchItem:
    index: int
    raw: Optional[str]
    error: Optional[str] = None
    usage: dict = field(default_factory=dict)
    latency_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None


def _api_key() -> Optional[str]:
    for name in API_KEY_ENV_VARS:
        value = os.environ.get(name)
        if value:
            return value
    return None


def prompt_sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def complete(prompt: PromptBundle | str, cfg: ModelConfig) -> CompletionResult:
    """Send one chat completion and return the first choice verbatim."""
    text = prompt.text if isinstance(prompt, PromptBundle) else prompt
    if not text:
        raise ValueError("prompt text must be nonempty")
    payload = {
        "model": cfg.model_name,
        "messages": [{"role": "user", "content": text}],
        "temperature": cfg.temperature,
        "max_tokens": cfg.max_output_tokens,
    }
    headers = {}
    key = _api_key()
    if key:
        headers["Authorization"] = f"Bearer {key}"

    start = time.perf_counter()
    attempt = 0
    last_error: Optional[Exception] = None
    while attempt <= cfg.max_retries:
        try:
            response = requests.post(
                cfg.endpoint, json=payload, headers=headers,
                timeout=cfg.request_timeout,
            )
        except requests.Timeout as exc:
            raise TimeoutError(f"request timed out after {cfg.request_timeout}s") from exc
        if response.status_code == 200:
            body = response.json()
            choices = body.get("choices") or []
            if not choices:
                raise ContentFilterError("endpoint returned no choices")
            latency_ms = (time.perf_counter() - start) * 1000.0
            result = CompletionResult(
                text=choices[0]["message"]["content"],
                usage=body.get("usage") or {},
                request_id=body.get("id"),
                latency_ms=latency_ms,
                retries=attempt,
            )
            logger.debug(
                "completion id=%s latency=%.1fms retries=%d usage=%s",
                result.request_id, result.latency_ms, attempt, result.usage,
            )
            return result
        if response.status_code in (429, 500, 502, 503, 504):
            last_error = HttpError(response.status_code, response.text)
            if attempt < cfg.max_retries:
                time.sleep(cfg.retry_base_delay * (2**attempt))
            attempt += 1
            continue
        raise HttpError(response.status_code, response.text)
    raise RetriesExhausted(cfg.max_retries + 1, last_error or RuntimeError("unknown"))


def run_batch(
    prompts: Sequence[PromptBundle],
    cfg: ModelConfig,
    completed: Optional[Mapping[int, str]] = None,
) -> list[BatchItem]:
    """Complete each prompt; output i matches prompt i regardless of
    completion order.  Items listed in ``completed`` are reused without a
    request (resume support); failures are captured per item.
    """
    if not prompts:
        raise ValueError("prompt batch must be nonempty")
    completed = completed or {}
    results: list[Optional[BatchItem]] = [None] * len(prompts)

    def work(index: int) -> BatchItem:
        try:
            res = complete(prompts[index], cfg)
            return BatchItem(
                index=index, raw=res.text, usage=res.usage,
                latency_ms=res.latency_ms,
            )
        except LlmClientError as exc:
            logger.warning("prompt %d failed: %s", index, exc)
            return BatchItem(index=index, raw=None, error=str(exc))

    pending = []
    for i in range(len(prompts)):
        if i in completed:
            results[i] = BatchItem(index=i, raw=completed[i])
        else:
            pending.append(i)
    if pending:
        with ThreadPoolExecutor(max_workers=cfg.parallelism) as pool:
            for item in pool.map(work, pending):
                results[item.index] = item
    return [item for item in results if item is not None]


# ---------------------------------------------------------------------------
# Response log: raw model output persisted before any parsing happens, so
# evaluation is always recomputable offline.
# ---------------------------------------------------------------------------


def append_response_log(path, query_id: str, prompt_text: str, item: BatchItem) -> None:
    entry = {
        "query_id": query_id,
        "prompt_sha256": prompt_sha256(prompt_text),
        "raw": item.raw,
        "latency_ms": item.latency_ms,
        "usage": item.usage,
        "error": item.error,
    }
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(entry, sort_keys=True) + "\n")


def load_response_log(path) -> list[dict]:
    entries = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                entries.append(json.loads(line))
    return entries
