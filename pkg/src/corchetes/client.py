"""HTTP client for fine-tuned text-generation endpoints.

Protocol: ``POST {base}/generate`` with JSON
``{"prompt": ..., "max_new_tokens": n, "stop": [s], "temperature": t}``,
expecting ``{"text": ...}`` back.  Failures never raise past the record:
each sentence yields a PredictionRecord carrying either the raw generation
or an error note, always with its measured wall-clock latency.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import requests

__all__ = [
    "EndpointConfig",
    "PredictionRecord",
    "LatencySummary",
    "EmptyInput",
    "predict",
    "predict_corpus",
]

DEFAULT_PROMPT_TEMPLATE = "<s>{sentence}</s>\n<s>"


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    timeout: float = 60.0
    max_in_flight: int = 4
    max_new_tokens: int = 512
    stop: str = "</s>"
    temperature: float = 0.0
    prompt_template: str = DEFAULT_PROMPT_TEMPLATE

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.prompt_template.count("{sentence}") != 1:
            raise ValueError("prompt template needs exactly one {sentence} slot")

    def render_prompt(self, sentence: str) -> str:
        return self.prompt_template.replace("{sentence}", sentence)


@dataclass(frozen=True)
class PredictionRecord:
    id: str
    raw: str | None
    latency: float
    error: str | None = None

    def __post_init__(self):
        if (self.raw is None) == (self.error is None):
            raise ValueError("exactly one of raw text or error note must be set")


def predict(
    sentence: str,
    cfg: EndpointConfig,
    record_id: str = "0",
    session: requests.Session | None = None,
) -> PredictionRecord:
    """Request one generation; transport errors are retried once, timeouts
    never (an overlong generation will just time out again)."""
    payload = {
        "prompt": cfg.render_prompt(sentence),
        "max_new_tokens": cfg.max_new_tokens,
        "stop": [cfg.stop],
        "temperature": cfg.temperature,
    }
    post = (session or requests).post
    url = cfg.base_url.rstrip("/") + "/generate"
    start = time.perf_counter()
    error = None
    for attempt in (1, 2):
        try:
            response = post(url, json=payload, timeout=cfg.timeout)
        except requests.Timeout:
            error = f"timeout: no response within {cfg.timeout}s"
            break
        except requests.ConnectionError as exc:
            error = f"transport: {exc}"
            continue  # single retry
        except requests.RequestException as exc:
            error = f"transport: {exc}"
            break
        if not response.ok:
            error = f"http-status: {response.status_code}"
            break
        try:
            text = response.json()["text"]
        except (ValueError, KeyError, TypeError):
            error = "malformed-response: expected JSON with a 'text' field"
            break
        if not isinstance(text, str):
            error = "malformed-response: 'text' is not a string"
            break
        latency = time.perf_counter() - start
        return PredictionRecord(record_id, text, latency)
    latency = time.perf_counter() - start
    return PredictionRecord(record_id, None, latency, error=error)


@dataclass(frozen=True)
class LatencySummary:
    count: int
    failures: int
    mean: float
    p50: float
    p95: float


def _nearest_rank(sorted_values: Sequence[float], q: float) -> float:
    rank = max(1, math.ceil(q * len(sorted_values)))
    return sorted_values[rank - 1]


def summarize_latencies(records: Iterable[PredictionRecord]) -> LatencySummary:
    records = list(records)
    ok = sorted(r.latency for r in records if r.error is None)
    failures = sum(1 for r in records if r.error is not None)
    if not ok:
        return LatencySummary(len(records), failures, 0.0, 0.0, 0.0)
    return LatencySummary(
        count=len(records),
        failures=failures,
        mean=sum(ok) / len(ok),
        p50=_nearest_rank(ok, 0.50),
        p95=_nearest_rank(ok, 0.95),
    )


def predict_corpus(
    sentences: list[tuple[str, str]] | list[str],
    cfg: EndpointConfig,
) -> tuple[list[PredictionRecord], LatencySummary]:
    """Batch prediction with bounded fan-out.

    ``sentences`` is a list of (id, sentence) pairs, or bare sentences
    which get positional ids.  Output order always matches input order,
    regardless of completion order; the latency summary covers successful
    requests only.
    """
    if not sentences:
        raise EmptyInput("no sentences to predict")
    pairs = [
        s if isinstance(s, tuple) else (str(i), s)
        for i, s in enumerate(sentences)
    ]
    session = requests.Session()
    try:
        with ThreadPoolExecutor(max_workers=cfg.max_in_flight) as pool:
            records = list(
                pool.map(
                    lambda p: predict(p[1], cfg, record_id=p[0], session=session),
                    pairs,
                )
            )
    finally:
        session.close()
    return records, summarize_latencies(records)
