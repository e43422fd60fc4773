"""Completion-backend client: decoding config, retries, bounded concurrency.

Two backends share one small wire contract. ``HttpBackend`` POSTs
``{prompt, n, max_tokens, stop, temperature | num_beams, ...}`` as JSON and
expects ``{"choices": [{"text": ..., "tokens": ...?}, ...]}`` back, which maps
onto common completion-serving APIs via ``BackendSpec.extra_params``.
``MockBackend`` replays a deterministic JSON script keyed by sample id, so
evaluations can run byte-reproducibly with no server; its scripted latencies
are accounting only, nothing sleeps.
"""

from __future__ import annotations

import json
import os
import threading
import time
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import requests

from linefix.errors import (
    BackendError,
    CapabilityError,
    GenerationError,
    GenerationTimeout,
    MalformedResponse,
    TransportError,
    UnknownSampleId,
)

STRATEGIES = ("beam", "sample")


@dataclass(frozen=True)
class DecodeConfig:
    """How candidates are decoded; temperature only applies to sampling.

    ``seed`` is forwarded to the backend so sampled runs can be replayed.
    """

    strategy: str = "beam"
    k: int = 5
    temperature: float = 0.8
    max_new_tokens: int = 256
    stop_sequences: tuple[str, ...] = ()
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"strategy must be one of {STRATEGIES}, got {self.strategy!r}")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.strategy == "sample" and self.temperature <= 0:
            raise ValueError("sampling requires temperature > 0")
        if not isinstance(self.stop_sequences, tuple):
            object.__setattr__(self, "stop_sequences", tuple(self.stop_sequences))


@dataclass
class BackendSpec:
    """Connection and retry settings. auth_env names an env var, never a secret."""

    endpoint: str = ""
    model: str = ""
    auth_env: str | None = None
    timeout_s: float = 60.0
    max_attempts: int = 3
    backoff_s: float = 0.5
    max_in_flight: int = 1
    extra_params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


@dataclass
class CandidateSet:
    """Candidates for one sample, or the error that prevented them."""

    sample_id: str
    candidates: list[str]
    tokens_generated: list[int]
    wall_time_s: float
    backend_reported: bool
    attempts: int = 1
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class BatchResult:
    outcomes: list[CandidateSet]
    total_time_s: float
    synthetic_time: bool


_RETRYABLE = (GenerationTimeout, TransportError, BackendError, MalformedResponse)


class MockBackend:
    """Deterministic scripted backend.

    Script shape::

        {
          "strategies": ["beam", "sample"],        # optional, default both
          "default_latency_s": 0.0,                # optional
          "samples": {
            "<sample_id>": {
              "candidates": ["...", ...],
              "tokens": [10, 20, ...],             # optional
              "latency_s": 0.25,                   # optional
              "fail_times": 1                      # optional transient failures
            }
          }
        }

    Candidates are truncated or padded with empty strings to exactly k.
    """

    synthetic = True

    def __init__(self, script: dict, spec: BackendSpec | None = None):
        self.spec = spec if spec is not None else BackendSpec(endpoint="mock:")
        self.strategies = tuple(script.get("strategies", STRATEGIES))
        self.default_latency_s = float(script.get("default_latency_s", 0.0))
        self.samples = script.get("samples", {})
        self._fail_budget = {
            sid: int(entry.get("fail_times", 0)) for sid, entry in self.samples.items()
        }
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str, spec: BackendSpec | None = None) -> "MockBackend":
        with open(path, encoding="utf-8") as fh:
            return cls(json.load(fh), spec)

    def complete(
        self, sample_id: str, prompt: str, cfg: DecodeConfig
    ) -> tuple[list[str], list[int] | None, float]:
        if cfg.strategy not in self.strategies:
            raise CapabilityError(f"mock backend does not support {cfg.strategy!r} decoding")
        entry = self.samples.get(sample_id)
        if entry is None:
            raise UnknownSampleId(f"no scripted entry for sample {sample_id!r}")
        with self._lock:
            if self._fail_budget.get(sample_id, 0) > 0:
                self._fail_budget[sample_id] -= 1
                raise TransportError(f"scripted failure for sample {sample_id!r}")
        candidates = [str(c) for c in entry.get("candidates", [])][: cfg.k]
        candidates += [""] * (cfg.k - len(candidates))
        tokens = entry.get("tokens")
        if tokens is not None:
            tokens = [int(t) for t in tokens][: cfg.k]
            tokens += [0] * (cfg.k - len(tokens))
        latency = float(entry.get("latency_s", self.default_latency_s))
        return candidates, tokens, latency


class HttpBackend:
    """JSON-over-HTTP adapter for completion servers."""

    synthetic = False

    def __init__(self, spec: BackendSpec):
        if not spec.endpoint:
            raise ValueError("HttpBackend needs an endpoint")
        self.spec = spec

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.spec.auth_env:
            token = os.environ.get(self.spec.auth_env)
            if not token:
                raise BackendError(f"credential env var {self.spec.auth_env} is not set")
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(
        self, sample_id: str, prompt: str, cfg: DecodeConfig
    ) -> tuple[list[str], list[int] | None, float | None]:
        payload: dict = {
            "prompt": prompt,
            "n": cfg.k,
            "max_tokens": cfg.max_new_tokens,
            "stop": list(cfg.stop_sequences),
        }
        if self.spec.model:
            payload["model"] = self.spec.model
        if cfg.strategy == "sample":
            payload["temperature"] = cfg.temperature
        else:
            payload["num_beams"] = cfg.k
        if cfg.seed is not None:
            payload["seed"] = cfg.seed
        payload.update(self.spec.extra_params)
        try:
            resp = requests.post(
                self.spec.endpoint,
                json=payload,
                headers=self._headers(),
                timeout=self.spec.timeout_s,
            )
        except requests.Timeout as exc:
            raise GenerationTimeout(str(exc))
        except requests.RequestException as exc:
            raise TransportError(str(exc))
        if resp.status_code >= 300:
            raise BackendError(f"HTTP {resp.status_code}: {resp.text[:300]}")
        try:
            data = resp.json()
        except ValueError as exc:
            raise MalformedResponse(f"response is not JSON: {exc}")
        choices = data.get("choices") if isinstance(data, dict) else None
        if not isinstance(choices, list):
            raise MalformedResponse("response has no choices list")
        candidates: list[str] = []
        tokens: list[int] = []
        reported = True
        for choice in choices[: cfg.k]:
            if not isinstance(choice, dict) or not isinstance(choice.get("text"), str):
                raise MalformedResponse("choice without a text field")
            candidates.append(choice["text"])
            if isinstance(choice.get("tokens"), int):
                tokens.append(choice["tokens"])
            else:
                reported = False
        return candidates, tokens if reported and tokens else None, None


def _approx_tokens(text: str) -> int:
    return len(text.split())


def generate(
    prompt: str,
    cfg: DecodeConfig,
    backend,
    *,
    sample_id: str = "",
) -> CandidateSet:
    """One request with the backend's retry policy; raises after the last attempt."""
    spec: BackendSpec = backend.spec
    start = time.perf_counter()
    last: GenerationError | None = None
    for attempt in range(1, spec.max_attempts + 1):
        try:
            candidates, tokens, latency = backend.complete(sample_id, prompt, cfg)
        except _RETRYABLE as exc:
            last = exc
            if attempt < spec.max_attempts:
                delay = spec.backoff_s * (2 ** (attempt - 1))
                if delay > 0 and not backend.synthetic:
                    time.sleep(delay)
            continue
        wall = latency if latency is not None else time.perf_counter() - start
        if tokens is None:
            tokens = [_approx_tokens(c) for c in candidates]
            reported = False
        else:
            reported = True
        return CandidateSet(
            sample_id=sample_id,
            candidates=candidates,
            tokens_generated=tokens,
            wall_time_s=wall,
            backend_reported=reported,
            attempts=attempt,
        )
    assert last is not None
    raise last


def generate_batch(
    prompts: Sequence[tuple[str, str]],
    cfg: DecodeConfig,
    backend,
    progress: Callable[[int, int], None] | None = None,
) -> BatchResult:
    """Generate for (sample_id, prompt) pairs with bounded concurrency.

    Outcomes come back in input order; a failed sample becomes an error-bearing
    CandidateSet rather than aborting the batch. Total time is measured once
    around the whole batch, or summed from scripted latencies for a synthetic
    backend so reports stay reproducible.
    """
    ids = [sid for sid, _ in prompts]
    if len(set(ids)) != len(ids):
        raise ValueError("sample ids must be unique within a batch")
    total = len(prompts)
    done = 0
    done_lock = threading.Lock()

    def one(item: tuple[str, str]) -> CandidateSet:
        sid, prompt = item
        try:
            outcome = generate(prompt, cfg, backend, sample_id=sid)
        except GenerationError as exc:
            outcome = CandidateSet(
                sample_id=sid,
                candidates=[],
                tokens_generated=[],
                wall_time_s=0.0,
                backend_reported=False,
                attempts=backend.spec.max_attempts,
                error=f"{type(exc).__name__}: {exc}",
            )
        if progress is not None:
            nonlocal done
            with done_lock:
                done += 1
                progress(done, total)
        return outcome

    start = time.perf_counter()
    max_workers = max(1, backend.spec.max_in_flight)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        outcomes = list(pool.map(one, prompts))
    elapsed = time.perf_counter() - start
    synthetic = bool(getattr(backend, "synthetic", False))
    if synthetic:
        total_time = sum(o.wall_time_s for o in outcomes)
    else:
        total_time = elapsed
    return BatchResult(outcomes, total_time, synthetic)
