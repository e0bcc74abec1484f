"""Cooperation verdicts: interchangeable evaluator backends plus shaping.

A verdict is the pair (logit_good, logit_bad) for one prompt; the shaping
signal is lambda_bonus exactly when logit_good > logit_bad (strict), else 0.
Backends must be deterministic per prompt for the lifetime of a run; the
cache layer makes that hold even for remote calls (including fallbacks).
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, replace

import httpx

from .config import EvaluatorConfig, RunConfig
from .errors import ConfigError, ProtocolError
from .prompts import parse_prompt

SOURCE_HEURISTIC = "Heuristic"
SOURCE_REMOTE = "Remote"
SOURCE_CACHE = "Cache"
SOURCE_REPLAY = "Replay"
SOURCE_FALLBACK = "Fallback"

CANDIDATES = ("good", "bad")


@dataclass(frozen=True)
class EvaluatorVerdict:
    logit_good: float
    logit_bad: float
    source: str

    @property
    def is_good(self) -> bool:
        return self.logit_good > self.logit_bad


def shaping_signal(verdict: EvaluatorVerdict, lambda_bonus: float) -> float:
    """Eq-style gate: the full bonus on a strictly good verdict, else zero."""
    if lambda_bonus < 0:
        raise ConfigError(f"shaping.lambda_bonus: must be >= 0, got {lambda_bonus}")
    return lambda_bonus if verdict.logit_good > verdict.logit_bad else 0.0


def on_pace_threshold(t: int, horizon: int, n_orders: int) -> int:
    """Pending-order budget at time t: ceil(K * (1 - t/T)) + 1, exactly.

    Integer ceiling of K*(T-t)/T, computed without floats.
    """
    return (n_orders * (horizon - t) + horizon - 1) // horizon + 1


class HeuristicEvaluator:
    """Rule-based stand-in scoring prompts by order backlog vs. time left."""

    source = SOURCE_HEURISTIC

    def __init__(self, n_orders: int = 5):
        self.n_orders = n_orders

    def judge(self, prompt: str) -> EvaluatorVerdict:
        ctx = parse_prompt(prompt)
        good = ctx.pending <= on_pace_threshold(ctx.t, ctx.horizon, self.n_orders)
        if good:
            return EvaluatorVerdict(1.0, -1.0, SOURCE_HEURISTIC)
        return EvaluatorVerdict(-1.0, 1.0, SOURCE_HEURISTIC)


def judge_heuristic(prompt: str, n_orders: int = 5) -> EvaluatorVerdict:
    return HeuristicEvaluator(n_orders).judge(prompt)


class RemoteEvaluator:
    """HTTP backend speaking the /v1/logits wire protocol.

    Timeouts and connection failures degrade to a Fallback verdict (zero
    logits, zero bonus); malformed responses are protocol errors and abort
    the run.
    """

    def __init__(self, endpoint: str, timeout_ms: float):
        self.endpoint = endpoint.rstrip("/")
        self.timeout_s = timeout_ms / 1000.0
        self._client = httpx.Client(timeout=self.timeout_s)

    def close(self) -> None:
        self._client.close()

    def judge(self, prompt: str) -> EvaluatorVerdict:
        try:
            resp = self._client.post(
                f"{self.endpoint}/v1/logits",
                json={"prompt": prompt, "candidates": list(CANDIDATES)},
            )
        except (httpx.TimeoutException, httpx.ConnectError):
            return EvaluatorVerdict(0.0, 0.0, SOURCE_FALLBACK)
        except httpx.HTTPError as exc:
            raise ProtocolError(f"evaluator request failed: {exc}") from exc
        if resp.status_code != 200:
            raise ProtocolError(
                f"evaluator endpoint returned status {resp.status_code}: {resp.text[:200]}"
            )
        try:
            body = resp.json()
        except (json.JSONDecodeError, ValueError) as exc:
            raise ProtocolError(f"evaluator response is not JSON: {exc}") from exc
        logits = body.get("logits")
        if (
            not isinstance(logits, list)
            or len(logits) != len(CANDIDATES)
            or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in logits)
            or not all(math.isfinite(float(x)) for x in logits)
            or not isinstance(body.get("model"), str)
        ):
            raise ProtocolError(f"evaluator response malformed: {body!r}")
        return EvaluatorVerdict(float(logits[0]), float(logits[1]), SOURCE_REMOTE)


class ReplayEvaluator:
    """Serves verdicts from a pinned prompt -> [logit_good, logit_bad] map."""

    source = SOURCE_REPLAY

    def __init__(self, path: str):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load replay fixture {path!r}: {exc}") from exc
        self._table = {}
        for prompt, pair in raw.items():
            if not (isinstance(pair, list) and len(pair) == 2):
                raise ConfigError(f"replay fixture {path!r}: bad entry for {prompt!r}")
            self._table[prompt] = (float(pair[0]), float(pair[1]))

    def judge(self, prompt: str) -> EvaluatorVerdict:
        if prompt not in self._table:
            raise ConfigError(f"replay fixture has no verdict for prompt {prompt!r}")
        good, bad = self._table[prompt]
        return EvaluatorVerdict(good, bad, SOURCE_REPLAY)


class CachedEvaluator:
    """Write-through, prompt-keyed cache over any backend.

    The cached verdict keeps the backend's logits but reports source Cache,
    so logs distinguish cold calls from hits.  Thread-safe; verdicts are
    deterministic, so concurrent duplicate writes are benign.
    """

    def __init__(self, backend):
        self.backend = backend
        self._cache: dict[str, EvaluatorVerdict] = {}
        self._lock = threading.Lock()

    def judge(self, prompt: str) -> EvaluatorVerdict:
        with self._lock:
            hit = self._cache.get(prompt)
        if hit is not None:
            return hit
        verdict = self.backend.judge(prompt)
        with self._lock:
            self._cache[prompt] = replace(verdict, source=SOURCE_CACHE)
        return verdict

    def close(self) -> None:
        close = getattr(self.backend, "close", None)
        if close is not None:
            close()


def make_evaluator(config: RunConfig, cached: bool = True):
    """Build the configured backend, cache-wrapped by default."""
    ev: EvaluatorConfig = config.evaluator
    if ev.kind == "heuristic":
        backend = HeuristicEvaluator(n_orders=config.env.n_orders)
    elif ev.kind == "remote":
        backend = RemoteEvaluator(ev.endpoint, ev.timeout_ms)
    elif ev.kind == "replay":
        if not ev.replay_path:
            raise ConfigError("evaluator.replay_path: required when kind is 'replay'")
        backend = ReplayEvaluator(ev.replay_path)
    else:
        raise ConfigError(f"evaluator.kind: unknown kind {ev.kind!r}")
    return CachedEvaluator(backend) if cached else backend
