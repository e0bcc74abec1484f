"""JSONL step logs: one self-contained object per line, flushed per episode.

Layout of a log file:

    {"episode_start": {...}}      one per episode
    {"condition": ..., "t": ...}  one per step (schema below)
    {"episode_end": {...}}        totals, enabling recomputation checks

Step records carry: condition, t, actions, base_reward, bonus,
shaped_reward, prompt, logit_good, logit_bad, verdict_source, latency_ns,
events.  Logs are the source of truth for metrics; every report is
recomputable from them.  On an I/O failure a partial-log marker line is
attempted and the run aborts.
"""

from __future__ import annotations

import json
from typing import Iterable, Iterator

from .errors import BurgerKitchenError


class LogWriteError(BurgerKitchenError):
    exit_code = 1


class JsonlWriter:
    def __init__(self, path: str):
        self.path = path
        try:
            self._fh = open(path, "w", encoding="utf-8")
        except OSError as exc:
            raise LogWriteError(f"cannot open log file {path!r}: {exc}") from exc

    def write(self, obj: dict) -> None:
        try:
            self._fh.write(json.dumps(obj, separators=(",", ":")) + "\n")
        except OSError as exc:
            self._mark_partial(str(exc))
            raise LogWriteError(f"log write failed for {self.path!r}: {exc}") from exc

    def flush(self) -> None:
        try:
            self._fh.flush()
        except OSError as exc:
            self._mark_partial(str(exc))
            raise LogWriteError(f"log flush failed for {self.path!r}: {exc}") from exc

    def _mark_partial(self, reason: str) -> None:
        try:
            self._fh.write(json.dumps({"partial_log": True, "error": reason}) + "\n")
            self._fh.flush()
        except OSError:
            pass

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "JsonlWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def make_step_record(
    condition: str,
    t: int,
    actions: tuple[int, int],
    base_reward: float,
    bonus: float,
    shaped_reward: float,
    prompt: str,
    logit_good: float,
    logit_bad: float,
    verdict_source: str,
    latency_ns: int,
    events: Iterable[str],
) -> dict:
    return {
        "condition": condition,
        "t": t,
        "actions": [int(actions[0]), int(actions[1])],
        "base_reward": base_reward,
        "bonus": bonus,
        "shaped_reward": shaped_reward,
        "prompt": prompt,
        "logit_good": logit_good,
        "logit_bad": logit_bad,
        "verdict_source": verdict_source,
        "latency_ns": int(latency_ns),
        "events": list(events),
    }


def read_jsonl(path: str) -> Iterator[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogWriteError(f"{path}:{line_no}: invalid JSONL line: {exc}") from exc
