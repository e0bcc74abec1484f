"""Generator for the shared wire-conformance fixtures.

Writes two files consumed by both this package's tests and the kitchen
package's evaluator tests:

- wire_contract.json: request cases for schema/ordering/determinism checks;
- logit_replay.json: an ordered prompt log pinned to the logits the
  embedded tiny-det model produces, usable directly as a replay-evaluator
  fixture (flat {prompt: [logit_good, logit_bad]} map).

Regenerate with ``python -m llm_logit_server.fixtures <out_dir>`` after any
intentional change to the tiny-det weights, and commit the result.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from .model import TinyDetModel

WIRE_CONTRACT = {
    "endpoint_path": "/v1/logits",
    "determinism_repeats": 100,
    "requests": [
        {"prompt": "orders:2 t:25/400", "candidates": ["good", "bad"]},
        {"prompt": "orders:0 t:0/400", "candidates": ["good", "bad"]},
        {"prompt": "orders:5 t:399/400", "candidates": ["good", "bad"]},
        {"prompt": "orders:3 t:120/400", "candidates": ["bad", "good"]},
        {"prompt": "orders:1 t:47/400 dA:7 dB:2", "candidates": ["good", "bad"]},
        {"prompt": "orders:4 t:321/400", "candidates": ["good"]},
        {"prompt": "orders:2 t:25/400", "candidates": ["goodness", "badge"]},
    ],
}


def prompt_log(horizon: int = 400, steps: int = 60) -> list[str]:
    """A plausible single-episode prompt trace: orders arrive and resolve."""
    arrivals = {5, 12, 20, 28, 36}
    resolved = {25, 40, 55}
    pending = 0
    prompts = []
    for t in range(1, steps + 1):
        if t in arrivals:
            pending += 1
        if t in resolved and pending:
            pending -= 1
        prompts.append(f"orders:{pending} t:{t}/{horizon}")
    return prompts


def build_replay_table(model: TinyDetModel | None = None) -> dict[str, list[float]]:
    model = model or TinyDetModel()
    good = model.first_token_id("good")
    bad = model.first_token_id("bad")
    table: dict[str, list[float]] = {}
    for prompt in prompt_log():
        logits = model.next_token_logits(prompt)
        table[prompt] = [float(logits[good]), float(logits[bad])]
    return table


def write_fixtures(out_dir: Path) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    contract = out_dir / "wire_contract.json"
    replay = out_dir / "logit_replay.json"
    contract.write_text(json.dumps(WIRE_CONTRACT, indent=2) + "\n")
    replay.write_text(json.dumps(build_replay_table(), indent=2) + "\n")
    return [contract, replay]


def main(argv: list[str] | None = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    if len(args) != 1:
        print("usage: python -m llm_logit_server.fixtures <out_dir>", file=sys.stderr)
        return 2
    for path in write_fixtures(Path(args[0])):
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
