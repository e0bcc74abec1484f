"""Command-line surface.

Verbs: train, evaluate, bench-latency, probe-equilibrium, replay, report,
plot.  Every verb accepts --config and --seed overrides.  Exit codes:
0 success, 2 config error, 3 numeric fault, 4 protocol error, 1 otherwise.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

from .checkpoint import load_checkpoint, save_checkpoint
from .config import CONDITIONS, RunConfig, canonical_json, load_config
from .errors import BurgerKitchenError, ConfigError, ContractError
from .evaluator import make_evaluator, shaping_signal
from .harness import (
    LearnedPolicy,
    bench_latency,
    deviation_probe,
    evaluate_suite,
    records_from_log,
    suite_metrics,
)
from .logs import JsonlWriter, read_jsonl
from .observe import obs_dim
from .prompts import parse_prompt

SUMMARY_FIELDS = (
    "method",
    "condition",
    "episodes",
    "mean_return",
    "std_return",
    "completion_rate",
    "mean_idle_steps",
    "mean_deliveries",
    "mean_expiries",
    "mean_bonus_per_step",
)


def _load_run_config(args) -> RunConfig:
    if getattr(args, "config", None):
        config = load_config(args.config)
    else:
        config = RunConfig()
    return config


def _train_seed(args, config: RunConfig) -> int:
    if args.seed is not None:
        return args.seed
    return config.seeds.train[0]


def _load_pair(run_dir: str, config: RunConfig):
    d = Path(run_dir)
    expected = obs_dim(config)
    pair = []
    for agent_id in (0, 1):
        path = d / f"agent{agent_id}.ckpt"
        if not path.exists():
            raise ConfigError(f"checkpoint not found: {path}")
        params, _ = load_checkpoint(path, config=config, expected_obs_dim=expected)
        pair.append(LearnedPolicy(params))
    return pair


def _write_csv(path: Path, rows: list[dict], fields) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(fields), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def cmd_train(args) -> int:
    from .trainer import train_pair

    config = _load_run_config(args)
    seed = _train_seed(args, config)
    out_dir = Path(args.out or f"runs/seed{seed}")
    out_dir.mkdir(parents=True, exist_ok=True)

    result = train_pair(config, seed, progress=args.progress)
    for agent_id in (0, 1):
        save_checkpoint(
            result.params[agent_id],
            out_dir / f"agent{agent_id}.ckpt",
            config,
            agent_id,
        )
    (out_dir / "config.json").write_text(canonical_json(config) + "\n")
    if result.history:
        _write_csv(out_dir / "history.csv", result.history, result.history[0].keys())
    last = result.history[-1] if result.history else {}
    print(
        json.dumps(
            {
                "out_dir": str(out_dir),
                "seed": seed,
                "total_steps": result.total_steps,
                "wall_seconds": round(result.wall_seconds, 2),
                "final_mean_base_return": last.get("mean_base_return"),
            }
        )
    )
    return 0


def cmd_evaluate(args) -> int:
    config = _load_run_config(args)
    if args.seed is not None:
        config = dataclasses.replace(
            config, seeds=dataclasses.replace(config.seeds, eval_base=args.seed)
        )
    policies = _load_pair(args.run_dir, config)
    conditions = args.conditions.split(",") if args.conditions else list(CONDITIONS)
    for c in conditions:
        if c not in CONDITIONS:
            raise ConfigError(f"unknown condition {c!r}; expected one of {CONDITIONS}")
    episodes = args.episodes or config.seeds.eval_episodes
    out_dir = Path(args.out or "eval")
    out_dir.mkdir(parents=True, exist_ok=True)
    method = "shaped" if config.shaping.enabled else "ppo_only"

    rows = []
    for condition in conditions:
        log_path = out_dir / f"steps_{method}_{condition}.jsonl"
        with JsonlWriter(log_path) as writer:
            results = evaluate_suite(
                policies,
                config,
                [condition],
                episodes,
                deterministic=args.greedy,
                log_writer=writer,
            )
        row = {"method": method, **suite_metrics(results[condition])}
        rows.append(row)
        print(json.dumps(row))
    _write_csv(out_dir / f"summary_{method}.csv", rows, SUMMARY_FIELDS)
    return 0


def cmd_bench_latency(args) -> int:
    config = _load_run_config(args)
    policies = _load_pair(args.run_dir, config)
    stats = bench_latency(policies, config, min_steps=args.min_steps)
    text = json.dumps(stats, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def cmd_probe(args) -> int:
    config = _load_run_config(args)
    policies = _load_pair(args.run_dir, config)
    report = deviation_probe(policies, config, n_episodes=args.episodes)
    for row in report.as_rows():
        print(json.dumps(row))
    return 0


def cmd_replay(args) -> int:
    """Re-judge logged prompts and confirm the bonus column reproduces."""
    config = _load_run_config(args)
    evaluator = make_evaluator(config)
    lam = config.shaping.lambda_bonus
    stride = config.shaping.query_stride
    checked = 0
    last_verdict = None
    try:
        for rec in read_jsonl(args.log):
            if "episode_start" in rec:
                last_verdict = None
                continue
            if "t" not in rec:
                continue
            if rec["verdict_source"] == "None":
                if rec["bonus"] != 0.0:
                    raise ContractError(
                        f"{args.log}: t={rec['t']} unshaped step with bonus {rec['bonus']}"
                    )
                continue
            parse_prompt(rec["prompt"])
            if (rec["t"] - 1) % stride == 0 or last_verdict is None:
                last_verdict = evaluator.judge(rec["prompt"])
            bonus = shaping_signal(last_verdict, lam)
            if bonus != rec["bonus"]:
                raise ContractError(
                    f"{args.log}: t={rec['t']} replayed bonus {bonus} != "
                    f"logged {rec['bonus']}"
                )
            checked += 1
    finally:
        evaluator.close()
    print(json.dumps({"log": str(args.log), "steps_verified": checked}))
    return 0


def cmd_report(args) -> int:
    grouped: dict[tuple[str, str], list] = {}
    for log in args.log:
        for method, record in records_from_log(log):
            grouped.setdefault((method, record.condition), []).append(record)
    rows = []
    for (method, _condition), records in sorted(grouped.items()):
        rows.append({"method": method, **suite_metrics(records)})
    _write_csv(Path(args.out), rows, SUMMARY_FIELDS)
    for row in rows:
        print(json.dumps(row))
    return 0


def cmd_experiment(args) -> int:
    from .experiments import run_grid

    config = _load_run_config(args)
    seeds = (
        tuple(int(s) for s in args.seeds.split(",")) if args.seeds else None
    )
    conditions = (
        args.conditions.split(",") if args.conditions else ["clean", "combined"]
    )
    for c in conditions:
        if c not in CONDITIONS:
            raise ConfigError(f"unknown condition {c!r}; expected one of {CONDITIONS}")
    out_dir = Path(args.out or "experiment")
    out_dir.mkdir(parents=True, exist_ok=True)

    grid = run_grid(
        config,
        seeds=seeds,
        conditions=conditions,
        n_eval_episodes=args.episodes,
        progress=args.progress,
    )
    for arm in grid.arms:
        cell_dir = out_dir / f"{arm.method}_{arm.condition}_seed{arm.seed}"
        cell_dir.mkdir(parents=True, exist_ok=True)
        cfg = config.with_condition(arm.condition).with_shaping(
            arm.method == "shaped"
        )
        for agent_id in (0, 1):
            save_checkpoint(
                arm.train.params[agent_id],
                cell_dir / f"agent{agent_id}.ckpt",
                cfg,
                agent_id,
            )
        if arm.train.history:
            _write_csv(
                cell_dir / "history.csv",
                arm.train.history,
                arm.train.history[0].keys(),
            )
    rows = grid.summary_rows()
    if rows:
        _write_csv(out_dir / "summary.csv", rows, rows[0].keys())
    gaps = {c: grid.shaping_gap(c) for c in conditions}
    (out_dir / "shaping_gap.json").write_text(json.dumps(gaps, indent=2) + "\n")
    print(json.dumps({"out_dir": str(out_dir), "wall_seconds": round(grid.wall_seconds, 1)}))
    for row in rows:
        print(json.dumps(row))
    return 0


def cmd_plot(args) -> int:
    from .plots import (
        plot_completion_by_condition,
        plot_returns_by_condition,
        plot_training_curves,
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    if args.summary:
        with open(args.summary, newline="") as fh:
            rows = []
            for raw in csv.DictReader(fh):
                rows.append(
                    {
                        "method": raw["method"],
                        "condition": raw["condition"],
                        "mean_return": float(raw["mean_return"]),
                        "std_return": float(raw["std_return"]),
                        "completion_rate": float(raw["completion_rate"]),
                    }
                )
        written.append(plot_returns_by_condition(rows, str(out_dir / "returns.png")))
        written.append(
            plot_completion_by_condition(rows, str(out_dir / "completion.png"))
        )
    if args.history:
        with open(args.history, newline="") as fh:
            history = [
                {
                    "step": int(raw["step"]),
                    "mean_base_return": float(raw["mean_base_return"]),
                    "mean_bonus_per_step": float(raw["mean_bonus_per_step"]),
                }
                for raw in csv.DictReader(fh)
            ]
        written.append(plot_training_curves(history, str(out_dir / "training.png")))
    if not written:
        raise ConfigError("plot: provide --summary and/or --history")
    print(json.dumps({"figures": written}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="burger-kitchen",
        description="Two-agent kitchen gridworld with verdict-gated reward shaping.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--config", help="TOML config path (defaults built in)")
        p.add_argument("--seed", type=int, help="seed override")

    p = sub.add_parser("train", help="train a policy pair, write checkpoints")
    common(p)
    p.add_argument("--out", help="output run directory")
    p.add_argument("--progress", action="store_true", help="print rollout progress")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="run evaluation suites, write logs + summary")
    common(p)
    p.add_argument("--run-dir", required=True, help="directory with agent{0,1}.ckpt")
    p.add_argument("--conditions", help="comma-separated subset (default: all)")
    p.add_argument("--episodes", type=int, help="episodes per condition")
    p.add_argument("--out", help="output directory (default: eval)")
    p.add_argument(
        "--greedy",
        action="store_true",
        help="argmax actions instead of seeded policy sampling",
    )
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("bench-latency", help="per-decision latency benchmark")
    common(p)
    p.add_argument("--run-dir", required=True)
    p.add_argument("--min-steps", type=int, default=10_000)
    p.add_argument("--out", help="write stats JSON here as well")
    p.set_defaults(fn=cmd_bench_latency)

    p = sub.add_parser("probe-equilibrium", help="cooperative vs unilateral deviation")
    common(p)
    p.add_argument("--run-dir", required=True)
    p.add_argument("--episodes", type=int, default=50)
    p.set_defaults(fn=cmd_probe)

    p = sub.add_parser("replay", help="re-judge logged prompts, verify bonus column")
    common(p)
    p.add_argument("--log", required=True, help="JSONL step log to verify")
    p.set_defaults(fn=cmd_replay)

    p = sub.add_parser("report", help="rebuild summary CSV from JSONL logs")
    common(p)
    p.add_argument("--log", nargs="+", required=True, help="JSONL log file(s)")
    p.add_argument("--out", required=True, help="summary CSV path")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser(
        "experiment", help="train and evaluate the full method x condition grid"
    )
    common(p)
    p.add_argument("--seeds", help="comma-separated training seeds")
    p.add_argument("--conditions", help="comma-separated conditions")
    p.add_argument("--episodes", type=int, help="evaluation episodes per cell")
    p.add_argument("--out", help="output directory (default: experiment)")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("plot", help="render figures from summary/history CSVs")
    common(p)
    p.add_argument("--summary", help="summary CSV from evaluate/report")
    p.add_argument("--history", help="history CSV from train")
    p.add_argument("--out-dir", default="figures")
    p.set_defaults(fn=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BurgerKitchenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
