"""Run configuration: typed sections, TOML parsing, validation, hashing.

A RunConfig is the single source of truth for a run.  Parsing is strict:
unknown keys are rejected (typo guard) and every range violation names the
full key path.  The canonical hash covers every field that affects
trajectories, so checkpoints can detect config drift.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import os
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import layouts
from .errors import ConfigError

SCHEMA_VERSION = "1"
OBS_SCHEMA_VERSION = "obs-v1"

CONDITIONS = ("clean", "visibility", "timing", "combined")
EVALUATOR_KINDS = ("heuristic", "remote", "replay")

# The only environment variable the loader consults.
ENDPOINT_ENV_VAR = "BURGER_KITCHEN_EVALUATOR_ENDPOINT"



@dataclass(frozen=True)
class EnvConfig:
    layout: str = "burger_kitchen_7x5"
    horizon: int = 400
    cook_time: int = 10
    order_arrivals: tuple[int, ...] = (120, 140, 160, 180, 200)
    deadline_offset: int = 120
    reward_delivery: float = 2.0
    reward_expiry: float = -8.0

    @property
    def n_orders(self) -> int:
        return len(self.order_arrivals)

    @property
    def order_deadlines(self) -> tuple[int, ...]:
        return tuple(a + self.deadline_offset for a in self.order_arrivals)


@dataclass(frozen=True)
class NoiseConfig:
    condition: str = "clean"
    visibility_mask_prob: float = 0.15
    scalar_jitter: float = 0.05
    timing_jitter: int = 20

    @property
    def visibility_enabled(self) -> bool:
        return self.condition in ("visibility", "combined")

    @property
    def timing_enabled(self) -> bool:
        return self.condition in ("timing", "combined")


@dataclass(frozen=True)
class GaeConfig:
    gamma: float = 0.99
    lambda_gae: float = 0.95


@dataclass(frozen=True)
class ShapingConfig:
    enabled: bool = True
    lambda_bonus: float = 0.05
    query_stride: int = 1
    extended_prompt: bool = False


@dataclass(frozen=True)
class EvaluatorConfig:
    kind: str = "heuristic"
    endpoint: str = "http://127.0.0.1:8777"
    timeout_ms: float = 50.0
    replay_path: str = ""


@dataclass(frozen=True)
class PpoConfig:
    learning_rate: float = 3e-4
    clip_eps: float = 0.2
    n_envs: int = 8
    rollout_len: int = 256  # per env; total batch = n_envs * rollout_len
    minibatch: int = 64
    epochs: int = 10
    entropy_coef: float = 0.01
    value_coef: float = 0.5
    max_grad_norm: float = 0.5
    kl_stop: float = 0.15
    total_steps: int = 200_000
    hidden: int = 64
    aux_coef: float = 10.0  # curriculum potential weight; 0 disables
    aux_anneal_steps: int = 0  # 0: constant; >0: linear anneal to zero
    exploring_starts: float = 0.5  # training-only mid-pipeline start probability
    lr_hold_frac: float = 0.0  # hold lr flat this long before the linear anneal
    entropy_scale_max: float = 1.0  # entropy coef multiplier at training start
    entropy_scale_min: float = 1.0  # entropy coef multiplier at training end

    @property
    def batch_size(self) -> int:
        return self.n_envs * self.rollout_len


@dataclass(frozen=True)
class SeedsConfig:
    train: tuple[int, ...] = (0, 1, 2)
    eval_base: int = 10_000
    eval_episodes: int = 200


@dataclass(frozen=True)
class RunConfig:
    schema_version: str = SCHEMA_VERSION
    env: EnvConfig = field(default_factory=EnvConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    gae: GaeConfig = field(default_factory=GaeConfig)
    shaping: ShapingConfig = field(default_factory=ShapingConfig)
    evaluator: EvaluatorConfig = field(default_factory=EvaluatorConfig)
    ppo: PpoConfig = field(default_factory=PpoConfig)
    seeds: SeedsConfig = field(default_factory=SeedsConfig)

    def with_condition(self, condition: str) -> "RunConfig":
        if condition not in CONDITIONS:
            raise ConfigError(f"noise.condition: unknown condition {condition!r}")
        return dataclasses.replace(
            self, noise=dataclasses.replace(self.noise, condition=condition)
        )

    def with_shaping(self, enabled: bool) -> "RunConfig":
        return dataclasses.replace(
            self, shaping=dataclasses.replace(self.shaping, enabled=enabled)
        )


def default_config() -> RunConfig:
    return RunConfig()


# --------------------------------------------------------------------------
# validation


def _check(cond: bool, path: str, msg: str) -> None:
    if not cond:
        raise ConfigError(f"{path}: {msg}")


def validate_config(cfg: RunConfig) -> RunConfig:
    env = cfg.env
    layout = layouts.load_preset(env.layout)  # raises ConfigError on bad preset
    _check(env.horizon > 0, "env.horizon", "must be positive")
    _check(env.cook_time > 0, "env.cook_time", "must be positive")
    _check(len(env.order_arrivals) > 0, "env.order_arrivals", "needs at least one order")
    _check(env.deadline_offset > 0, "env.deadline_offset", "must be positive")
    for i, (a, d) in enumerate(zip(env.order_arrivals, env.order_deadlines)):
        _check(0 <= a, f"env.order_arrivals[{i}]", "arrival must be >= 0")
        _check(a < d, f"env.order_arrivals[{i}]", "arrival must precede deadline")
        _check(
            d <= env.horizon,
            f"env.order_arrivals[{i}]",
            f"deadline {d} exceeds horizon {env.horizon}",
        )
    _check(layout.cells_of_kind(layouts.DELIVERY) != [], "env.layout", "needs a delivery window")

    noise = cfg.noise
    _check(noise.condition in CONDITIONS, "noise.condition", f"must be one of {CONDITIONS}")
    _check(
        0.0 <= noise.visibility_mask_prob <= 1.0,
        "noise.visibility_mask_prob",
        "must lie in [0, 1]",
    )
    _check(noise.scalar_jitter >= 0.0, "noise.scalar_jitter", "must be >= 0")
    _check(noise.timing_jitter >= 0, "noise.timing_jitter", "must be >= 0")

    gae = cfg.gae
    _check(0.0 < gae.gamma <= 1.0, "gae.gamma", "must lie in (0, 1]")
    _check(0.0 <= gae.lambda_gae <= 1.0, "gae.lambda_gae", "must lie in [0, 1]")

    shp = cfg.shaping
    _check(shp.lambda_bonus >= 0.0, "shaping.lambda_bonus", "must be >= 0")
    _check(shp.query_stride >= 1, "shaping.query_stride", "must be >= 1")

    ev = cfg.evaluator
    _check(ev.kind in EVALUATOR_KINDS, "evaluator.kind", f"must be one of {EVALUATOR_KINDS}")
    _check(ev.timeout_ms > 0.0, "evaluator.timeout_ms", "must be positive")

    ppo = cfg.ppo
    _check(ppo.learning_rate > 0.0, "ppo.learning_rate", "must be positive")
    _check(ppo.clip_eps > 0.0, "ppo.clip_eps", "must be positive")
    _check(ppo.n_envs >= 1, "ppo.n_envs", "must be >= 1")
    _check(ppo.rollout_len >= 1, "ppo.rollout_len", "must be >= 1")
    _check(ppo.minibatch >= 1, "ppo.minibatch", "must be >= 1")
    _check(
        ppo.batch_size % ppo.minibatch == 0,
        "ppo.minibatch",
        f"batch size {ppo.batch_size} must be divisible by minibatch",
    )
    _check(ppo.epochs >= 1, "ppo.epochs", "must be >= 1")
    _check(ppo.entropy_coef >= 0.0, "ppo.entropy_coef", "must be >= 0")
    _check(ppo.value_coef >= 0.0, "ppo.value_coef", "must be >= 0")
    _check(ppo.max_grad_norm > 0.0, "ppo.max_grad_norm", "must be positive")
    _check(ppo.kl_stop > 0.0, "ppo.kl_stop", "must be positive")
    _check(ppo.total_steps >= 1, "ppo.total_steps", "must be >= 1")
    _check(ppo.hidden >= 1, "ppo.hidden", "must be >= 1")
    _check(ppo.aux_coef >= 0.0, "ppo.aux_coef", "must be >= 0")
    _check(ppo.aux_anneal_steps >= 0, "ppo.aux_anneal_steps", "must be >= 0")
    _check(
        0.0 <= ppo.exploring_starts <= 1.0, "ppo.exploring_starts", "must be in [0, 1]"
    )
    _check(0.0 <= ppo.lr_hold_frac < 1.0, "ppo.lr_hold_frac", "must be in [0, 1)")
    _check(ppo.entropy_scale_max >= 0.0, "ppo.entropy_scale_max", "must be >= 0")
    _check(ppo.entropy_scale_min >= 0.0, "ppo.entropy_scale_min", "must be >= 0")

    seeds = cfg.seeds
    _check(len(seeds.train) >= 1, "seeds.train", "needs at least one seed")
    _check(seeds.eval_episodes >= 1, "seeds.eval_episodes", "must be >= 1")
    return cfg


# --------------------------------------------------------------------------
# TOML parsing


def _take(table: dict, path: str, allowed: dict[str, type | tuple[type, ...]]) -> dict:
    """Pop known keys with type checks; reject anything left over."""
    out = {}
    for key, types in allowed.items():
        if key in table:
            val = table.pop(key)
            bad_bool = isinstance(val, bool) and types is not bool
            if bad_bool or not isinstance(val, types):
                raise ConfigError(f"{path}.{key}: expected {types}, got {type(val).__name__}")
            out[key] = val
    if table:
        stray = sorted(table)[0]
        raise ConfigError(f"{path}.{stray}: unknown key")
    return out


_NUM = (int, float)


def _coerce_float(d: dict, *keys: str) -> None:
    for k in keys:
        if k in d:
            d[k] = float(d[k])


def parse_config(text: str) -> RunConfig:
    """Parse TOML text into a validated RunConfig (defaults fill gaps)."""
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML: {exc}") from exc

    top = dict(raw)
    schema = top.pop("schema_version", SCHEMA_VERSION)
    if str(schema) != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {schema!r}")

    env_t = top.pop("env", {})
    noise_t = top.pop("noise", {})
    gae_t = top.pop("gae", {})
    shaping_t = top.pop("shaping", {})
    eval_t = top.pop("evaluator", {})
    ppo_t = top.pop("ppo", {})
    seeds_t = top.pop("seeds", {})
    if top:
        stray = sorted(top)[0]
        raise ConfigError(f"{stray}: unknown top-level section or key")

    env_kw = _take(
        dict(env_t),
        "env",
        {
            "layout": str,
            "horizon": int,
            "cook_time": int,
            "order_arrivals": list,
            "deadline_offset": int,
            "reward_delivery": _NUM,
            "reward_expiry": _NUM,
        },
    )
    if "order_arrivals" in env_kw:
        arr = env_kw["order_arrivals"]
        if not all(isinstance(a, int) and not isinstance(a, bool) for a in arr):
            raise ConfigError("env.order_arrivals: must be a list of integers")
        env_kw["order_arrivals"] = tuple(arr)
    _coerce_float(env_kw, "reward_delivery", "reward_expiry")

    noise_kw = _take(
        dict(noise_t),
        "noise",
        {
            "condition": str,
            "visibility_mask_prob": _NUM,
            "scalar_jitter": _NUM,
            "timing_jitter": int,
        },
    )
    _coerce_float(noise_kw, "visibility_mask_prob", "scalar_jitter")

    gae_kw = _take(dict(gae_t), "gae", {"gamma": _NUM, "lambda_gae": _NUM})
    _coerce_float(gae_kw, "gamma", "lambda_gae")

    shaping_kw = _take(
        dict(shaping_t),
        "shaping",
        {
            "enabled": bool,
            "lambda_bonus": _NUM,
            "query_stride": int,
            "extended_prompt": bool,
        },
    )
    _coerce_float(shaping_kw, "lambda_bonus")

    eval_kw = _take(
        dict(eval_t),
        "evaluator",
        {"kind": str, "endpoint": str, "timeout_ms": _NUM, "replay_path": str},
    )
    _coerce_float(eval_kw, "timeout_ms")

    ppo_kw = _take(
        dict(ppo_t),
        "ppo",
        {
            "learning_rate": _NUM,
            "clip_eps": _NUM,
            "n_envs": int,
            "rollout_len": int,
            "minibatch": int,
            "epochs": int,
            "entropy_coef": _NUM,
            "value_coef": _NUM,
            "max_grad_norm": _NUM,
            "kl_stop": _NUM,
            "total_steps": int,
            "hidden": int,
            "aux_coef": _NUM,
            "aux_anneal_steps": int,
            "exploring_starts": _NUM,
            "lr_hold_frac": _NUM,
            "entropy_scale_max": _NUM,
            "entropy_scale_min": _NUM,
        },
    )
    _coerce_float(
        ppo_kw,
        "learning_rate",
        "clip_eps",
        "entropy_coef",
        "value_coef",
        "max_grad_norm",
        "kl_stop",
        "aux_coef",
        "exploring_starts",
        "lr_hold_frac",
        "entropy_scale_max",
        "entropy_scale_min",
    )

    seeds_kw = _take(
        dict(seeds_t),
        "seeds",
        {"train": list, "eval_base": int, "eval_episodes": int},
    )
    if "train" in seeds_kw:
        tr = seeds_kw["train"]
        if not all(isinstance(s, int) and not isinstance(s, bool) for s in tr):
            raise ConfigError("seeds.train: must be a list of integers")
        seeds_kw["train"] = tuple(tr)

    cfg = RunConfig(
        schema_version=SCHEMA_VERSION,
        env=EnvConfig(**env_kw),
        noise=NoiseConfig(**noise_kw),
        gae=GaeConfig(**gae_kw),
        shaping=ShapingConfig(**shaping_kw),
        evaluator=EvaluatorConfig(**eval_kw),
        ppo=PpoConfig(**ppo_kw),
        seeds=SeedsConfig(**seeds_kw),
    )

    endpoint_override = os.environ.get(ENDPOINT_ENV_VAR)
    if endpoint_override:
        cfg = dataclasses.replace(
            cfg, evaluator=dataclasses.replace(cfg.evaluator, endpoint=endpoint_override)
        )
    return validate_config(cfg)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    return parse_config(text)


# --------------------------------------------------------------------------
# canonical form and hashing


def config_to_dict(cfg: RunConfig) -> dict:
    return dataclasses.asdict(cfg)


def canonical_json(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))


def config_hash(cfg: RunConfig) -> str:
    """Stable 16-hex-digit digest of the full configuration."""
    return hashlib.sha256(canonical_json(cfg).encode("utf-8")).hexdigest()[:16]
