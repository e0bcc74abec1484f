"""Two-agent cooperative kitchen gridworld with verdict-gated reward shaping.

A frozen evaluator scores a one-line state summary each step; when it
rates "good" above "bad" the agents receive a small shaping bonus on top
of the sparse team reward.  Training is PPO with GAE implemented directly
on numpy arrays; evaluation sweeps structured observation/timing noise.
"""

from .advantage import compute_gae, discounted_returns, gae_advantages, shape_reward, td_errors
from .config import (
    CONDITIONS,
    EnvConfig,
    EvaluatorConfig,
    GaeConfig,
    NoiseConfig,
    PpoConfig,
    RunConfig,
    SeedsConfig,
    ShapingConfig,
    load_config,
    parse_config,
)
from .env import Action, GridState, StepOutcome, is_terminal, pending_orders, reset, step
from .errors import (
    BurgerKitchenError,
    CheckpointError,
    ConfigError,
    ContractError,
    MalformedPromptError,
    NumericFault,
    ProtocolError,
)
from .evaluator import (
    EvaluatorVerdict,
    HeuristicEvaluator,
    RemoteEvaluator,
    ReplayEvaluator,
    make_evaluator,
    shaping_signal,
)
from .harness import (
    EpisodeRecord,
    LearnedPolicy,
    bench_latency,
    completion_rate,
    deviation_probe,
    evaluate_suite,
    latency_stats,
    run_episode,
)
from .layouts import Layout, load_preset, parse_layout
from .nets import Adam, PolicyParams, init_policy, policy_logits, value_forward
from .observe import encode, obs_dim
from .ppo import act, act_batch, ppo_update
from .prompts import TaskContext, parse_prompt, render_prompt, render_prompt_extended
from .trainer import TrainResult, train_pair

__version__ = "0.1.0"

__all__ = [
    "Action",
    "Adam",
    "BurgerKitchenError",
    "CheckpointError",
    "CONDITIONS",
    "ConfigError",
    "ContractError",
    "EnvConfig",
    "EpisodeRecord",
    "EvaluatorConfig",
    "EvaluatorVerdict",
    "GaeConfig",
    "GridState",
    "HeuristicEvaluator",
    "Layout",
    "LearnedPolicy",
    "MalformedPromptError",
    "NoiseConfig",
    "NumericFault",
    "PolicyParams",
    "PpoConfig",
    "ProtocolError",
    "RemoteEvaluator",
    "ReplayEvaluator",
    "RunConfig",
    "SeedsConfig",
    "ShapingConfig",
    "StepOutcome",
    "TaskContext",
    "TrainResult",
    "act",
    "act_batch",
    "bench_latency",
    "completion_rate",
    "compute_gae",
    "deviation_probe",
    "discounted_returns",
    "encode",
    "evaluate_suite",
    "gae_advantages",
    "load_preset",
    "init_policy",
    "is_terminal",
    "latency_stats",
    "load_config",
    "make_evaluator",
    "obs_dim",
    "parse_config",
    "parse_layout",
    "parse_prompt",
    "pending_orders",
    "policy_logits",
    "ppo_update",
    "render_prompt",
    "render_prompt_extended",
    "reset",
    "run_episode",
    "shape_reward",
    "shaping_signal",
    "step",
    "td_errors",
    "train_pair",
    "value_forward",
    "__version__",
]
