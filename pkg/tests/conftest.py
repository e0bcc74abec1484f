import dataclasses

import pytest
from hypothesis import HealthCheck, settings

import burger_kitchen as bk

settings.register_profile(
    "ci",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def default_config() -> bk.RunConfig:
    return bk.RunConfig()


@pytest.fixture(scope="session")
def toy_config() -> bk.RunConfig:
    """4x4 layout, short horizon, two orders: fast episodes for unit tests."""
    base = bk.RunConfig()
    return dataclasses.replace(
        base,
        env=dataclasses.replace(
            base.env,
            layout="toy_4x4",
            horizon=60,
            cook_time=3,
            order_arrivals=(5, 10),
            deadline_offset=40,
        ),
    )


@pytest.fixture(scope="session")
def tiny_ppo_config(toy_config) -> bk.RunConfig:
    return dataclasses.replace(
        toy_config,
        ppo=dataclasses.replace(
            toy_config.ppo,
            n_envs=2,
            rollout_len=32,
            minibatch=16,
            epochs=2,
            total_steps=128,
            hidden=16,
            aux_anneal_steps=1000,
        ),
    )
