"""Network init, softmax numerics, grad-norm utilities, Adam."""

import numpy as np
import pytest

from burger_kitchen.env import N_ACTIONS
from burger_kitchen.errors import NumericFault
from burger_kitchen.nets import (
    HIDDEN_GAIN,
    PARAM_KEYS,
    Adam,
    assert_finite,
    clip_grads,
    global_grad_norm,
    init_policy,
    log_softmax,
    policy_logits,
    softmax,
    value_forward,
)


def test_init_is_deterministic_per_seed():
    a = init_policy(7, obs_dim=20, hidden=8)
    b = init_policy(7, obs_dim=20, hidden=8)
    c = init_policy(8, obs_dim=20, hidden=8)
    for k in PARAM_KEYS:
        np.testing.assert_array_equal(a.arrays[k], b.arrays[k])
    assert any(not np.array_equal(a.arrays[k], c.arrays[k]) for k in PARAM_KEYS)


def test_init_shapes_and_dtype():
    p = init_policy(0, obs_dim=20, hidden=8)
    assert set(p.arrays) == set(PARAM_KEYS)
    assert p.arrays["p.W0"].shape == (20, 8)
    assert p.arrays["p.W2"].shape == (8, N_ACTIONS)
    assert p.arrays["v.W2"].shape == (8, 1)
    assert all(arr.dtype == np.float32 for arr in p.arrays.values())
    assert init_policy(0, obs_dim=20, hidden=8, dtype=np.float64).dtype == np.float64


def test_init_orthogonal_columns_and_zero_biases():
    p = init_policy(3, obs_dim=40, hidden=8, dtype=np.float64)
    w = p.arrays["p.W0"]  # tall: columns should be orthogonal, norm = gain
    gram = w.T @ w
    np.testing.assert_allclose(gram, HIDDEN_GAIN**2 * np.eye(8), atol=1e-10)
    for k in PARAM_KEYS:
        if ".b" in k:
            np.testing.assert_array_equal(p.arrays[k], 0.0)


def test_init_rejects_bad_obs_dim():
    with pytest.raises(ValueError):
        init_policy(0, obs_dim=0)


def test_forward_shapes():
    p = init_policy(1, obs_dim=12, hidden=8)
    obs = np.random.default_rng(0).normal(size=(5, 12)).astype(np.float32)
    logits, _ = policy_logits(p, obs)
    values, _ = value_forward(p, obs)
    assert logits.shape == (5, N_ACTIONS)
    assert values.shape == (5,)


def test_log_softmax_matches_naive_oracle_and_is_stable():
    rng = np.random.default_rng(9)
    z = rng.normal(size=(16, 6))
    naive = np.log(np.exp(z) / np.exp(z).sum(axis=-1, keepdims=True))
    np.testing.assert_allclose(log_softmax(z), naive, atol=1e-12)
    big = z + 1e4  # shift invariance where the naive form overflows
    np.testing.assert_allclose(log_softmax(big), log_softmax(z), atol=1e-9)
    assert np.all(np.isfinite(log_softmax(big)))


def test_softmax_rows_are_distributions():
    z = np.random.default_rng(2).normal(size=(8, 6)) * 10
    p = softmax(z)
    assert np.all(p >= 0)
    np.testing.assert_allclose(p.sum(axis=-1), 1.0, atol=1e-12)


def test_grad_norm_matches_concatenated_vector_norm():
    rng = np.random.default_rng(4)
    grads = {"a": rng.normal(size=(3, 4)), "b": rng.normal(size=7)}
    flat = np.concatenate([grads["a"].ravel(), grads["b"].ravel()])
    assert global_grad_norm(grads) == pytest.approx(np.linalg.norm(flat), rel=1e-12)


def test_clip_rescales_to_max_norm():
    grads = {"a": np.array([3.0, 4.0])}  # norm 5
    clipped, norm = clip_grads(grads, 0.5)
    assert norm == pytest.approx(5.0)
    assert global_grad_norm(clipped) == pytest.approx(0.5)
    np.testing.assert_allclose(clipped["a"], [0.3, 0.4])


def test_clip_below_threshold_is_identity():
    grads = {"a": np.array([0.3, 0.4])}
    clipped, norm = clip_grads(grads, 0.5)
    assert norm == pytest.approx(0.5)
    assert clipped["a"] is grads["a"]
    zero, znorm = clip_grads({"a": np.zeros(2)}, 0.5)
    assert znorm == 0.0
    np.testing.assert_array_equal(zero["a"], 0.0)


def test_adam_first_step_matches_closed_form():
    p = init_policy(0, obs_dim=4, hidden=8, dtype=np.float64)
    before = p.copy()
    g = {k: np.full_like(v, 0.25) for k, v in p.arrays.items()}
    opt = Adam(lr=1e-3)
    opt.step(p, g)
    # bias correction makes step 1 exactly lr * g / (|g| + eps)
    want = 1e-3 * 0.25 / (0.25 + 1e-8)
    for k in PARAM_KEYS:
        np.testing.assert_allclose(before.arrays[k] - p.arrays[k], want, atol=1e-12)
    assert opt.t == 1


def test_adam_reads_mutated_lr_each_step():
    p = init_policy(0, obs_dim=4, hidden=8, dtype=np.float64)
    g = {k: np.ones_like(v) for k, v in p.arrays.items()}
    opt = Adam(lr=1e-3)
    opt.step(p, g)
    snap = p.copy()
    opt.lr = 0.0  # schedules mutate lr in place between updates
    opt.step(p, g)
    for k in PARAM_KEYS:
        np.testing.assert_array_equal(p.arrays[k], snap.arrays[k])


def test_assert_finite_raises_numeric_fault():
    assert_finite("ok", np.ones(3))
    with pytest.raises(NumericFault):
        assert_finite("bad", np.array([1.0, np.nan]))
    with pytest.raises(NumericFault):
        assert_finite("bad", np.array([np.inf]))
