"""The embedded deterministic model: frozen, finite, byte-tokenized."""

import numpy as np
import pytest

from llm_logit_server.model import ModelLoadError, TinyDetModel, load_model


def test_two_instances_agree_bitwise(tiny_model):
    other = TinyDetModel()
    for prompt in ("orders:2 t:25/400", "orders:0 t:1/400", "x"):
        np.testing.assert_array_equal(
            tiny_model.next_token_logits(prompt), other.next_token_logits(prompt)
        )


def test_repeated_calls_agree_bitwise(tiny_model):
    a = tiny_model.next_token_logits("orders:3 t:77/400")
    b = tiny_model.next_token_logits("orders:3 t:77/400")
    np.testing.assert_array_equal(a, b)


def test_logit_vector_shape_and_finiteness(tiny_model):
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 40))
        prompt = "".join(chr(int(c)) for c in rng.integers(32, 127, n))
        logits = tiny_model.next_token_logits(prompt)
        assert logits.shape == (256,)
        assert logits.dtype == np.float64
        assert np.all(np.isfinite(logits))


def test_distinct_prompts_score_differently(tiny_model):
    a = tiny_model.next_token_logits("orders:2 t:25/400")
    b = tiny_model.next_token_logits("orders:3 t:25/400")
    assert not np.array_equal(a, b)


def test_byte_order_matters(tiny_model):
    # recurrent over the prompt, so it is not a bag of bytes
    assert not np.array_equal(
        tiny_model.next_token_logits("ab"), tiny_model.next_token_logits("ba")
    )


def test_first_token_is_first_utf8_byte(tiny_model):
    assert tiny_model.first_token_id("good") == ord("g")
    assert tiny_model.first_token_id("bad") == ord("b")
    # multi-sub-token candidates score by their first sub-token
    assert tiny_model.first_token_id("goodness") == tiny_model.first_token_id("good")


def test_empty_candidate_rejected(tiny_model):
    with pytest.raises(ValueError):
        tiny_model.first_token_id("")


def test_load_model_dispatches_tiny():
    model = load_model("tiny-det")
    assert isinstance(model, TinyDetModel)
    assert model.name == "tiny-det"


def test_load_model_wraps_unloadable_ids(monkeypatch):
    monkeypatch.setenv("HF_HUB_OFFLINE", "1")
    monkeypatch.setenv("TRANSFORMERS_OFFLINE", "1")
    with pytest.raises(ModelLoadError):
        load_model("no-such-org/no-such-model")
