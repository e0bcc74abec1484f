"""Frozen scoring models behind the logit endpoint.

Two implementations of one small interface:

- ``name`` -- identifier reported in responses,
- ``first_token_id(text)`` -- the first sub-token of ``text`` under the
  model's tokenizer,
- ``next_token_logits(prompt)`` -- one forward pass, the full next-token
  logit vector as float64.

``TinyDetModel`` is the built-in default: a byte-level recurrent scorer
with weights drawn once from a fixed seed.  It is frozen, deterministic,
finite by construction (tanh-bounded state), and needs nothing but numpy,
so the wire contract can be exercised on machines with no model downloads.
Any other model id is loaded as a causal LM through ``transformers`` in
inference mode.
"""

from __future__ import annotations

import numpy as np

TINY_MODEL_NAME = "tiny-det"

_VOCAB = 256  # byte-level: token ids are UTF-8 byte values
_DIM = 32
_SEED = 20240814


class ModelLoadError(RuntimeError):
    """The configured model could not be constructed."""


class TinyDetModel:
    """Deterministic byte-level next-token scorer with frozen random weights."""

    name = TINY_MODEL_NAME

    def __init__(self) -> None:
        rng = np.random.default_rng(_SEED)
        self._embed = rng.normal(0.0, 0.4, (_VOCAB, _DIM))
        self._mix = rng.normal(0.0, 0.4, (_DIM, _DIM))
        self._bias = rng.normal(0.0, 0.1, _DIM)
        self._unembed = rng.normal(0.0, 1.0, (_DIM, _VOCAB))

    def first_token_id(self, text: str) -> int:
        data = text.encode("utf-8")
        if not data:
            raise ValueError("cannot tokenize an empty candidate")
        return data[0]

    def next_token_logits(self, prompt: str) -> np.ndarray:
        h = np.zeros(_DIM)
        for byte in prompt.encode("utf-8"):
            h = np.tanh(h @ self._mix + self._embed[byte] + self._bias)
        return h @ self._unembed


class HFCausalLM:
    """A frozen causal LM from transformers, scored at its last position.

    Loaded in eval mode with gradients disabled; sampling never happens
    because only the logit vector is read.  Multi-sub-token candidates are
    scored by their first sub-token, matching the wire contract.
    """

    def __init__(self, model_id: str):
        try:
            import torch
            from transformers import AutoModelForCausalLM, AutoTokenizer
        except ImportError as exc:  # pragma: no cover - env without hf extra
            raise ModelLoadError(
                f"model {model_id!r} needs the [hf] extra (transformers + torch): {exc}"
            ) from exc
        try:
            self._tokenizer = AutoTokenizer.from_pretrained(model_id)
            self._model = AutoModelForCausalLM.from_pretrained(model_id)
        except Exception as exc:
            raise ModelLoadError(f"cannot load model {model_id!r}: {exc}") from exc
        self._model.eval()
        self._torch = torch
        self.name = model_id

    def first_token_id(self, text: str) -> int:
        ids = self._tokenizer(text, add_special_tokens=False)["input_ids"]
        if not ids:
            raise ValueError(f"candidate {text!r} tokenizes to nothing")
        return int(ids[0])

    def next_token_logits(self, prompt: str) -> np.ndarray:
        with self._torch.no_grad():
            encoded = self._tokenizer(prompt, return_tensors="pt")
            out = self._model(**encoded)
        return out.logits[0, -1, :].double().cpu().numpy()


def load_model(model_id: str):
    """Build the configured model; tiny-det is embedded, the rest is HF."""
    if model_id == TINY_MODEL_NAME:
        return TinyDetModel()
    return HFCausalLM(model_id)
