"""HTTP shim serving candidate-token logits from a frozen causal LM.

One endpoint does the work: POST /v1/logits with
{"prompt": str, "candidates": [str, ...]} returns the next-token logit of
each candidate's first sub-token, in request order, from a single forward
pass on the prompt.  GET /healthz reports whether a model is loaded.
Responses are deterministic for a fixed loaded model; the server holds no
state between requests.
"""

from .app import AppState, make_server, score_request
from .model import ModelLoadError, TinyDetModel, load_model

__all__ = [
    "AppState",
    "ModelLoadError",
    "TinyDetModel",
    "load_model",
    "make_server",
    "score_request",
]
