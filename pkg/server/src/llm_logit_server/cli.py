"""Command line entry point."""

from __future__ import annotations

import argparse
import sys

from .app import make_server
from .model import TINY_MODEL_NAME, ModelLoadError, load_model


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="llm-logit-server",
        description="Serve candidate-token logits from a frozen causal LM.",
    )
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8777)
    parser.add_argument(
        "--model",
        default=TINY_MODEL_NAME,
        help=f"model id; '{TINY_MODEL_NAME}' is the embedded deterministic scorer",
    )
    args = parser.parse_args(argv)

    try:
        model = load_model(args.model)
    except ModelLoadError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    server = make_server(args.host, args.port, model)
    host, port = server.server_address[:2]
    print(f"serving model {model.name!r} on http://{host}:{port}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()
        server.server_close()
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
