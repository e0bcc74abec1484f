import threading

import pytest

from llm_logit_server.app import make_server
from llm_logit_server.model import TinyDetModel


def _serve(model):
    server = make_server("127.0.0.1", 0, model)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    host, port = server.server_address[:2]
    return server, f"http://{host}:{port}"


@pytest.fixture(scope="session")
def tiny_model():
    return TinyDetModel()


@pytest.fixture(scope="session")
def live_server(tiny_model):
    server, url = _serve(tiny_model)
    yield url
    server.shutdown()
    server.server_close()


@pytest.fixture()
def unloaded_server():
    server, url = _serve(None)
    yield url
    server.shutdown()
    server.server_close()
