"""Wire-level loop-back: the upstream pipeline's remote actor backend talks
to this adapter's served checkpoint over real HTTP.

The adapter package itself never imports pipeline code; this test exercises
the external interface between the two installed packages.
"""

import threading
import time

import pytest

evoloop_actor = pytest.importorskip("evoloop.actor",
                                    reason="pipeline package not installed")
uvicorn = pytest.importorskip("uvicorn")
pytest.importorskip("fastapi")

from evoloop.actor.remote import ChatCompletionsClient, EndpointConfig  # noqa: E402

from sft_adapter.convert import convert  # noqa: E402
from sft_adapter.serve import create_app  # noqa: E402
from sft_adapter.train import FinetuneConfig, finetune  # noqa: E402


@pytest.fixture(scope="module")
def live_server(fixture_export, tmp_path_factory, free_tcp_port_factory):
    examples, vocab, _ = convert(fixture_export)
    out = tmp_path_factory.mktemp("integration") / "ckpt"
    checkpoint, _ = finetune(examples, vocab,
                             FinetuneConfig(epochs=1, batch_size=8), out)
    port = free_tcp_port_factory()
    config = uvicorn.Config(create_app(str(checkpoint)), host="127.0.0.1",
                            port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            pytest.fail("server did not start")
        time.sleep(0.05)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)


def test_pipeline_remote_backend_reads_served_model(live_server):
    endpoint = EndpointConfig(base_url=live_server, model="sft-adapter",
                              temperature=0.0, timeout_s=10.0)
    client = ChatCompletionsClient(endpoint)
    content = client.complete(
        [{"role": "user", "content": "TASK: Compute the value of 2+3*4"}],
        temperature=0.0)
    assert isinstance(content, str) and content
