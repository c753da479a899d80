"""Actor backends: remote endpoint, tabular policy, scripted replay.

A backend produces the raw text for the next action given the instruction
and interaction history. Exactly one backend kind is active per run.
Hermetic backends (tabular, scripted) are pure functions of
(seed, instruction, sample index, history).
"""

from __future__ import annotations

import hashlib

from .remote import ChatCompletionsClient, EndpointConfig


def derive_seed(*parts) -> int:
    """Stable cross-platform 64-bit seed from arbitrary labeled parts."""
    text = "|".join(str(p) for p in parts)
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:8], "big")


class ScriptedBackend:
    """Replays fixed action text per instruction; emits FINISH when exhausted.

    ``scripts`` maps instruction id -> list of raw action strings. A mapping
    of (instruction id, sample index) -> list takes precedence when present,
    letting tests vary behaviour per sample.
    """

    kind = "scripted"
    needs_prompt = False
    parallel_safe = False

    def __init__(self, scripts: dict):
        self.scripts = dict(scripts)

    def generate(self, prompt, *, instruction, history, sample_index, rng,
                 temperature) -> str:
        script = self.scripts.get((instruction.id, sample_index))
        if script is None:
            script = self.scripts.get(instruction.id, [])
        step = len(history)
        if step < len(script):
            return script[step]
        return "FINISH"


class TabularPolicyBackend:
    """Samples actions from a tabular-softmax policy through the grammar."""

    kind = "tabular_policy"
    needs_prompt = False
    parallel_safe = False

    def __init__(self, model, temperature: float = 0.7):
        if temperature < 0:
            raise ValueError("temperature must be >= 0")
        self.model = model
        self.temperature = temperature

    def generate(self, prompt, *, instruction, history, sample_index, rng,
                 temperature) -> str:
        from ..trainer.policy import policy_act

        temp = self.temperature if temperature is None else temperature
        return policy_act(self.model, instruction, history, temp, rng)


class RemoteBackend:
    """Chat-completions endpoint acting over rendered prompts."""

    kind = "remote_endpoint"
    needs_prompt = True
    parallel_safe = True

    def __init__(self, endpoint: EndpointConfig, client: ChatCompletionsClient | None = None):
        self.endpoint = endpoint
        self.client = client or ChatCompletionsClient(endpoint)

    @property
    def max_in_flight(self) -> int:
        return self.endpoint.max_in_flight

    def generate(self, prompt, *, instruction, history, sample_index, rng,
                 temperature) -> str:
        messages = [{"role": "user", "content": prompt}]
        return self.client.complete(messages, temperature=temperature)
