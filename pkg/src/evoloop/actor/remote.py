"""Minimal chat-completions HTTP client with bounded retries.

Speaks the de-facto wire protocol: POST ``<base>/chat/completions`` with
``{model, messages, temperature}``; reads the first choice's message
content. Auth is a bearer token read from an environment variable named in
the endpoint config, never from config files.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

import requests

from ..errors import BackendError, ConfigError

MAX_ATTEMPTS = 3
BACKOFF_INITIAL_S = 0.5


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str
    model: str
    temperature: float = 0.7
    timeout_s: float = 30.0
    auth_env: str = ""
    max_in_flight: int = 4

    def __post_init__(self):
        if self.temperature < 0:
            raise ConfigError("temperature must be >= 0")
        if self.timeout_s <= 0:
            raise ConfigError("timeout must be > 0")
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight must be >= 1")


class ChatCompletionsClient:
    """Blocking client; safe to share across threads (requests.Session is)."""

    def __init__(self, config: EndpointConfig, session: requests.Session | None = None,
                 sleep=time.sleep):
        self.config = config
        self._session = session or requests.Session()
        self._sleep = sleep

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_env:
            token = os.environ.get(self.config.auth_env)
            if not token:
                raise ConfigError(
                    f"auth environment variable '{self.config.auth_env}' is not set")
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def complete(self, messages: list[dict], temperature: float | None = None) -> str:
        url = self.config.base_url.rstrip("/") + "/chat/completions"
        body = {
            "model": self.config.model,
            "messages": messages,
            "temperature": self.config.temperature if temperature is None else temperature,
        }
        last_error = None
        for attempt in range(MAX_ATTEMPTS):
            if attempt:
                self._sleep(BACKOFF_INITIAL_S * 2 ** (attempt - 1))
            try:
                response = self._session.post(url, json=body, headers=self._headers(),
                                              timeout=self.config.timeout_s)
                response.raise_for_status()
                payload = response.json()
                return payload["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last_error = exc
        raise BackendError(f"chat-completions request failed after {MAX_ATTEMPTS} attempts: "
                           f"{last_error}")
