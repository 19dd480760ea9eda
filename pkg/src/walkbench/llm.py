"""Chat-completions backend over HTTP."""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass, field

import httpx

from .agent import AssistantTurn, BackendError
from .tools import ToolCall

log = logging.getLogger(__name__)

BASE_URL_ENV = "WALKBENCH_BASE_URL"
API_KEY_ENV = "WALKBENCH_API_KEY"
MODEL_ENV = "WALKBENCH_MODEL"


@dataclass(frozen=True)
class EndpointConfig:
    base_url: str = "https://api.openai.com/v1"
    api_key: str = ""
    model: str = "gpt-4.1-mini"
    temperature: float = 0.0
    timeout: float = 120.0
    max_attempts: int = 3
    backoff: float = 1.0

    @classmethod
    def from_env(cls, **overrides) -> "EndpointConfig":
        """Environment values fill anything not given explicitly."""
        env = {
            "base_url": os.environ.get(BASE_URL_ENV) or os.environ.get("OPENAI_BASE_URL"),
            "api_key": os.environ.get(API_KEY_ENV) or os.environ.get("OPENAI_API_KEY"),
            "model": os.environ.get(MODEL_ENV),
        }
        values = {k: v for k, v in env.items() if v}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


def _is_transient(status: int) -> bool:
    return status == 429 or status >= 500


@dataclass
class LLMBackend:
    config: EndpointConfig
    client: httpx.Client | None = None
    usage: list[dict] = field(default_factory=list)

    def __post_init__(self):
        self.name = self.config.model
        if self.client is None:
            self.client = httpx.Client(timeout=self.config.timeout)

    @property
    def url(self) -> str:
        return self.config.base_url.rstrip("/") + "/chat/completions"

    def _post(self, payload: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.config.api_key:
            headers["Authorization"] = f"Bearer {self.config.api_key}"
        last = "no attempt made"
        for attempt in range(self.config.max_attempts):
            if attempt:
                time.sleep(self.config.backoff * 2 ** (attempt - 1))
            try:
                resp = self.client.post(self.url, json=payload, headers=headers)
            except httpx.TransportError as exc:  # includes timeouts
                last = f"{type(exc).__name__}: {exc}"
                log.warning("attempt %d failed: %s", attempt + 1, last)
                continue
            if _is_transient(resp.status_code):
                last = f"HTTP {resp.status_code}"
                log.warning("attempt %d failed: %s", attempt + 1, last)
                continue
            if resp.status_code >= 400:
                raise BackendError(f"HTTP {resp.status_code}: {resp.text[:300]}")
            try:
                return resp.json()
            except json.JSONDecodeError as exc:
                raise BackendError(f"response is not JSON: {exc}") from None
        raise BackendError(f"giving up after {self.config.max_attempts} attempts ({last})")

    def respond(self, messages: list[dict], tools: list[dict]) -> AssistantTurn:
        payload = {"model": self.config.model, "messages": messages, "temperature": self.config.temperature}
        if tools:
            payload["tools"] = tools
        data = self._post(payload)
        try:
            message = data["choices"][0]["message"]
        except (KeyError, IndexError, TypeError):
            raise BackendError("response has no choices[0].message") from None
        usage = data.get("usage")
        if usage:
            self.usage.append(usage)
        calls = []
        for i, tc in enumerate(message.get("tool_calls") or []):
            fn = tc.get("function") or {}
            # arguments stay a raw string; the registry reports malformed JSON back to the model
            calls.append(ToolCall(tc.get("id") or f"call_{i}", fn.get("name", ""), fn.get("arguments", "")))
        return AssistantTurn(message.get("content"), calls, usage)

    def close(self) -> None:
        self.client.close()


def llm_extractor(config: EndpointConfig):
    """Build an answer-extraction callback backed by a chat model."""
    backend = LLMBackend(config)

    def extract(text: str, output_schema: str) -> str:
        messages = [
            {
                "role": "system",
                "content": "Extract the final answer from the user's text as JSON matching this schema: "
                f"{output_schema}. Reply with the JSON only. Reply with [] if there is no answer.",
            },
            {"role": "user", "content": text},
        ]
        return backend.respond(messages, []).content or ""

    return extract
