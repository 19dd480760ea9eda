"""Act-observe episode loop, transcripts, and the replay backend."""

from __future__ import annotations

import json
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Protocol

from .tools import ToolCall, ToolRegistry

COMPLETED = "completed"
ITERATION_CAP = "iteration-cap"
BACKEND_ERROR = "backend-error"
DEFAULT_SYSTEM_TIME = "2025-01-01 00:00:00"


class BackendError(Exception):
    """Transport or protocol failure that ends the episode."""


@dataclass(frozen=True)
class RunConfig:
    with_tools: bool = True
    max_iterations: int = 30
    system_time: str = DEFAULT_SYSTEM_TIME
    temperature: float = 0.0
    workers: int = 4

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass
class AssistantTurn:
    content: str | None = None
    tool_calls: list[ToolCall] = field(default_factory=list)
    usage: dict | None = None


class AgentBackend(Protocol):
    name: str

    def respond(self, messages: list[dict], tools: list[dict]) -> AssistantTurn: ...


@dataclass
class Transcript:
    """Ordered event log of one episode.

    ``meta`` carries whatever the caller needs to score the episode later
    (instance, gold answer, maze state); the loop itself never reads it.
    """

    episode_id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])
    model: str = ""
    with_tools: bool = True
    meta: dict = field(default_factory=dict)
    events: list[dict] = field(default_factory=list)
    status: str = "running"
    final_answer: str | None = None

    def add(self, kind: str, **data) -> dict:
        event = {"seq": len(self.events), "type": kind, **data}
        self.events.append(event)
        return event

    def of_type(self, kind: str) -> list[dict]:
        return [e for e in self.events if e["type"] == kind]

    @property
    def tool_calls(self) -> int:
        return len(self.of_type("tool_call"))

    @property
    def turns(self) -> int:
        return len(self.of_type("assistant"))

    @property
    def inference_time(self) -> float:
        return sum(e.get("elapsed_s", 0.0) for e in self.of_type("assistant"))

    def tool_results(self) -> list[tuple[str, str, bool]]:
        return [(e["name"], e["content"], e["is_error"]) for e in self.of_type("tool_result")]

    def to_jsonl(self) -> str:
        header = {
            "type": "episode",
            "episode_id": self.episode_id,
            "model": self.model,
            "with_tools": self.with_tools,
            "meta": self.meta,
        }
        footer = {"type": "end", "status": self.status, "final_answer": self.final_answer}
        lines = [header, *self.events, footer]
        return "\n".join(json.dumps(x, sort_keys=True, ensure_ascii=False) for x in lines) + "\n"

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_jsonl(), encoding="utf-8")
        return path

    @classmethod
    def from_jsonl(cls, text: str) -> "Transcript":
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not rows or rows[0].get("type") != "episode":
            raise ValueError("transcript must start with an episode header")
        head = rows[0]
        t = cls(head["episode_id"], head.get("model", ""), head.get("with_tools", True), head.get("meta", {}))
        for row in rows[1:]:
            if row["type"] == "end":
                t.status, t.final_answer = row["status"], row.get("final_answer")
            else:
                t.events.append(row)
        return t

    @classmethod
    def read(cls, path) -> "Transcript":
        return cls.from_jsonl(Path(path).read_text(encoding="utf-8"))


def _wire_call(call: ToolCall) -> dict:
    args = call.arguments if isinstance(call.arguments, str) else json.dumps(call.arguments)
    return {"id": call.call_id, "type": "function", "function": {"name": call.name, "arguments": args}}


def run_episode(
    backend: AgentBackend,
    registry: ToolRegistry | None,
    question: str,
    config: RunConfig,
    system_prompt: str,
    meta: dict | None = None,
) -> Transcript:
    """Drive one act-observe episode until a text answer, the turn cap, or a backend failure."""
    if config.with_tools != (registry is not None):
        raise ValueError("with_tools must be set exactly when a tool registry is given")
    t = Transcript(model=getattr(backend, "name", type(backend).__name__), with_tools=config.with_tools, meta=meta or {})
    messages = [{"role": "system", "content": system_prompt}, {"role": "user", "content": question}]
    t.add("system", content=system_prompt)
    t.add("user", content=question)
    tools = registry.payload() if registry is not None else []

    for _ in range(config.max_iterations):
        started = time.perf_counter()
        try:
            turn = backend.respond(messages, tools)
        except BackendError as exc:
            t.add("error", message=str(exc), elapsed_s=time.perf_counter() - started)
            t.status = BACKEND_ERROR
            return t
        elapsed = time.perf_counter() - started
        calls = turn.tool_calls if registry is not None else []
        t.add(
            "assistant",
            content=turn.content,
            tool_calls=[_wire_call(c) for c in calls],
            usage=turn.usage,
            elapsed_s=elapsed,
        )
        if not calls:
            t.final_answer = turn.content or ""
            t.add("final_answer", content=t.final_answer)
            t.status = COMPLETED
            return t

        messages.append({"role": "assistant", "content": turn.content, "tool_calls": [_wire_call(c) for c in calls]})
        for call in calls:
            t.add("tool_call", call_id=call.call_id, name=call.name, arguments=call.arguments)
            result = registry.dispatch(call)
            t.add(
                "tool_result", call_id=call.call_id, name=call.name, content=result.content, is_error=result.is_error,
                chars=len(result.content),
            )
            messages.append({"role": "tool", "tool_call_id": call.call_id, "content": result.content})

    t.status = ITERATION_CAP
    return t


class ReplayBackend:
    """Re-issues the assistant turns of a recorded transcript in order."""

    def __init__(self, transcript: Transcript) -> None:
        self.name = transcript.model
        self._turns = []
        for e in transcript.of_type("assistant"):
            calls = [
                ToolCall(c["id"], c["function"]["name"], c["function"]["arguments"]) for c in e.get("tool_calls", [])
            ]
            self._turns.append(AssistantTurn(e.get("content"), calls, e.get("usage")))
        self._next = 0

    def respond(self, messages, tools) -> AssistantTurn:
        if self._next >= len(self._turns):
            raise BackendError("replay exhausted: the recording has no further turns")
        turn = self._turns[self._next]
        self._next += 1
        return turn


def run_parallel(jobs: Iterable[Callable[[], Transcript]], workers: int) -> list[Transcript]:
    """Run independent episode thunks on a bounded pool; results keep job order."""
    jobs = list(jobs)
    if workers <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: job(), jobs))
