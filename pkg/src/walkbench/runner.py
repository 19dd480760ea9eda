"""Glue that turns generated worlds into scored-ready episodes."""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import maze as mz
from .agent import AgentBackend, RunConfig, Transcript, run_episode
from .benchmark import TEMPLATES, BenchmarkConfig, QueryInstance, gold_answer, instantiate
from .generator import GeneratorConfig, SchemaBlueprint, derive_seed, generate_graph
from .graph import PropertyGraph, SchemaTable, render_schema
from .prompts import (
    build_maze_prompt_no_tools,
    build_maze_prompt_with_tools,
    build_prompt_no_tools,
    build_prompt_with_tools,
)
from .tools import kg_registry, maze_registry


@dataclass
class World:
    seed: int
    graph: PropertyGraph
    blueprint: SchemaBlueprint
    schema: SchemaTable
    instances: list[QueryInstance]


def build_world(config: GeneratorConfig, bench: BenchmarkConfig = BenchmarkConfig()) -> World:
    """One graph per seed and one instance of every template on it."""
    graph, blueprint = generate_graph(config)
    rng = random.Random(derive_seed(config.seed, "questions"))
    instances = [instantiate(t, graph, rng, bench) for t in TEMPLATES]
    return World(config.seed, graph, blueprint, render_schema(blueprint), instances)


def kg_episode(
    world: World,
    instance: QueryInstance,
    backend: AgentBackend,
    config: RunConfig,
) -> Transcript:
    if config.with_tools:
        prompt = build_prompt_with_tools(world.schema.to_text(), config.system_time)
        registry = kg_registry(world.graph)
    else:
        prompt = build_prompt_no_tools(world.graph.to_text(), config.system_time)
        registry = None
    meta = {
        "kind": "kg",
        "seed": world.seed,
        "instance": instance.to_dict(),
        "gold": gold_answer(instance, world.graph).to_dict(),
    }
    return run_episode(backend, registry, instance.question_text, config, prompt, meta)


MAZE_QUESTION = "Find the path from cell {start} to cell {goal}."


def maze_episode(state: mz.MazeState, backend: AgentBackend, config: RunConfig) -> Transcript:
    """Run one maze episode on a fresh copy of ``state`` (marks never leak between episodes)."""
    state = mz.MazeState.from_dict(state.to_dict())
    state.reset_marks()
    if config.with_tools:
        schema = render_schema(state).to_text()
        prompt = build_maze_prompt_with_tools(schema, state.start_key, state.goal_key, state.width, state.height)
        registry = maze_registry(state)
    else:
        prompt = build_maze_prompt_no_tools(
            mz.render_ascii(state), state.start_key, state.goal_key, state.width, state.height
        )
        registry = None
    meta = {"kind": "maze", "seed": state.seed, "maze": state.to_dict()}
    question = MAZE_QUESTION.format(start=state.start_key, goal=state.goal_key)
    return run_episode(backend, registry, question, config, prompt, meta)

