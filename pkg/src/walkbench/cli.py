"""Command-line entry point.

Every subcommand reads optional defaults from a TOML file (``--config``),
one table per subcommand, e.g.::

    [run-bench]
    preset = "paper-100"
    runs = 10

Flags given on the command line win over the file.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import maze as mz
from .agent import RunConfig, run_parallel
from .brute import cross_check
from .evaluation import aggregate, load_transcripts, score_transcript
from .generator import PRESETS, preset
from .llm import EndpointConfig, LLMBackend
from .runner import build_world, kg_episode, maze_episode
from .scripted import scripted_kg_backend, scripted_maze_backend

log = logging.getLogger("walkbench")


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


def cmd_generate_graph(args) -> int:
    overrides = {k: v for k, v in {"num_nodes": args.nodes}.items() if v is not None}
    config = preset(args.preset, seed=args.seed, **overrides)
    world = build_world(config)
    out = Path(args.out)
    _write(out, world.graph.to_json())
    stem = out.with_suffix("")
    _write(stem.with_name(stem.name + ".schema.txt"), world.schema.to_text() + "\n")
    _write(stem.with_name(stem.name + ".blueprint.json"), json.dumps(world.blueprint.to_dict(), indent=1, sort_keys=True))
    _write(
        stem.with_name(stem.name + ".questions.json"),
        json.dumps([i.to_dict() for i in world.instances], indent=1, sort_keys=True),
    )
    print(f"{len(world.graph.nodes)} nodes, {len(world.graph.relationships)} relationships -> {out}")
    return 0


def cmd_oracle_check(args) -> int:
    result = cross_check(args.graphs, args.nodes, args.seed)
    print(f"{result.graphs} graphs, {result.instances} instances, {result.skipped} skipped, {len(result.mismatches)} mismatches")
    if result.mismatches and args.out:
        _write(Path(args.out), json.dumps(result.mismatches, indent=1))
    return 1 if result.mismatches else 0


def _run_config(args) -> RunConfig:
    return RunConfig(with_tools=not args.no_tools, max_iterations=args.max_iterations, workers=args.workers)


def _llm(args) -> LLMBackend:
    return LLMBackend(EndpointConfig.from_env(base_url=args.base_url, model=args.model, temperature=args.temperature))


def _emit(transcripts, out: Path, layout: str) -> int:
    for t in transcripts:
        t.write(out / "transcripts" / f"{t.meta.get('kind')}-{t.meta.get('seed')}-{t.episode_id}.jsonl")
    report = aggregate([score_transcript(t) for t in transcripts], layout)
    _write(out / f"report-{layout}.csv", report.to_csv())
    _write(out / f"report-{layout}.json", report.to_json())
    print(report.to_csv(), end="")
    return 0


def cmd_run_bench(args) -> int:
    config = _run_config(args)
    if args.backend == "scripted" and not config.with_tools:
        print("the scripted solver needs tools", file=sys.stderr)
        return 2
    jobs = []
    for seed in range(args.seed, args.seed + args.runs):
        world = build_world(preset(args.preset, seed=seed))
        for inst in world.instances:
            if args.backend == "scripted":
                backend = scripted_kg_backend(inst, world.schema)
            else:
                backend = _llm(args)
            jobs.append(lambda w=world, i=inst, b=backend: kg_episode(w, i, b, config))
    return _emit(run_parallel(jobs, config.workers), Path(args.out), "table1")


def _maze_config(args, seed: int) -> mz.MazeConfig:
    return mz.MazeConfig(args.size, args.size, args.wall_ratio, args.min_path, seed)


def cmd_generate_maze(args) -> int:
    state = mz.generate_maze(_maze_config(args, args.seed))
    if args.out:
        _write(Path(args.out), state.to_json())
    print(mz.render_ascii(state, args.render))
    print(f"start {state.start_key}, goal {state.goal_key}, wall ratio {state.wall_ratio:.2f}")
    return 0


def cmd_run_maze(args) -> int:
    config = _run_config(args)
    if args.backend == "scripted" and not config.with_tools:
        print("the scripted solver needs tools", file=sys.stderr)
        return 2
    jobs = []
    for seed in range(args.seed, args.seed + args.mazes):
        state = mz.generate_maze(_maze_config(args, seed))
        if args.backend == "scripted":
            backend = scripted_maze_backend(state.start_key, state.goal_key)
        else:
            backend = _llm(args)
        jobs.append(lambda s=state, b=backend: maze_episode(s, b, config))
    return _emit(run_parallel(jobs, config.workers), Path(args.out), "maze")


def cmd_report(args) -> int:
    transcripts = load_transcripts(args.input)
    if not transcripts:
        print(f"no transcripts under {args.input}", file=sys.stderr)
        return 1
    report = aggregate([score_transcript(t) for t in transcripts], args.layout)
    if args.out:
        out = Path(args.out)
        _write(out.with_suffix(".csv"), report.to_csv())
        _write(out.with_suffix(".json"), report.to_json())
    print(report.to_csv(), end="")
    return 0


def _agent_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--backend", choices=["scripted", "llm"], default="scripted")
    p.add_argument("--no-tools", action="store_true", help="give the model the full graph instead of tools")
    p.add_argument("--max-iterations", type=int, default=30)
    p.add_argument("--workers", type=int, default=4)
    p.add_argument("--model", default=None, help="model name for --backend llm")
    p.add_argument("--base-url", default=None, help="chat-completions base URL for --backend llm")
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="walkbench", description="Graph traversal benchmark for tool-using agents.")
    ap.add_argument("--config", help="TOML file with per-subcommand defaults")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate-graph", help="generate a graph, its schema and one question per template")
    p.add_argument("--preset", choices=sorted(PRESETS), default="paper-100")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--nodes", type=int, default=None, help="override the preset node count")
    p.add_argument("--out", default="graph.json")
    p.set_defaults(func=cmd_generate_graph)

    p = sub.add_parser("oracle-check", help="compare the indexed oracle with brute force")
    p.add_argument("--nodes", type=int, default=30, help="maximum nodes per graph")
    p.add_argument("--graphs", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="where to dump mismatches")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("run-bench", help="run the 12-template benchmark")
    p.add_argument("--preset", choices=sorted(PRESETS), default="paper-100")
    p.add_argument("--runs", type=int, default=10, help="graphs (seeds) to generate")
    p.add_argument("--out", default="runs/bench")
    _agent_flags(p)
    p.set_defaults(func=cmd_run_bench)

    maze_flags = argparse.ArgumentParser(add_help=False)
    maze_flags.add_argument("--size", type=int, default=10)
    maze_flags.add_argument("--wall-ratio", type=float, default=0.5)
    maze_flags.add_argument("--min-path", type=int, default=15)

    p = sub.add_parser("generate-maze", parents=[maze_flags], help="generate and print one maze")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--render", choices=["plain", "exploration"], default="plain")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_generate_maze)

    p = sub.add_parser("run-maze", parents=[maze_flags], help="run maze episodes")
    p.add_argument("--mazes", type=int, default=10)
    p.add_argument("--out", default="runs/maze")
    _agent_flags(p)
    p.set_defaults(func=cmd_run_maze)

    p = sub.add_parser("report", help="score transcripts and print a table")
    p.add_argument("--in", dest="input", required=True, help="transcript file or directory")
    p.add_argument("--layout", choices=["table1", "maze", "table2"], default="table1")
    p.add_argument("--out", default=None, help="output path stem for CSV and JSON")
    p.set_defaults(func=cmd_report)
    return ap


def _apply_config(parser: argparse.ArgumentParser, argv) -> None:
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    with open(known.config, "rb") as fh:
        data = tomllib.load(fh)
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for name, table in data.items():
        if name not in subparsers.choices:
            raise SystemExit(f"config: unknown section [{name}]")
        subparsers.choices[name].set_defaults(**{k.replace("-", "_"): v for k, v in table.items()})


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
