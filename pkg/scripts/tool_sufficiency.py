"""Scripted agents on the synthetic benchmark and on mazes, using only the tools."""

import argparse
import time

from walkbench import maze as mz
from walkbench.agent import RunConfig
from walkbench.evaluation import aggregate, score_transcript
from walkbench.generator import preset
from walkbench.runner import build_world, kg_episode, maze_episode
from walkbench.scripted import scripted_kg_backend, scripted_maze_backend


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="paper-100")
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--mazes", type=int, default=10)
    args = ap.parse_args()
    config = RunConfig()

    t0 = time.perf_counter()
    scores = []
    for seed in range(args.runs):
        world = build_world(preset(args.preset, seed=seed))
        for inst in world.instances:
            t = kg_episode(world, inst, scripted_kg_backend(inst, world.schema), config)
            scores.append(score_transcript(t))
    print(f"knowledge graph ({args.preset}, {time.perf_counter() - t0:.1f}s)")
    print(aggregate(scores, "table1").to_csv())
    print(aggregate(scores, "table2").to_csv())

    t0 = time.perf_counter()
    scores, turns = [], []
    for seed in range(args.mazes):
        state = mz.generate_maze(mz.MazeConfig(seed=seed))
        t = maze_episode(state, scripted_maze_backend(state.start_key, state.goal_key), config)
        scores.append(score_transcript(t))
        turns.append(t.turns)
    print(f"maze ({time.perf_counter() - t0:.1f}s, turns min/max {min(turns)}/{max(turns)})")
    print(aggregate(scores, "maze").to_csv())


if __name__ == "__main__":
    main()
