"""Distribution of shortest-path length, wall ratio and greedy-agent turns over maze seeds."""

import argparse
import statistics
from collections import deque

from walkbench import maze as mz
from walkbench.agent import RunConfig
from walkbench.evaluation import score_transcript
from walkbench.runner import maze_episode
from walkbench.scripted import scripted_maze_backend


def shortest(state):
    dist = {state.start_key: 0}
    queue = deque([state.start_key])
    while queue:
        cur = queue.popleft()
        for nxt in state.open_neighbors(cur):
            if nxt not in dist:
                dist[nxt] = dist[cur] + 1
                queue.append(nxt)
    return dist.get(state.goal_key)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seeds", type=int, default=100)
    ap.add_argument("--size", type=int, default=10)
    ap.add_argument("--wall-ratio", type=float, default=0.5)
    ap.add_argument("--min-path", type=int, default=15)
    args = ap.parse_args()

    lengths, carved, ratios, turns, solved = [], [], [], [], 0
    for seed in range(args.seeds):
        state = mz.generate_maze(mz.MazeConfig(args.size, args.size, args.wall_ratio, args.min_path, seed))
        lengths.append(shortest(state))
        carved.append(len(state.carved_path) - 1)
        ratios.append(state.wall_ratio)
        t = maze_episode(state, scripted_maze_backend(state.start_key, state.goal_key), RunConfig())
        turns.append(t.turns)
        solved += score_transcript(t).correct

    def summary(xs):
        return f"min {min(xs)} median {statistics.median(xs)} max {max(xs)}"

    print(f"carved path length: {summary(carved)}")
    print(f"shortest path length: {summary(lengths)}")
    print(f"wall ratio: mean {statistics.mean(ratios):.3f} min {min(ratios):.2f}")
    print(f"greedy agent turns: {summary(turns)}; solved {solved}/{args.seeds}")


if __name__ == "__main__":
    main()
