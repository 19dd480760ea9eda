"""Grid mazes as graphs: generation with a guaranteed path, exploration tools, validation."""

from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import asdict, dataclass, field

from .graph import EntitySchema, node_pattern, rel_pattern

WALL_DISTANCE = -1e9
MAX_CARVE_ATTEMPTS = 1000
CARVE_NOISE = 4.0
CELL_LABEL = "Cell"
ADJACENT = "ADJACENT"
# up, down, left, right
STEPS = ((-1, 0), (1, 0), (0, -1), (0, 1))


class MazeError(Exception):
    pass


@dataclass(frozen=True)
class MazeConfig:
    width: int = 10
    height: int = 10
    wall_ratio: float = 0.5
    min_path_len: int = 15
    seed: int = 0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("maze dimensions must be positive")
        if not 0.0 <= self.wall_ratio < 1.0:
            raise ValueError("wall_ratio must lie in [0, 1)")
        if not 1 <= self.min_path_len < self.width * self.height:
            raise ValueError("min_path_len must be positive and smaller than the cell count")


@dataclass
class Cell:
    key: str
    is_wall: bool
    euclidean_distance: float
    marked: bool = False
    mark_order: int = -1


@dataclass
class MazeState:
    width: int
    height: int
    cells: list[Cell]
    start_key: str
    goal_key: str
    visit_counter: int = 0
    carved_path: list[str] = field(default_factory=list)
    seed: int | None = None
    wall_ratio: float = 0.0
    last_output: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return self.width * self.height

    def index(self, key) -> int | None:
        """Row-major index for a key, or None when the key names no cell."""
        try:
            i = int(str(key).strip())
        except ValueError:
            return None
        return i if 0 <= i < self.size else None

    def cell(self, key) -> Cell:
        i = self.index(key)
        if i is None:
            raise MazeError(f"invalid cell {key!r}")
        return self.cells[i]

    def coords(self, key) -> tuple[int, int]:
        return divmod(self.index(key), self.width)

    def adjacent(self, key) -> list[str]:
        r, c = self.coords(key)
        out = []
        for dr, dc in STEPS:
            rr, cc = r + dr, c + dc
            if 0 <= rr < self.height and 0 <= cc < self.width:
                out.append(str(rr * self.width + cc))
        return out

    def open_neighbors(self, key) -> list[str]:
        return [k for k in self.adjacent(key) if not self.cell(k).is_wall]

    def marked_keys(self) -> list[str]:
        marked = [c for c in self.cells if c.marked]
        return [c.key for c in sorted(marked, key=lambda c: c.mark_order)]

    def schema_entities(self) -> list[EntitySchema]:
        return [
            EntitySchema(
                "Node", CELL_LABEL, node_pattern(CELL_LABEL), ("euclidean_distance", "key", "mark_order", "marked")
            ),
            EntitySchema("Relationship", ADJACENT, rel_pattern(ADJACENT, CELL_LABEL, CELL_LABEL), ()),
        ]

    def reset_marks(self) -> None:
        for c in self.cells:
            c.marked, c.mark_order = False, -1
        self.visit_counter = 0
        self.last_output = []

    def to_dict(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "start": self.start_key,
            "goal": self.goal_key,
            "seed": self.seed,
            "wall_ratio": self.wall_ratio,
            "carved_path": self.carved_path,
            "walls": [c.key for c in self.cells if c.is_wall],
            "cells": [asdict(c) for c in self.cells],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "MazeState":
        cells = [Cell(**c) for c in data["cells"]]
        state = cls(
            data["width"], data["height"], cells, data["start"], data["goal"],
            carved_path=list(data.get("carved_path", [])), seed=data.get("seed"),
            wall_ratio=data.get("wall_ratio", 0.0),
        )
        state.visit_counter = sum(c.marked for c in cells)
        return state


# -- generation ---------------------------------------------------------------


def _carve(rng: random.Random, width: int, height: int, start: int, goal: int) -> list[int]:
    """Randomised depth-first search from start; the stack on reaching goal is a simple path.

    Neighbours are tried in order of Manhattan distance to the goal plus
    uniform noise of width ``CARVE_NOISE``. Unbiased DFS fills most of the
    grid and leaves no room for walls; pure greed gives straight corridors.
    """
    gr, gc = divmod(goal, width)

    def nbrs(i):
        r, c = divmod(i, width)
        out = [(r + dr) * width + (c + dc) for dr, dc in STEPS if 0 <= r + dr < height and 0 <= c + dc < width]
        # popped from the end, so best candidate last
        out.sort(key=lambda j: -(abs(j // width - gr) + abs(j % width - gc) + rng.uniform(0, CARVE_NOISE)))
        return out

    stack = [start]
    pending = {start: nbrs(start)}
    seen = {start}
    while stack:
        cur = stack[-1]
        if cur == goal:
            return stack
        options = pending[cur]
        while options and options[-1] in seen:
            options.pop()
        if not options:
            stack.pop()
            continue
        nxt = options.pop()
        seen.add(nxt)
        pending[nxt] = nbrs(nxt)
        stack.append(nxt)
    return []


def generate_maze(config: MazeConfig) -> MazeState:
    """Pick random endpoints, carve a self-avoiding path between them, then drop walls elsewhere.

    Walls never land on the carved path, so the realised wall ratio can
    fall short of ``config.wall_ratio``; the achieved value is stored.
    """
    rng = random.Random(config.seed)
    total = config.width * config.height
    for _ in range(MAX_CARVE_ATTEMPTS):
        start, goal = rng.sample(range(total), 2)
        path = _carve(rng, config.width, config.height, start, goal)
        if len(path) - 1 >= config.min_path_len:
            break
    else:
        raise MazeError("infeasible config: no carved path reached min_path_len")

    on_path = set(path)
    free = [i for i in range(total) if i not in on_path]
    n_walls = min(round(config.wall_ratio * total), len(free))
    walls = set(rng.sample(free, n_walls))

    gr, gc = divmod(goal, config.width)
    cells = []
    for i in range(total):
        r, c = divmod(i, config.width)
        is_wall = i in walls
        dist = WALL_DISTANCE if is_wall else math.hypot(r - gr, c - gc)
        cells.append(Cell(str(i), is_wall, dist))
    return MazeState(
        config.width, config.height, cells, str(start), str(goal),
        carved_path=[str(i) for i in path], seed=config.seed, wall_ratio=n_walls / total,
    )


# -- tools --------------------------------------------------------------------


def get_possible_next_cells(state: MazeState, key) -> list[str] | str:
    """Mark ``key`` as visited and list its open neighbours (up, down, left, right).

    Errors come back as message strings rather than exceptions. Marking is
    idempotent: a revisited cell keeps its first ``mark_order``.
    """
    if state.index(key) is None:
        return f"Error: invalid cell {key!r}; keys are integers from 0 to {state.size - 1}"
    cell = state.cell(key)
    if cell.is_wall:
        return f"Error: cell {cell.key} is a wall and cannot be explored"
    if not cell.marked:
        cell.marked = True
        cell.mark_order = state.visit_counter
        state.visit_counter += 1
    out = state.open_neighbors(cell.key)
    state.last_output = out
    return out


def _bfs(state: MazeState, src: str, dst: str, allowed: set[str]) -> list[str] | None:
    prev = {src: None}
    queue = deque([src])
    while queue:
        cur = queue.popleft()
        if cur == dst:
            path = []
            while cur is not None:
                path.append(cur)
                cur = prev[cur]
            return path[::-1]
        for nxt in state.adjacent(cur):
            if nxt in allowed and nxt not in prev:
                prev[nxt] = cur
                queue.append(nxt)
    return None


def get_connected_path(state: MazeState) -> list[str] | str:
    """Shortest 4-connected path from the first- to the last-marked cell through marked cells only."""
    marked = state.marked_keys()
    if not marked:
        return "Error: no cells have been visited yet; no valid path can be formed from the visited cells"
    path = _bfs(state, marked[0], marked[-1], set(marked))
    if path is None:
        return (
            f"Error: no valid path can be formed from the visited cells "
            f"between cell {marked[0]} and cell {marked[-1]}"
        )
    return path


@dataclass(frozen=True)
class PathVerdict:
    valid: bool
    reason: str


def validate_path(state: MazeState, path, require_simple: bool = False) -> PathVerdict:
    """Check that ``path`` walks from start to goal over open cells in 4-adjacent steps."""
    keys = [str(k).strip() for k in (path or [])]
    if not keys:
        return PathVerdict(False, "empty path")
    if keys[0] != state.start_key:
        return PathVerdict(False, f"path starts at {keys[0]}, not at start cell {state.start_key}")
    prev = None
    for k in keys:
        if state.index(k) is None:
            return PathVerdict(False, f"invalid cell {k}")
        if state.cell(k).is_wall:
            return PathVerdict(False, f"wall cell {k}")
        if prev is not None and k not in state.adjacent(prev):
            return PathVerdict(False, f"non-adjacent step {prev} -> {k}")
        prev = k
    if keys[-1] != state.goal_key:
        return PathVerdict(False, f"path ends at {keys[-1]}, not at goal cell {state.goal_key}")
    if require_simple and len(set(keys)) != len(keys):
        return PathVerdict(False, "path revisits a cell")
    return PathVerdict(True, "ok")


# -- rendering ----------------------------------------------------------------


def _grid(rows: list[list[str]]) -> str:
    width = max(len(s) for row in rows for s in row) + 2
    border = "+" + "+".join("-" * width for _ in rows[0]) + "+"
    lines = [border]
    for row in rows:
        lines.append("|" + "|".join(s.center(width) for s in row) + "|")
        lines.append(border)
    return "\n".join(lines)


def render_ascii(state: MazeState, overlay: str = "plain") -> str:
    """Bordered grid.

    ``plain`` shows cell keys with S, G and # for walls. ``exploration``
    shows # walls, . unvisited, o visited, * cells returned by the latest
    exploration call, s start and G goal.
    """
    if overlay not in ("plain", "exploration"):
        raise ValueError(f"unknown overlay {overlay!r}")
    highlight = set(state.last_output)
    rows = []
    for r in range(state.height):
        row = []
        for c in range(state.width):
            cell = state.cells[r * state.width + c]
            if cell.key == state.start_key:
                glyph = "S" if overlay == "plain" else "s"
            elif cell.key == state.goal_key:
                glyph = "G"
            elif cell.is_wall:
                glyph = "#"
            elif overlay == "plain":
                glyph = cell.key
            elif cell.key in highlight:
                glyph = "*"
            elif cell.marked:
                glyph = "o"
            else:
                glyph = "."
            row.append(glyph)
        rows.append(row)
    return _grid(rows)
