import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walkbench import maze as mz


def open_maze(width, height, start="0", goal=None, walls=()):
    goal = goal if goal is not None else str(width * height - 1)
    gr, gc = divmod(int(goal), width)
    cells = []
    for i in range(width * height):
        r, c = divmod(i, width)
        wall = str(i) in walls
        cells.append(mz.Cell(str(i), wall, mz.WALL_DISTANCE if wall else math.hypot(r - gr, c - gc)))
    return mz.MazeState(width, height, cells, start, goal)


def test_next_cells_up_down_left_right():
    state = open_maze(3, 3)
    assert mz.get_possible_next_cells(state, "4") == ["1", "7", "3", "5"]
    assert state.cell("4").marked and state.cell("4").mark_order == 0


def test_next_cells_on_wall_marks_nothing():
    state = open_maze(3, 3, walls={"4"})
    out = mz.get_possible_next_cells(state, "4")
    assert isinstance(out, str) and "wall" in out
    assert state.marked_keys() == []


def test_next_cells_invalid_key():
    state = open_maze(3, 3)
    for bad in ("9", "-1", "abc"):
        assert "invalid cell" in mz.get_possible_next_cells(state, bad)


def test_mark_order_counts_calls_and_is_idempotent():
    state = open_maze(3, 3)
    mz.get_possible_next_cells(state, "0")
    mz.get_possible_next_cells(state, "1")
    first = mz.get_possible_next_cells(state, "0")
    assert (state.cell("0").mark_order, state.cell("1").mark_order) == (0, 1)
    assert first == mz.get_possible_next_cells(state, "0")
    assert state.visit_counter == 2


def test_connected_path_examples():
    corridor = open_maze(3, 1)
    for k in "012":
        mz.get_possible_next_cells(corridor, k)
    assert mz.get_connected_path(corridor) == ["0", "1", "2"]

    single = open_maze(3, 1)
    mz.get_possible_next_cells(single, "0")
    assert mz.get_connected_path(single) == ["0"]

    split = open_maze(3, 1)
    mz.get_possible_next_cells(split, "0")
    mz.get_possible_next_cells(split, "2")
    assert "no valid path" in mz.get_connected_path(split)

    assert "no cells" in mz.get_connected_path(open_maze(2, 2))


def test_connected_path_takes_shortest_route_through_marks():
    state = open_maze(3, 3)
    for k in ["0", "1", "2", "5", "4", "3", "6", "7", "8"]:
        mz.get_possible_next_cells(state, k)
    path = mz.get_connected_path(state)
    assert len(path) == 5 and path[0] == "0" and path[-1] == "8"


def test_validate_path_examples():
    state = mz.generate_maze(mz.MazeConfig(seed=3))
    assert mz.validate_path(state, state.carved_path).valid
    jump = open_maze(3, 1)
    assert mz.validate_path(jump, ["0", "2"]).reason.startswith("non-adjacent step")
    walled = open_maze(3, 1, walls={"1"})
    assert mz.validate_path(walled, ["0", "1", "2"]).reason == "wall cell 1"
    assert not mz.validate_path(jump, []).valid
    assert "not at goal" in mz.validate_path(jump, ["0", "1"]).reason
    assert mz.validate_path(jump, ["0", "1", "0", "1", "2"]).valid
    assert not mz.validate_path(jump, ["0", "1", "0", "1", "2"], require_simple=True).valid


def test_generate_small_open_maze():
    state = mz.generate_maze(mz.MazeConfig(2, 2, 0.0, 1, seed=0))
    assert not any(c.is_wall for c in state.cells)
    assert state.start_key != state.goal_key


def test_generate_is_deterministic():
    config = mz.MazeConfig(seed=42)
    assert mz.generate_maze(config).to_json() == mz.generate_maze(config).to_json()


def test_infeasible_config_raises(monkeypatch):
    # pretend every carve ends next to the start
    monkeypatch.setattr(mz, "_carve", lambda rng, w, h, start, goal: [start, goal])
    with pytest.raises(mz.MazeError, match="infeasible"):
        mz.generate_maze(mz.MazeConfig(5, 5, 0.0, 3, seed=0))


def test_config_validation():
    with pytest.raises(ValueError):
        mz.MazeConfig(wall_ratio=1.0)
    with pytest.raises(ValueError):
        mz.MazeConfig(3, 3, min_path_len=9)


def test_render_plain_and_exploration():
    state = open_maze(2, 1, start="0", goal="1")
    plain = mz.render_ascii(state)
    assert plain.splitlines() == ["+---+---+", "| S | G |", "+---+---+"]
    grid = open_maze(3, 3, start="0", goal="8", walls={"4"})
    glyphs = set(mz.render_ascii(grid, "exploration")) - set("+-| \n")
    assert glyphs <= {"#", ".", "s", "G"}
    mz.get_possible_next_cells(grid, "1")
    mz.get_possible_next_cells(grid, "2")
    rows = mz.render_ascii(grid, "exploration").splitlines()
    # 1 and 2 are visited, but the latest call (on 2) returned 5 and 1
    assert rows[1] == "| s | * | o |"
    assert rows[3] == "| . | # | * |"


def test_state_json_round_trip():
    state = mz.generate_maze(mz.MazeConfig(seed=1))
    mz.get_possible_next_cells(state, state.start_key)
    again = mz.MazeState.from_dict(state.to_dict())
    assert again.to_json() == state.to_json()
    assert again.visit_counter == 1


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from([(10, 10), (8, 12), (6, 6)]), st.sampled_from([0.3, 0.5]))
def test_generated_maze_invariants(seed, size, ratio):
    w, h = size
    config = mz.MazeConfig(w, h, ratio, min(15, w * h // 3), seed)
    state = mz.generate_maze(config)
    assert mz.validate_path(state, state.carved_path, require_simple=True).valid
    assert len(state.carved_path) - 1 >= config.min_path_len
    gr, gc = state.coords(state.goal_key)
    for cell in state.cells:
        if cell.is_wall:
            assert cell.euclidean_distance == -1e9
        else:
            r, c = state.coords(cell.key)
            assert abs(cell.euclidean_distance - math.hypot(r - gr, c - gc)) < 1e-9
    assert state.cell(state.goal_key).euclidean_distance == 0
    assert sum(c.is_wall for c in state.cells) <= round(ratio * w * h)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.lists(st.integers(0, 99), max_size=40))
def test_mark_order_is_call_order(seed, calls):
    state = mz.generate_maze(mz.MazeConfig(seed=seed))
    expected = []
    for i in calls:
        out = mz.get_possible_next_cells(state, str(i))
        if not isinstance(out, str) and str(i) not in expected:
            expected.append(str(i))
    assert state.marked_keys() == expected
    assert sorted(state.cell(k).mark_order for k in expected) == list(range(len(expected)))
    assert all(c.mark_order == -1 for c in state.cells if not c.marked)
    path = mz.get_connected_path(state)
    if isinstance(path, list):
        assert path[0] == expected[0] and path[-1] == expected[-1]
        assert all(not state.cell(k).is_wall for k in path)
        assert all(b in state.adjacent(a) for a, b in zip(path, path[1:]))
