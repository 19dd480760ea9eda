"""Deterministic tool-using solvers that play the role of an agent backend.

They see the world only through tool results, exactly like a model would,
so a perfect score is evidence that the toolset is sufficient.
"""

from __future__ import annotations

import json
import re
from typing import Generator

from .agent import AssistantTurn, BackendError
from .benchmark import QueryInstance, Template
from .graph import SchemaTable
from .tools import ToolCall

# A policy yields either a batch of (tool name, arguments) pairs, answered with
# the decoded results in the same order, or a final answer string.
Batch = list[tuple[str, dict]]
Policy = Generator["Batch | str", list, None]

_REL = re.compile(r"^\(:(\w+)\)-\[:(\w+)\]->\(:(\w+)\)$")


def _decode(content: str):
    try:
        return json.loads(content)
    except json.JSONDecodeError:
        return content


class PolicyBackend:
    """Adapts a generator policy to the AgentBackend contract."""

    def __init__(self, policy: Policy, name: str = "scripted") -> None:
        self.name = name
        self._policy = policy
        self._started = False
        self._calls = 0

    def respond(self, messages: list[dict], tools: list[dict]) -> AssistantTurn:
        try:
            if not self._started:
                self._started = True
                step = next(self._policy)
            else:
                step = self._policy.send([_decode(m["content"]) for m in _trailing_tool_messages(messages)])
        except StopIteration:
            raise BackendError("scripted policy ended without an answer") from None
        if isinstance(step, str):
            return AssistantTurn(content=step)
        calls = []
        for name, args in step:
            calls.append(ToolCall(f"call_{self._calls}", name, args))
            self._calls += 1
        return AssistantTurn(content=None, tool_calls=calls)


def _trailing_tool_messages(messages: list[dict]) -> list[dict]:
    out = []
    for m in reversed(messages):
        if m["role"] != "tool":
            break
        out.append(m)
    return out[::-1]


# -- knowledge-graph solver --------------------------------------------------------


class _Explorer:
    """Tool helpers shared by the per-template strategies; results are cached."""

    def __init__(self, schema: SchemaTable) -> None:
        self.rel_sources: dict[str, set[str]] = {}
        for row in schema.rows:
            m = _REL.match(row.pattern)
            if row.entity_type == "Relationship" and m:
                self.rel_sources.setdefault(m.group(2), set()).add(m.group(1))
        self.adj: dict[str, list[dict]] = {}
        self.label_of: dict[str, str] = {}

    def keys_of(self, label: str):
        res = yield [("get_unique_property_values", {"property_name": "key", "entity_name": label, "entity_type": "node"})]
        keys = [r["values"] for r in _ok(res[0])]
        for k in keys:
            self.label_of[k] = label
        return keys

    def expand(self, keys):
        """Fetch neighbour lists for every key not yet expanded, in one batch."""
        todo = sorted({k for k in keys if k not in self.adj})
        if todo:
            res = yield [
                ("get_all_nearest_neighbors", {"label": self.label_of[k], "property_name": "key", "property_value": k})
                for k in todo
            ]
            for k, r in zip(todo, res):
                entries = _ok(r)
                self.adj[k] = entries
                for e in entries:
                    self.label_of[e["node"]["properties"]["key"]] = e["node"]["label"]
        return {k: self.adj[k] for k in keys}

    def out(self, key: str) -> list[dict]:
        return [e for e in self.adj[key] if e["direction"] == "outgoing"]

    def out_keys(self, key: str, label: str | None = None) -> list[str]:
        return [e["node"]["properties"]["key"] for e in self.out(key) if label is None or e["node"]["label"] == label]

    def levels(self, starts: list[str], depth: int):
        """Per-depth frontiers: levels[d][s] is the set of nodes at walk distance exactly d+1 from s."""
        frontier = {s: {s} for s in starts}
        levels = []
        for _ in range(depth):
            yield from self.expand(set().union(*frontier.values()) if frontier else set())
            frontier = {s: {k for f in fs for k in self.out_keys(f)} for s, fs in frontier.items()}
            levels.append(frontier)
        return levels


def _ok(result):
    if isinstance(result, str):
        raise BackendError(f"unexpected tool error: {result}")
    return result


def _answer(records: list[dict]) -> str:
    unique = {json.dumps(r, sort_keys=True): r for r in records}
    return json.dumps([unique[k] for k in sorted(unique)])


def kg_policy(instance: QueryInstance, schema: SchemaTable) -> Policy:
    p, t = instance.params, instance.template
    ex = _Explorer(schema)
    yield [("think", {"thought": f"Plan for {t.value}: enumerate entry nodes, expand neighbours, aggregate. {json.dumps(p, sort_keys=True)}"})]

    if t is Template.NODE_COUNT:
        keys = yield from ex.keys_of(p["source_label"])
        yield from ex.expand(keys)
        n = sum(1 for k in keys if ex.out_keys(k, p["target_label"]))
        records = [{"count": n}]
    elif t is Template.RELATIONSHIP_COUNT:
        n = 0
        for label in sorted(ex.rel_sources.get(p["rel_type_name"], ())):
            keys = yield from ex.keys_of(label)
            yield from ex.expand(keys)
            n += sum(1 for k in keys for e in ex.out(k) if e["relationship"]["type"] == p["rel_type_name"])
        records = [{"count": n}]
    elif t is Template.NODE_WITH_MOST_RELATIONSHIPS:
        keys = yield from ex.keys_of(p["source_node_label"])
        yield from ex.expand(keys)
        counts = {k: sum(1 for e in ex.out(k) if e["relationship"]["type"] == p["rel_type_name"]) for k in keys}
        best = max(counts.values(), default=0)
        top = min(k for k, c in counts.items() if c == best)
        records = [{"node_key": top, "rel_count": best}]
    elif t is Template.NODE_BY_PROPERTY:
        res = yield [("get_node_by_property", {"label": p["node_label"], "property_name": p["prop_name"], "property_value": p["prop_value"]})]
        records = [{"node_key": n["key"]} for n in _ok(res[0])]
    elif t is Template.RELATIONSHIP_BY_PROPERTY:
        records = []
        for label in sorted(ex.rel_sources.get(p["rel_type_name"], ())):
            keys = yield from ex.keys_of(label)
            yield from ex.expand(keys)
            for k in keys:
                for e in ex.out(k):
                    rel = e["relationship"]
                    if rel["type"] == p["rel_type_name"] and rel["properties"].get(p["prop_name"]) == p["prop_value"]:
                        records.append({"source_key": k, "target_key": e["node"]["properties"]["key"]})
    elif t is Template.PATH_FINDING:
        keys = yield from ex.keys_of(p["source_label"])
        yield from ex.expand(keys)
        mids = {m for k in keys for m in ex.out_keys(k, p["middle_label"])}
        yield from ex.expand(mids)
        records = []
        for a in keys:
            for b in ex.out_keys(a, p["middle_label"]):
                for c in ex.out_keys(b, p["target_label"]):
                    # a == b == c means both hops are self-loops; they must be different loops
                    if a == b == c and ex.out_keys(b).count(b) < 2:
                        continue
                    records.append({"source_node_key": a, "target_node_key": c})
    elif t is Template.VARIABLE_HOP_PATH:
        keys = yield from ex.keys_of(p["source_label"])
        levels = yield from ex.levels(keys, p["n"])
        hits = {a: {b for lv in levels for b in lv[a] if ex.label_of[b] == p["target_label"]} for a in keys}
        yield from ex.expand(set().union(*hits.values()) if hits else set())
        records = [
            {"source_node_key": a, "target_node_key": b}
            for a, bs in hits.items()
            for b in bs
            if len(ex.out(b)) >= (2 if a == b else 1)
        ]
    elif t is Template.PATH_FROM_SPECIFIC_NODE:
        ex.label_of[p["source_key"]] = p["source_label"]
        levels = yield from ex.levels([p["source_key"]], p["n"])
        reached = {b for lv in levels for b in lv[p["source_key"]] if ex.label_of[b] == p["target_label"]}
        records = [{"target_node_key": b} for b in reached]
    elif t is Template.REMOTE_NODE_PROPERTY:
        src = p["source_key"]
        ex.label_of[src] = p["source_label"]
        levels = yield from ex.levels([src], p["max_hops"])
        direct = levels[0][src]
        far = {b for lv in levels[1:] for b in lv[src] if ex.label_of[b] == p["target_label"]} - direct
        # every reached node appears in the neighbour list of the node before it
        props = {e["node"]["properties"]["key"]: e["node"]["properties"] for es in ex.adj.values() for e in es}
        values = sorted(k for k in far if p["prop_name"] in props[k])
        records = [{"value": props[values[0]][p["prop_name"]]}] if values else []
    elif t in (Template.COMPOSITIONAL_INTERSECTION, Template.NEGATION_WITH_CONNECTION):
        keys = yield from ex.keys_of(p["source_label"])
        yield from ex.expand(keys)
        records = []
        for k in keys:
            labels = {e["node"]["label"] for e in ex.out(k)}
            if t is Template.COMPOSITIONAL_INTERSECTION:
                ok = p["target1_label"] in labels and p["target2_label"] in labels
            else:
                ok = p["positive_target_label"] in labels and p["negative_target_label"] not in labels
            if ok:
                records.append({"node_key": k})
    elif t is Template.NEGATION_ON_REL_PROPERTY:
        res = yield [("get_node_by_property", {"label": p["source_label"], "property_name": p["source_prop_name"], "property_value": p["source_prop_value"]})]
        keys = [n["key"] for n in _ok(res[0])]
        for k in keys:
            ex.label_of[k] = p["source_label"]
        yield from ex.expand(keys)
        records = []
        for k in keys:
            for e in ex.out(k):
                rel = e["relationship"]
                if (
                    rel["type"] == p["rel_type_name"]
                    and e["node"]["label"] == p["target_label"]
                    and p["prop_name"] in rel["properties"]
                    and rel["properties"][p["prop_name"]] != p["val2"]
                ):
                    records.append({"node_key": k})
    else:
        raise ValueError(f"unknown template {t!r}")

    yield [("think", {"thought": f"Collected {len(records)} record(s); answering."})]
    yield _answer(records)


def scripted_kg_backend(instance: QueryInstance, schema: SchemaTable) -> PolicyBackend:
    return PolicyBackend(kg_policy(instance, schema), name="scripted")


# -- maze solver --------------------------------------------------------------------


def maze_policy(start: str, goal: str) -> Policy:
    """Greedy depth-first exploration ordered by distance to the goal, with backtracking.

    Each explored cell is marked by the tool; the goal is explored last so
    that get_connected_path returns a route from start to goal.
    """
    seen: dict[str, list[dict]] = {}
    res = yield [("get_possible_next_cells", {"node_id": start})]
    seen[start] = _ok(res[0])
    stack = [start]
    while stack and stack[-1] != goal:
        options = sorted(
            (c for c in seen[stack[-1]] if c["key"] not in seen),
            key=lambda c: (c["euclidean_distance"], int(c["key"])),
        )
        if not options:
            stack.pop()
            continue
        nxt = options[0]["key"]
        res = yield [("get_possible_next_cells", {"node_id": nxt})]
        seen[nxt] = _ok(res[0])
        stack.append(nxt)
    res = yield [("get_connected_path", {})]
    yield json.dumps({"path": res[0] if isinstance(res[0], list) else []})


def scripted_maze_backend(start: str, goal: str) -> PolicyBackend:
    return PolicyBackend(maze_policy(start, goal), name="scripted")
