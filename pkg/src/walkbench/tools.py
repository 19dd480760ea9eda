"""Tool descriptors, registries and dispatch for graph and maze environments."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable

from . import maze as mz
from .graph import GraphError, PropertyGraph, neighbors, nodes_by_property, unique_property_values


class ToolFailure(Exception):
    """Raised by handlers to report an in-band error to the agent."""


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    parameters: dict
    deterministic: bool = True

    @property
    def required(self) -> list[str]:
        return list(self.parameters.get("required", []))

    @property
    def properties(self) -> dict:
        return self.parameters.get("properties", {})

    def to_openai(self) -> dict:
        return {
            "type": "function",
            "function": {"name": self.name, "description": self.description, "parameters": self.parameters},
        }


@dataclass(frozen=True)
class ToolCall:
    call_id: str
    name: str
    arguments: Any  # decoded object, or the raw string when the model sent invalid JSON


@dataclass(frozen=True)
class ToolResult:
    call_id: str
    content: str
    is_error: bool = False


def compact(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def _params(props: dict, required: list[str] | None = None) -> dict:
    return {
        "type": "object",
        "properties": props,
        "required": list(props) if required is None else required,
        "additionalProperties": False,
    }


@dataclass
class ToolRegistry:
    tools: dict[str, tuple[ToolDescriptor, Callable[..., Any]]]
    history: list[tuple[ToolCall, ToolResult]] = field(default_factory=list)

    @property
    def descriptors(self) -> list[ToolDescriptor]:
        return [d for d, _ in self.tools.values()]

    def payload(self) -> list[dict]:
        """Function-calling ``tools`` array for a chat-completions request."""
        return [d.to_openai() for d in self.descriptors]

    def __len__(self) -> int:
        return len(self.tools)

    def dispatch(self, call: ToolCall) -> ToolResult:
        result = self._run(call)
        self.history.append((call, result))
        return result

    def _run(self, call: ToolCall) -> ToolResult:
        def error(msg: str) -> ToolResult:
            return ToolResult(call.call_id, msg, True)

        if call.name not in self.tools:
            return error(f"Error: unknown tool {call.name}; available: {', '.join(self.tools)}")
        desc, handler = self.tools[call.name]
        args = call.arguments
        if isinstance(args, str):
            try:
                args = json.loads(args) if args.strip() else {}
            except json.JSONDecodeError as exc:
                return error(f"Error: arguments for {call.name} are not valid JSON ({exc.msg})")
        if args is None:
            args = {}
        if not isinstance(args, dict):
            return error(f"Error: arguments for {call.name} must be a JSON object")
        missing = [p for p in desc.required if p not in args]
        if missing:
            return error(f"Error: missing required argument(s) for {call.name}: {', '.join(missing)}")
        extra = [p for p in args if p not in desc.properties]
        if extra:
            return error(
                f"Error: unexpected argument(s) for {call.name}: {', '.join(extra)}; "
                f"expected: {', '.join(desc.properties) or 'none'}"
            )
        try:
            out = handler(**args)
        except (ToolFailure, GraphError, mz.MazeError) as exc:
            return error(f"Error: {exc}")
        except Exception as exc:  # handlers must never crash an episode
            return error(f"Error: {call.name} failed: {type(exc).__name__}: {exc}")
        return ToolResult(call.call_id, out if isinstance(out, str) else compact(out), False)


# -- knowledge-graph tools ----------------------------------------------------

GET_NODE_BY_PROPERTY_DOC = '''Retrieve a specific node from the graph database by matching a property value.

This tool searches for nodes with a specific label that have a particular property
set to a given value. It's the primary way to find specific entities in the graph
when you know their identifying property (like name, ID, or other unique attribute).

Use this when you need to:
- Find a specific person, organization, drug, or other entity by name
- Locate nodes with specific IDs or codes
- Search for entities with particular attributes

Args:
    label (str): The node label/type (e.g., "Person", "Drug", "Company").
        Must match exactly with labels in the graph schema.
    property_name (str): The property to search by (e.g., "name", "id", "code").
        Must be a valid property for the specified label.
    property_value: The exact value to match. Can be string, number, or other types
        depending on the property. Must match exactly (case-sensitive for strings).

Returns:
    list: List of matching nodes with all their properties. Each node is a dictionary
        containing all property key-value pairs for that node.

Example:
    get_node_by_property("Person", "name", "John Smith")
    Returns: [{"name": "John Smith", "age": 30, "id": "person_123"}]'''

GET_ALL_NEAREST_NEIGHBORS_DOC = '''Get all directly connected neighbors of a specific node in the graph database.

This tool finds a node by its property value and returns ALL nodes that are directly
connected to it through any type of relationship. This is useful for exploring the
immediate neighborhood of a node and understanding its direct connections.

Use this when you need to:
- Explore what entities are directly connected to a specific node
- Find all immediate relationships of a person, organization, or other entity
- Discover the local neighborhood around a node
- Get a comprehensive view of direct connections before drilling down

Args:
    label (str): The label/type of the central node (e.g., "Person", "Drug", "Company").
        Must match exactly with labels in the graph schema.
    property_name (str): The property to identify the central node (e.g., "name", "id").
        Must be a valid property for the specified label.
    property_value: The exact value to match for finding the central node.
        Must match exactly (case-sensitive for strings).

Returns:
    list: List of all neighboring nodes with their properties and relationship information.
        Each result includes both the neighbor node data and the relationship that
        connects it to the central node.

Example:
    get_all_nearest_neighbors("Person", "name", "John Smith")
    Returns all people, organizations, locations, etc. directly connected to John Smith'''

GET_UNIQUE_PROPERTY_VALUES_DOC = '''Retrieve all unique values for a specific property across all nodes or relationships of a given type.

This tool is essential for data exploration and understanding what values exist
in the database. It helps you discover available options, validate data, and
understand the scope of information available for a particular entity type.

Use this when you need to:
- Explore what values are available for a property (e.g., all company names, or all relationship weights)
- Validate if a specific value exists before searching
- Get a complete list of options for categorical properties
- Understand the data distribution and available entities
- Find all possible values to choose from when building queries

Args:
    property_name (str): The name of the property to get values for (e.g., "name",
        "category", "status"). Must be a valid property in the schema
        for the specified entity.
    entity_name (str): The node label or relationship type to examine (e.g., "Person", "Drug",
        "Company", "INTERACTS_WITH"). Must match exactly with labels/types in
        the graph schema.
    entity_type (str): The type of the entity to examine, which can be 'node' or 'relationship'.

Returns:
    list: A list of dictionaries, each containing a unique value for the specified
        property. The structure is [{"values": value1}, {"values": value2}, ...].

Example for a node:
    get_unique_property_values("name", "Company", "Node")
    Returns: [{"values": "Pfizer"}, {"values": "Johnson & Johnson"}, {"values": "Merck"}]

Example for a relationship:
    get_unique_property_values("year", "MET_IN", "Relationship")
    Returns: [{"values": "2020"}, {"values": "2021"}]'''

THINK_DOC = '''Record and process reasoning steps during graph traversal and query planning.

This tool allows you to document your thought process, reasoning steps, and intermediate
conclusions while working through complex graph queries. It's particularly valuable
for multi-step problems where you need to plan your approach, track progress, or
explain your reasoning.

Use this when you need to:
- Break down complex queries into logical steps
- Document your reasoning for choosing specific tools or approaches
- Summarize findings from previous tool calls before proceeding
- Explain why you're taking a particular path through the graph
- Keep track of progress in multi-step graph traversals
- Clarify your understanding of the problem before answering

Args:
    thought (str): Your reasoning, observation, or plan. Can include analysis of
        previous results, next steps to take, or explanations of your
        approach to solving the user's query.

Returns:
    str: The same thought string you provided, allowing you to record and
        reference your reasoning process.

Example:
    think("I found John Smith in the database. Now I need to find his company
        affiliations by looking at his neighbors, then find other employees
        of those companies.")'''

_VALUE = {"type": ["string", "number"], "description": "The exact value to match."}


class _GraphTools:
    def __init__(self, graph: PropertyGraph) -> None:
        self.graph = graph
        self.props: dict[str, dict[str, bool]] = {}
        for n in graph.nodes:
            per_label = self.props.setdefault(n.label, {})
            for name, v in n.properties.items():
                per_label[name] = per_label.get(name, True) and not isinstance(v, str)

    def _check(self, label: str, property_name: str, value):
        if label not in self.props:
            raise ToolFailure(f"unknown label {label!r}; valid labels: {', '.join(sorted(self.props))}")
        kinds = self.props[label]
        if property_name not in kinds:
            raise ToolFailure(
                f"{property_name!r} is not a property of {label}; valid properties: {', '.join(sorted(kinds))}"
            )
        if kinds[property_name] and isinstance(value, str):
            try:
                return float(value)
            except ValueError:
                raise ToolFailure(f"property {property_name!r} of {label} is numeric; got {value!r}") from None
        return value

    def get_node_by_property(self, label, property_name, property_value):
        value = self._check(label, property_name, property_value)
        return [dict(n.properties) for n in nodes_by_property(self.graph, label, property_name, value)]

    def get_all_nearest_neighbors(self, label, property_name, property_value):
        value = self._check(label, property_name, property_value)
        centers = nodes_by_property(self.graph, label, property_name, value)
        if not centers:
            raise ToolFailure(f"no {label} node has {property_name} = {property_value!r}")
        out = []
        for c in centers:
            for nb in neighbors(self.graph, c.id):
                out.append(
                    {
                        "center_key": c.key,
                        "direction": nb.direction,
                        "relationship": {"type": nb.relationship.rel_type, "properties": dict(nb.relationship.properties)},
                        "node": {"label": nb.node.label, "properties": dict(nb.node.properties)},
                    }
                )
        return out

    def get_unique_property_values(self, property_name, entity_name, entity_type):
        values = unique_property_values(self.graph, property_name, entity_name, entity_type)
        return [{"values": v} for v in values]

    @staticmethod
    def think(thought):
        return str(thought)


def kg_registry(graph: PropertyGraph) -> ToolRegistry:
    t = _GraphTools(graph)
    lookup = {
        "label": {"type": "string", "description": "The node label/type."},
        "property_name": {"type": "string", "description": "The property to match on."},
        "property_value": _VALUE,
    }
    tools = [
        (ToolDescriptor("get_node_by_property", GET_NODE_BY_PROPERTY_DOC, _params(lookup)), t.get_node_by_property),
        (
            ToolDescriptor("get_all_nearest_neighbors", GET_ALL_NEAREST_NEIGHBORS_DOC, _params(lookup)),
            t.get_all_nearest_neighbors,
        ),
        (
            ToolDescriptor(
                "get_unique_property_values",
                GET_UNIQUE_PROPERTY_VALUES_DOC,
                _params(
                    {
                        "property_name": {"type": "string", "description": "The property to list values for."},
                        "entity_name": {"type": "string", "description": "Node label or relationship type."},
                        "entity_type": {"type": "string", "description": "'node' or 'relationship'."},
                    }
                ),
            ),
            t.get_unique_property_values,
        ),
        (
            ToolDescriptor(
                "think",
                THINK_DOC,
                _params({"thought": {"type": "string", "description": "Your reasoning, observation, or plan."}}),
                deterministic=False,
            ),
            t.think,
        ),
    ]
    return ToolRegistry({d.name: (d, h) for d, h in tools})


# -- maze tools ---------------------------------------------------------------

GET_POSSIBLE_NEXT_CELLS_DOC = '''Get the neighboring cells that are traversable from a given node.

This tool identifies all path cells directly adjacent (up, down, left, right)
to the specified node. It will:
1. Check if the given input node is a valid traversable cell (not a wall).
2. Mark the given input node as visited in the maze.
3. Return a list of adjacent cells that are paths (not walls).

Use this tool to explore the maze by checking which directions are open from your given position.

Args:
    node_id (str): The ID of the cell to explore.

Returns:
    str: A message listing the traversable neighboring cells,
        Returns an error if the input node is a wall or invalid.'''

GET_CONNECTED_PATH_DOC = '''Find the shortest connected path through all cells visited so far.

This tool automatically retrieves the complete list of cells you have visited
(in the order they were marked) and then finds the shortest valid connected path
from the first visited cell to the last visited cell using only those cells.
Each step in the path must be to an adjacent cell (up, down, left, right -
no diagonals or jumps).

Use-cases for this tool:
- Derive the final answer path after finishing your exploration
- Check whether the cells you have visited so far form a valid connected route
  from start to your current position

Returns:
    str: The shortest valid connected path found within the visited cells, or an
        error message if no valid path can be formed from the visited cells.

Example:
    get_connected_path()
    Returns: "Shortest path from cell 0 to cell 42: ['0', '1', '2', ..., '42']"'''


def maze_registry(state: mz.MazeState) -> ToolRegistry:
    def next_cells(node_id):
        out = mz.get_possible_next_cells(state, node_id)
        if isinstance(out, str):
            raise ToolFailure(out.removeprefix("Error: "))
        return [
            {
                "key": k,
                "euclidean_distance": state.cell(k).euclidean_distance,
                "marked": state.cell(k).marked,
                "mark_order": state.cell(k).mark_order,
            }
            for k in out
        ]

    def connected_path():
        out = mz.get_connected_path(state)
        if isinstance(out, str):
            raise ToolFailure(out.removeprefix("Error: "))
        return out

    tools = [
        (
            ToolDescriptor(
                "get_possible_next_cells",
                GET_POSSIBLE_NEXT_CELLS_DOC,
                _params({"node_id": {"type": "string", "description": "The ID of the cell to explore."}}),
            ),
            next_cells,
        ),
        (ToolDescriptor("get_connected_path", GET_CONNECTED_PATH_DOC, _params({})), connected_path),
    ]
    return ToolRegistry({d.name: (d, h) for d, h in tools})
