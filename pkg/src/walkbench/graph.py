"""In-memory directed property multigraph and the primitive queries built on it."""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

PropertyValue = Union[str, float]

OUTGOING = "outgoing"
INCOMING = "incoming"


class GraphError(Exception):
    """Raised for lookups against entities the graph does not contain."""


def check_value(value) -> PropertyValue:
    """Validate a property value and normalise numbers to float."""
    if isinstance(value, bool):
        raise TypeError("boolean property values are not supported")
    if isinstance(value, str):
        if not value:
            raise ValueError("text property values must be non-empty")
        return value
    if isinstance(value, (int, float)):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"numeric property values must be finite, got {value!r}")
        return value
    raise TypeError(f"unsupported property value type {type(value).__name__}")


def value_sort_key(value: PropertyValue):
    # numbers before text so mixed pools still sort deterministically
    return (1, value) if isinstance(value, str) else (0, value)


@dataclass(frozen=True)
class Node:
    id: int
    label: str
    properties: Mapping[str, PropertyValue]

    @property
    def key(self) -> str:
        return self.properties["key"]


@dataclass(frozen=True)
class Relationship:
    id: int
    rel_type: str
    source: int
    target: int
    properties: Mapping[str, PropertyValue]


@dataclass(frozen=True)
class Neighbor:
    relationship: Relationship
    node: Node
    direction: str


@dataclass(frozen=True)
class EntitySchema:
    """One node class or relationship class as it appears in the schema table."""

    kind: str  # "Node" or "Relationship"
    name: str
    pattern: str
    properties: tuple[str, ...]


def node_pattern(label: str) -> str:
    return f"(:{label})"


def rel_pattern(name: str, source: str, target: str) -> str:
    return f"(:{source})-[:{name}]->(:{target})"


class PropertyGraph:
    """Labeled directed multigraph with indexed node properties.

    Nodes must carry a graph-wide unique ``key`` property. The graph is
    treated as immutable once built; only the builder methods mutate it.
    """

    def __init__(self) -> None:
        self.nodes: list[Node] = []
        self.relationships: list[Relationship] = []
        self._out: list[list[int]] = []
        self._in: list[list[int]] = []
        self.key_index: dict[str, int] = {}
        self.property_index: dict[tuple[str, str, PropertyValue], set[int]] = defaultdict(set)
        self._by_label: dict[str, list[int]] = defaultdict(list)
        self._by_type: dict[str, list[int]] = defaultdict(list)

    # -- construction -------------------------------------------------

    def add_node(self, label: str, properties: Mapping[str, PropertyValue]) -> Node:
        props = {name: check_value(v) for name, v in properties.items()}
        key = props.get("key")
        if not isinstance(key, str):
            raise ValueError("every node needs a text 'key' property")
        if key in self.key_index:
            raise ValueError(f"duplicate node key {key!r}")
        node = Node(len(self.nodes), label, props)
        self.nodes.append(node)
        self._out.append([])
        self._in.append([])
        self.key_index[key] = node.id
        self._by_label[label].append(node.id)
        for name, v in props.items():
            self.property_index[(label, name, v)].add(node.id)
        return node

    def add_relationship(
        self, rel_type: str, source: int, target: int, properties: Mapping[str, PropertyValue] = ()
    ) -> Relationship:
        self.node(source)
        self.node(target)
        props = {name: check_value(v) for name, v in dict(properties).items()}
        rel = Relationship(len(self.relationships), rel_type, source, target, props)
        self.relationships.append(rel)
        self._out[source].append(rel.id)
        self._in[target].append(rel.id)
        self._by_type[rel_type].append(rel.id)
        return rel

    # -- lookups ------------------------------------------------------

    def node(self, node_id: int) -> Node:
        if not isinstance(node_id, int) or not 0 <= node_id < len(self.nodes):
            raise GraphError(f"node not found: {node_id!r}")
        return self.nodes[node_id]

    def node_by_key(self, key: str) -> Node:
        try:
            return self.nodes[self.key_index[key]]
        except KeyError:
            raise GraphError(f"node not found: key {key!r}") from None

    def labels(self) -> list[str]:
        return sorted(self._by_label)

    def rel_types(self) -> list[str]:
        return sorted(self._by_type)

    def nodes_with_label(self, label: str) -> list[Node]:
        return [self.nodes[i] for i in self._by_label.get(label, ())]

    def relationships_of_type(self, rel_type: str) -> list[Relationship]:
        return [self.relationships[i] for i in self._by_type.get(rel_type, ())]

    def out_edges(self, node_id: int) -> list[Relationship]:
        self.node(node_id)
        return [self.relationships[i] for i in self._out[node_id]]

    def in_edges(self, node_id: int) -> list[Relationship]:
        self.node(node_id)
        return [self.relationships[i] for i in self._in[node_id]]

    def out_degree(self, node_id: int) -> int:
        return len(self._out[node_id])

    def successors(self, node_id: int) -> list[int]:
        return [self.relationships[i].target for i in self._out[node_id]]

    def schema_entities(self) -> list[EntitySchema]:
        """Schema implied by the data: one entry per label and per (type, source, target) triple."""
        node_props: dict[str, set[str]] = defaultdict(set)
        for n in self.nodes:
            node_props[n.label].update(n.properties)
        rel_props: dict[tuple[str, str, str], set[str]] = defaultdict(set)
        for r in self.relationships:
            triple = (r.rel_type, self.nodes[r.source].label, self.nodes[r.target].label)
            rel_props[triple].update(r.properties)
        out = [
            EntitySchema("Node", label, node_pattern(label), tuple(sorted(node_props[label])))
            for label in sorted(node_props)
        ]
        out += [
            EntitySchema("Relationship", t, rel_pattern(t, s, d), tuple(sorted(rel_props[(t, s, d)])))
            for (t, s, d) in sorted(rel_props)
        ]
        return out

    # -- serialization ------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "nodes": [{"label": n.label, "properties": dict(n.properties)} for n in self.nodes],
            "relationships": [
                {
                    "type": r.rel_type,
                    "source": self.nodes[r.source].key,
                    "target": self.nodes[r.target].key,
                    "properties": dict(r.properties),
                }
                for r in self.relationships
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @classmethod
    def from_dict(cls, data: Mapping) -> "PropertyGraph":
        g = cls()
        for n in data["nodes"]:
            g.add_node(n["label"], n["properties"])
        for r in data["relationships"]:
            g.add_relationship(
                r["type"], g.key_index[r["source"]], g.key_index[r["target"]], r.get("properties", {})
            )
        return g

    @classmethod
    def from_json(cls, text: str) -> "PropertyGraph":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        """Line-oriented dump used for the no-tools prompt."""
        lines = []
        for n in sorted(self.nodes, key=lambda n: n.key):
            props = {k: v for k, v in n.properties.items() if k != "key"}
            lines.append(f"NODE {n.key} :{n.label} {format_props(props)}")
        keyed = sorted(
            self.relationships,
            key=lambda r: (self.nodes[r.source].key, self.nodes[r.target].key, r.rel_type, r.id),
        )
        for r in keyed:
            lines.append(
                f"REL :{r.rel_type} ({self.nodes[r.source].key})->({self.nodes[r.target].key}) "
                f"{format_props(r.properties)}"
            )
        return "\n".join(lines)


def format_props(props: Mapping[str, PropertyValue]) -> str:
    inner = ", ".join(f"{k}: {json.dumps(props[k])}" for k in sorted(props))
    return "{" + inner + "}"


# -- primitive queries ------------------------------------------------------


def nodes_by_property(graph: PropertyGraph, label: str, property_name: str, value) -> list[Node]:
    """Exact-match lookup; unknown labels or properties give an empty list."""
    try:
        value = check_value(value)
    except (TypeError, ValueError):
        return []
    ids = graph.property_index.get((label, property_name, value), ())
    return sorted((graph.nodes[i] for i in ids), key=lambda n: n.key)


def neighbors(graph: PropertyGraph, node_id: int) -> list[Neighbor]:
    """All incident relationships, outgoing first, each side ordered by relationship id."""
    out = [Neighbor(r, graph.nodes[r.target], OUTGOING) for r in graph.out_edges(node_id)]
    inc = [Neighbor(r, graph.nodes[r.source], INCOMING) for r in graph.in_edges(node_id)]
    return out + inc


def unique_property_values(
    graph: PropertyGraph, property_name: str, entity_name: str, entity_type: str
) -> list[PropertyValue]:
    kind = str(entity_type).strip().lower()
    if kind == "node":
        names = graph.labels()
        entities: Iterable = graph.nodes_with_label(entity_name)
    elif kind == "relationship":
        names = graph.rel_types()
        entities = graph.relationships_of_type(entity_name)
    else:
        raise GraphError(f"unknown entity_type {entity_type!r}; expected 'node' or 'relationship'")
    if entity_name not in names:
        raise GraphError(f"unknown {kind} {entity_name!r}; valid options: {', '.join(names)}")
    values = {e.properties[property_name] for e in entities if property_name in e.properties}
    return sorted(values, key=value_sort_key)


def reachable_within(
    graph: PropertyGraph, start: int, min_hops: int, max_hops: int, target_label: str | None = None
) -> set[int]:
    """Nodes reachable from ``start`` by a directed walk whose length lies in [min_hops, max_hops].

    Levels are expanded breadth-first over outgoing edges of any type; a node
    may appear on several levels.
    """
    graph.node(start)
    if not 1 <= min_hops <= max_hops:
        raise ValueError(f"need 1 <= min_hops <= max_hops, got {min_hops}..{max_hops}")
    frontier = {start}
    found: set[int] = set()
    for depth in range(1, max_hops + 1):
        frontier = {t for n in frontier for t in graph.successors(n)}
        if depth >= min_hops:
            found |= frontier
        if not frontier:
            break
    if target_label is not None:
        found = {n for n in found if graph.nodes[n].label == target_label}
    return found


# -- schema table -----------------------------------------------------------


@dataclass(frozen=True)
class SchemaRow:
    index: int
    entity_type: str
    entity_name: str
    pattern: str
    property_name: str


HEADER = ("#", "Entity Type", "Entity Name", "Cypher Pattern", "Property")


@dataclass
class SchemaTable:
    rows: list[SchemaRow] = field(default_factory=list)

    def to_text(self) -> str:
        lines = [" | ".join(HEADER)]
        for r in self.rows:
            lines.append(f"{r.index} | {r.entity_type} | {r.entity_name} | {r.pattern} | {r.property_name}")
        return "\n".join(lines)


def render_schema(source) -> SchemaTable:
    """Build the five-column schema table from a graph or a blueprint.

    ``source`` is anything with a ``schema_entities()`` method. Entities
    without properties still get one row, with an empty property column.
    """
    rows: list[SchemaRow] = []
    for ent in source.schema_entities():
        for prop in sorted(ent.properties) or [""]:
            rows.append(SchemaRow(len(rows), ent.kind, ent.name, ent.pattern, prop))
    return SchemaTable(rows)
