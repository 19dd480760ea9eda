"""The twelve query templates: instantiation, question text and the native gold oracle."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum

from .graph import PropertyGraph, nodes_by_property, reachable_within, unique_property_values

EXACT_SET = "exact-set"
SINGLE_COUNT = "single-count"
ARGMAX = "argmax-membership"
VALUE = "value-membership"


class Template(str, Enum):
    NODE_COUNT = "node_count"
    RELATIONSHIP_COUNT = "relationship_count"
    NODE_WITH_MOST_RELATIONSHIPS = "node_with_most_relationships"
    NODE_BY_PROPERTY = "node_by_property"
    RELATIONSHIP_BY_PROPERTY = "relationship_by_property"
    PATH_FINDING = "path_finding"
    VARIABLE_HOP_PATH = "variable_hop_path"
    PATH_FROM_SPECIFIC_NODE = "path_from_specific_node"
    REMOTE_NODE_PROPERTY = "remote_node_property"
    COMPOSITIONAL_INTERSECTION = "compositional_intersection"
    NEGATION_WITH_CONNECTION = "negation_with_connection"
    NEGATION_ON_REL_PROPERTY = "negation_on_rel_property"


@dataclass(frozen=True)
class TemplateSpec:
    display: str
    category: str
    instruction: str
    output_schema: str
    fields: tuple[str, ...]
    mode: str


RETRIEVAL = "Retrieval & Aggregation"
TRAVERSAL = "Path & Relational Traversal"
LOGIC = "Complex Logical Composition"

_COUNT = '[{"count": "number"}]'
_NODE_KEY = '[{"node_key": "string"}]'
_PAIR = '[{"source_node_key": "string", "target_node_key": "string"}]'

SPECS: dict[Template, TemplateSpec] = {
    Template.NODE_COUNT: TemplateSpec(
        "Node Count", RETRIEVAL,
        'Count the number of "{source_label}" nodes that are connected to any "{target_label}" node. '
        "Return ONLY the output with the count in JSON format: {output_schema}.",
        _COUNT, ("count",), SINGLE_COUNT,
    ),
    Template.RELATIONSHIP_COUNT: TemplateSpec(
        "Relationship Count", RETRIEVAL,
        'How many relationships of type "{rel_type_name}" exist? '
        "Return ONLY the output with the count in JSON format: {output_schema}.",
        _COUNT, ("count",), SINGLE_COUNT,
    ),
    Template.NODE_WITH_MOST_RELATIONSHIPS: TemplateSpec(
        "Node with Most Relationships", RETRIEVAL,
        'Which "{source_node_label}" node has the most outgoing "{rel_type_name}" relationships? '
        "Return ONLY ONE answer in JSON format as per the schema: {output_schema}.",
        '[{"node_key": "string", "rel_count": "number"}]', ("node_key", "rel_count"), ARGMAX,
    ),
    Template.NODE_BY_PROPERTY: TemplateSpec(
        "Node by Property", RETRIEVAL,
        'Find all "{node_label}" nodes where "{prop_name}" is "{prop_value}". '
        "Return results in JSON format according to the schema: {output_schema}.",
        _NODE_KEY, ("node_key",), EXACT_SET,
    ),
    Template.RELATIONSHIP_BY_PROPERTY: TemplateSpec(
        "Relationship by Property", RETRIEVAL,
        'Find all "{rel_type_name}" relationships where "{prop_name}" is "{prop_value}". '
        "Return results in JSON format based on the schema: {output_schema}.",
        '[{"source_key": "string", "target_key": "string"}]', ("source_key", "target_key"), EXACT_SET,
    ),
    Template.PATH_FINDING: TemplateSpec(
        "Path Finding", TRAVERSAL,
        'Find all paths from "{source_label}" to "{target_label}" through "{middle_label}". '
        "Return results in JSON format as per schema: {output_schema}.",
        _PAIR, ("source_node_key", "target_node_key"), EXACT_SET,
    ),
    Template.VARIABLE_HOP_PATH: TemplateSpec(
        "Variable Hop Path", TRAVERSAL,
        'Find all paths where a "{source_label}" node reaches a "{target_label}" node in 1 to {n} steps, '
        "then takes one more step to any other node. Return the keys of the source and target nodes "
        "in JSON format as per schema: {output_schema}.",
        _PAIR, ("source_node_key", "target_node_key"), EXACT_SET,
    ),
    Template.PATH_FROM_SPECIFIC_NODE: TemplateSpec(
        "Path from Specific Node", TRAVERSAL,
        'Find all paths of 1 to {n} steps from the node with key "{source_key}" to any node of type '
        '"{target_label}". Return the keys of the target nodes found in JSON format: {output_schema}.',
        '[{"target_node_key": "string"}]', ("target_node_key",), EXACT_SET,
    ),
    Template.REMOTE_NODE_PROPERTY: TemplateSpec(
        "Remote Node Property", TRAVERSAL,
        'From a "{source_label}" node with key "{source_key}" find a "{target_label}" node that is not a '
        'direct neighbor but is reachable in 2 or more hops, and return its "{prop_name}". ANY valid '
        "node's property will be accepted. Return ONLY ONE answer in JSON format: {output_schema}.",
        '[{{"value": "{prop_type}"}}]', ("value",), VALUE,
    ),
    Template.COMPOSITIONAL_INTERSECTION: TemplateSpec(
        "Compositional Intersection", LOGIC,
        'Find all nodes of type "{source_label}" that have a relationship to at least one "{target1_label}" '
        'node AND at least one "{target2_label}" node. Return the keys of these "{source_label}" nodes '
        "in JSON in this format: {output_schema}.",
        _NODE_KEY, ("node_key",), EXACT_SET,
    ),
    Template.NEGATION_WITH_CONNECTION: TemplateSpec(
        "Negation with Connection", LOGIC,
        'Find all nodes of type "{source_label}" that are connected to at least one "{positive_target_label}" '
        'node AND are not connected to any "{negative_target_label}" node. Return their keys in JSON in '
        "this format: {output_schema}.",
        _NODE_KEY, ("node_key",), EXACT_SET,
    ),
    Template.NEGATION_ON_REL_PROPERTY: TemplateSpec(
        "Negation on Rel Property", LOGIC,
        'Find all "{source_label}" nodes where "{source_prop_name}" is "{source_prop_value}". From those, '
        'find the ones connected to a "{target_label}" node by a "{rel_type_name}" relationship where the '
        "relationship's \"{prop_name}\" is not \"{val2}\". Return the keys of the source nodes in JSON in "
        "this format: {output_schema}.",
        _NODE_KEY, ("node_key",), EXACT_SET,
    ),
}

TEMPLATES: tuple[Template, ...] = tuple(Template)


@dataclass(frozen=True)
class BenchmarkConfig:
    hop_bound: int = 3
    max_hops: int = 3
    max_attempts: int = 100


class InstantiationError(Exception):
    pass


def format_value(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


@dataclass(frozen=True)
class QueryInstance:
    template: Template
    params: dict
    question_text: str
    output_schema: str

    @property
    def spec(self) -> TemplateSpec:
        return SPECS[self.template]

    @property
    def fields(self) -> tuple[str, ...]:
        return self.spec.fields

    @property
    def mode(self) -> str:
        return self.spec.mode

    def to_dict(self) -> dict:
        return {
            "template": self.template.value,
            "params": self.params,
            "question_text": self.question_text,
            "output_schema": self.output_schema,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "QueryInstance":
        return cls(Template(data["template"]), dict(data["params"]), data["question_text"], data["output_schema"])


def make_instance(template: Template, params: dict) -> QueryInstance:
    """Render question text and output schema for a parameter set."""
    template = Template(template)
    spec = SPECS[template]
    schema = spec.output_schema.format(**params) if template is Template.REMOTE_NODE_PROPERTY else spec.output_schema
    shown = {k: format_value(v) for k, v in params.items()}
    return QueryInstance(template, dict(params), spec.instruction.format(output_schema=schema, **shown), schema)


def _record_key(rec: dict) -> str:
    return json.dumps(rec, sort_keys=True)


@dataclass(frozen=True)
class GoldAnswer:
    records: tuple[dict, ...]
    mode: str
    fields: tuple[str, ...] = field(default=())

    @classmethod
    def build(cls, records, mode: str, fields) -> "GoldAnswer":
        unique = {_record_key(r): r for r in records}
        return cls(tuple(unique[k] for k in sorted(unique)), mode, tuple(fields))

    def __bool__(self) -> bool:
        return bool(self.records)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "fields": list(self.fields), "records": list(self.records)}

    @classmethod
    def from_dict(cls, data: dict) -> "GoldAnswer":
        return cls(tuple(data["records"]), data["mode"], tuple(data["fields"]))


# -- native oracle --------------------------------------------------------------


def _labelled(graph: PropertyGraph, label: str):
    return graph.nodes_with_label(label)


def _successor_labels(graph: PropertyGraph, node_id: int) -> set[str]:
    return {graph.nodes[t].label for t in graph.successors(node_id)}


def _gold_records(inst: QueryInstance, g: PropertyGraph) -> list[dict]:
    p = inst.params
    t = inst.template
    if t is Template.NODE_COUNT:
        n = sum(1 for a in _labelled(g, p["source_label"]) if p["target_label"] in _successor_labels(g, a.id))
        return [{"count": n}] if n else []
    if t is Template.RELATIONSHIP_COUNT:
        n = len(g.relationships_of_type(p["rel_type_name"]))
        return [{"count": n}] if n else []
    if t is Template.NODE_WITH_MOST_RELATIONSHIPS:
        counts = {}
        for a in _labelled(g, p["source_node_label"]):
            c = sum(1 for r in g.out_edges(a.id) if r.rel_type == p["rel_type_name"])
            if c:
                counts[a.key] = c
        if not counts:
            return []
        best = max(counts.values())
        return [{"node_key": k, "rel_count": c} for k, c in counts.items() if c == best]
    if t is Template.NODE_BY_PROPERTY:
        return [{"node_key": n.key} for n in nodes_by_property(g, p["node_label"], p["prop_name"], p["prop_value"])]
    if t is Template.RELATIONSHIP_BY_PROPERTY:
        return [
            {"source_key": g.nodes[r.source].key, "target_key": g.nodes[r.target].key}
            for r in g.relationships_of_type(p["rel_type_name"])
            if r.properties.get(p["prop_name"]) == p["prop_value"]
        ]
    if t is Template.PATH_FINDING:
        out = []
        for b in _labelled(g, p["middle_label"]):
            ins = [r for r in g.in_edges(b.id) if g.nodes[r.source].label == p["source_label"]]
            outs = [r for r in g.out_edges(b.id) if g.nodes[r.target].label == p["target_label"]]
            for r1 in ins:
                for r2 in outs:
                    # the two hops must be distinct relationships (only matters for self-loops)
                    if r1.id != r2.id:
                        out.append({"source_node_key": g.nodes[r1.source].key, "target_node_key": g.nodes[r2.target].key})
        return out
    if t is Template.VARIABLE_HOP_PATH:
        out = []
        for a in _labelled(g, p["source_label"]):
            for b in reachable_within(g, a.id, 1, p["n"], p["target_label"]):
                # a shortest route to b != a never uses b's out-edges; a closed route
                # back to a consumes one of a's out-edges, so a needs a second one
                need = 2 if b == a.id else 1
                if g.out_degree(b) >= need:
                    out.append({"source_node_key": a.key, "target_node_key": g.nodes[b].key})
        return out
    if t is Template.PATH_FROM_SPECIFIC_NODE:
        src = g.node_by_key(p["source_key"])
        if src.label != p["source_label"]:
            return []
        return [{"target_node_key": g.nodes[b].key} for b in reachable_within(g, src.id, 1, p["n"], p["target_label"])]
    if t is Template.REMOTE_NODE_PROPERTY:
        src = g.node_by_key(p["source_key"])
        if src.label != p["source_label"]:
            return []
        direct = set(g.successors(src.id))
        far = reachable_within(g, src.id, 2, p["max_hops"], p["target_label"]) - direct
        return [{"value": g.nodes[b].properties[p["prop_name"]]} for b in far if p["prop_name"] in g.nodes[b].properties]
    if t is Template.COMPOSITIONAL_INTERSECTION:
        return [
            {"node_key": a.key}
            for a in _labelled(g, p["source_label"])
            if {p["target1_label"], p["target2_label"]} <= _successor_labels(g, a.id)
        ]
    if t is Template.NEGATION_WITH_CONNECTION:
        out = []
        for a in _labelled(g, p["source_label"]):
            labels = _successor_labels(g, a.id)
            if p["positive_target_label"] in labels and p["negative_target_label"] not in labels:
                out.append({"node_key": a.key})
        return out
    if t is Template.NEGATION_ON_REL_PROPERTY:
        out = []
        for a in nodes_by_property(g, p["source_label"], p["source_prop_name"], p["source_prop_value"]):
            for r in g.out_edges(a.id):
                if (
                    r.rel_type == p["rel_type_name"]
                    and g.nodes[r.target].label == p["target_label"]
                    and p["prop_name"] in r.properties
                    and r.properties[p["prop_name"]] != p["val2"]
                ):
                    out.append({"node_key": a.key})
        return out
    raise ValueError(f"unknown template {t!r}")


def gold_answer(instance: QueryInstance, graph: PropertyGraph) -> GoldAnswer:
    """Evaluate the template's reference query with the graph's indexes."""
    return GoldAnswer.build(_gold_records(instance, graph), instance.mode, instance.fields)


# -- instantiation ----------------------------------------------------------------


def _triples(g: PropertyGraph) -> list[tuple[str, str, str]]:
    return sorted({(r.rel_type, g.nodes[r.source].label, g.nodes[r.target].label) for r in g.relationships})


def _non_key(props) -> list[str]:
    names = sorted(k for k in props if k != "key")
    return names or ["key"]


def _label_props(g: PropertyGraph, label: str) -> dict[str, bool]:
    """Property names of a label mapped to whether every value seen is numeric."""
    out: dict[str, bool] = {}
    for n in g.nodes_with_label(label):
        for k, v in n.properties.items():
            out[k] = out.get(k, True) and not isinstance(v, str)
    return out


def _sample(t: Template, g: PropertyGraph, rng: random.Random, cfg: BenchmarkConfig) -> dict | None:
    triples = _triples(g)
    labels = g.labels()
    if not labels:
        return None
    if t is Template.NODE_COUNT:
        if not triples:
            return None
        s, d = rng.choice(sorted({(s, d) for _, s, d in triples}))
        return {"source_label": s, "target_label": d}
    if t is Template.RELATIONSHIP_COUNT:
        types = g.rel_types()
        return {"rel_type_name": rng.choice(types)} if types else None
    if t is Template.NODE_WITH_MOST_RELATIONSHIPS:
        if not triples:
            return None
        r, s, _ = rng.choice(triples)
        return {"source_node_label": s, "rel_type_name": r}
    if t is Template.NODE_BY_PROPERTY:
        label = rng.choice(labels)
        node = rng.choice(g.nodes_with_label(label))
        prop = rng.choice(_non_key(node.properties))
        return {"node_label": label, "prop_name": prop, "prop_value": node.properties[prop]}
    if t is Template.RELATIONSHIP_BY_PROPERTY:
        types = g.rel_types()
        if not types:
            return None
        r_type = rng.choice(types)
        rel = rng.choice(g.relationships_of_type(r_type))
        if not rel.properties:
            return None
        prop = rng.choice(sorted(rel.properties))
        return {"rel_type_name": r_type, "prop_name": prop, "prop_value": rel.properties[prop]}
    if t is Template.PATH_FINDING:
        chains = sorted({(s, m, d) for _, s, m in triples for _, m2, d in triples if m2 == m})
        if not chains:
            return None
        s, m, d = rng.choice(chains)
        return {"source_label": s, "middle_label": m, "target_label": d}
    if t is Template.VARIABLE_HOP_PATH:
        # the target must be able to take one more step, so it has to be a source class itself
        sources = sorted({s for _, s, _ in triples})
        if not sources:
            return None
        return {"source_label": rng.choice(sources), "target_label": rng.choice(sources), "n": cfg.hop_bound}
    if t in (Template.PATH_FROM_SPECIFIC_NODE, Template.REMOTE_NODE_PROPERTY):
        starts = [n for n in g.nodes if g.out_degree(n.id)]
        if not starts:
            return None
        src = rng.choice(starts)
        target = rng.choice(sorted({d for _, _, d in triples}))
        if t is Template.PATH_FROM_SPECIFIC_NODE:
            return {"source_label": src.label, "source_key": src.key, "target_label": target, "n": cfg.hop_bound}
        kinds = _label_props(g, target)
        prop = rng.choice(_non_key(kinds))
        return {
            "source_label": src.label,
            "source_key": src.key,
            "target_label": target,
            "prop_name": prop,
            "prop_type": "number" if kinds[prop] else "string",
            "max_hops": cfg.max_hops,
        }
    if t is Template.COMPOSITIONAL_INTERSECTION:
        targets: dict[str, set[str]] = {}
        for _, s, d in triples:
            targets.setdefault(s, set()).add(d)
        sources = sorted(s for s, ds in targets.items() if len(ds) >= 2)
        if not sources:
            return None
        s = rng.choice(sources)
        t1, t2 = rng.sample(sorted(targets[s]), 2)
        return {"source_label": s, "target1_label": t1, "target2_label": t2}
    if t is Template.NEGATION_WITH_CONNECTION:
        if not triples or len(labels) < 2:
            return None
        _, s, pos = rng.choice(triples)
        neg = rng.choice([x for x in labels if x != pos])
        return {"source_label": s, "positive_target_label": pos, "negative_target_label": neg}
    if t is Template.NEGATION_ON_REL_PROPERTY:
        rels = [r for r in g.relationships if r.properties]
        if not rels:
            return None
        rel = rng.choice(rels)
        a = g.nodes[rel.source]
        sprop = rng.choice(_non_key(a.properties))
        prop = rng.choice(sorted(rel.properties))
        val2 = rng.choice(unique_property_values(g, prop, rel.rel_type, "relationship"))
        return {
            "source_label": a.label,
            "source_prop_name": sprop,
            "source_prop_value": a.properties[sprop],
            "target_label": g.nodes[rel.target].label,
            "rel_type_name": rel.rel_type,
            "prop_name": prop,
            "val2": val2,
        }
    raise ValueError(f"unknown template {t!r}")


def instantiate(
    template: Template, graph: PropertyGraph, rng: random.Random, config: BenchmarkConfig = BenchmarkConfig()
) -> QueryInstance:
    """Sample parameters from the graph until the gold answer is non-empty."""
    template = Template(template)
    for _ in range(config.max_attempts):
        params = _sample(template, graph, rng, config)
        if params is None:
            continue
        inst = make_instance(template, params)
        if gold_answer(inst, graph):
            return inst
    raise InstantiationError(f"template {template.value} not instantiable on this graph")
