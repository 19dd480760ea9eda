"""Naive enumeration oracle.

Reads only the raw node and relationship lists (no adjacency lists, no
property index, no BFS) and enumerates relationship-distinct trails the
way a Cypher engine matches variable-length patterns.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterator

from .benchmark import TEMPLATES, GoldAnswer, InstantiationError, QueryInstance, Template, gold_answer, instantiate
from .generator import GeneratorConfig, derive_seed, generate_graph
from .graph import PropertyGraph

MAX_RELATIONSHIPS = 2000


class OracleGuardError(Exception):
    pass


def _trails(rels, start: int, max_len: int, used: tuple = ()) -> Iterator[tuple[int, tuple]]:
    """Yield (end node, relationship ids used) for every trail of length 1..max_len from start."""
    if max_len <= 0:
        return
    for r in rels:
        if r.source == start and r.id not in used:
            path = used + (r.id,)
            yield r.target, path
            yield from _trails(rels, r.target, max_len - 1, path)


def brute_force_gold(instance: QueryInstance, graph: PropertyGraph) -> GoldAnswer:
    nodes, rels = graph.nodes, graph.relationships
    if len(rels) > MAX_RELATIONSHIPS:
        raise OracleGuardError(f"brute-force oracle limited to {MAX_RELATIONSHIPS} relationships, got {len(rels)}")
    p, t = instance.params, instance.template
    label = {n.id: n.label for n in nodes}
    key = {n.id: n.properties["key"] for n in nodes}
    out: list[dict] = []

    if t is Template.NODE_COUNT:
        hits = {r.source for r in rels if label[r.source] == p["source_label"] and label[r.target] == p["target_label"]}
        if hits:
            out = [{"count": len(hits)}]
    elif t is Template.RELATIONSHIP_COUNT:
        n = sum(1 for r in rels if r.rel_type == p["rel_type_name"])
        if n:
            out = [{"count": n}]
    elif t is Template.NODE_WITH_MOST_RELATIONSHIPS:
        counts: dict[int, int] = {}
        for r in rels:
            if r.rel_type == p["rel_type_name"] and label[r.source] == p["source_node_label"]:
                counts[r.source] = counts.get(r.source, 0) + 1
        if counts:
            top = max(counts.values())
            out = [{"node_key": key[n], "rel_count": c} for n, c in counts.items() if c == top]
    elif t is Template.NODE_BY_PROPERTY:
        out = [
            {"node_key": key[n.id]}
            for n in nodes
            if n.label == p["node_label"] and n.properties.get(p["prop_name"]) == p["prop_value"]
        ]
    elif t is Template.RELATIONSHIP_BY_PROPERTY:
        out = [
            {"source_key": key[r.source], "target_key": key[r.target]}
            for r in rels
            if r.rel_type == p["rel_type_name"] and r.properties.get(p["prop_name"]) == p["prop_value"]
        ]
    elif t is Template.PATH_FINDING:
        for r1 in rels:
            for r2 in rels:
                if (
                    r1.id != r2.id
                    and r1.target == r2.source
                    and label[r1.source] == p["source_label"]
                    and label[r1.target] == p["middle_label"]
                    and label[r2.target] == p["target_label"]
                ):
                    out.append({"source_node_key": key[r1.source], "target_node_key": key[r2.target]})
    elif t is Template.VARIABLE_HOP_PATH:
        for a in nodes:
            if a.label != p["source_label"]:
                continue
            for end, used in _trails(rels, a.id, p["n"]):
                if label[end] != p["target_label"]:
                    continue
                if any(r.source == end and r.id not in used for r in rels):
                    out.append({"source_node_key": key[a.id], "target_node_key": key[end]})
    elif t is Template.PATH_FROM_SPECIFIC_NODE:
        for a in nodes:
            if a.label == p["source_label"] and key[a.id] == p["source_key"]:
                for end, _ in _trails(rels, a.id, p["n"]):
                    if label[end] == p["target_label"]:
                        out.append({"target_node_key": key[end]})
    elif t is Template.REMOTE_NODE_PROPERTY:
        for a in nodes:
            if a.label != p["source_label"] or key[a.id] != p["source_key"]:
                continue
            for end, used in _trails(rels, a.id, p["max_hops"]):
                if len(used) < 2 or label[end] != p["target_label"]:
                    continue
                if any(r.source == a.id and r.target == end for r in rels):
                    continue
                value = nodes[end].properties.get(p["prop_name"])
                if value is not None:
                    out.append({"value": value})
    elif t in (Template.COMPOSITIONAL_INTERSECTION, Template.NEGATION_WITH_CONNECTION):
        for a in nodes:
            if a.label != p["source_label"]:
                continue
            reached = {label[r.target] for r in rels if r.source == a.id}
            if t is Template.COMPOSITIONAL_INTERSECTION:
                ok = p["target1_label"] in reached and p["target2_label"] in reached
            else:
                ok = p["positive_target_label"] in reached and p["negative_target_label"] not in reached
            if ok:
                out.append({"node_key": key[a.id]})
    elif t is Template.NEGATION_ON_REL_PROPERTY:
        for r in rels:
            a = nodes[r.source]
            if (
                a.label == p["source_label"]
                and a.properties.get(p["source_prop_name"]) == p["source_prop_value"]
                and r.rel_type == p["rel_type_name"]
                and label[r.target] == p["target_label"]
                and p["prop_name"] in r.properties
                and r.properties[p["prop_name"]] != p["val2"]
            ):
                out.append({"node_key": key[a.id]})
    else:
        raise ValueError(f"unknown template {t!r}")
    return GoldAnswer.build(out, instance.mode, instance.fields)


@dataclass
class CrossCheck:
    graphs: int = 0
    instances: int = 0
    skipped: int = 0
    mismatches: list[dict] = field(default_factory=list)


def cross_check(
    graphs: int = 100, max_nodes: int = 30, seed: int = 0, per_template: int = 2, edge_density: float = 0.15
) -> CrossCheck:
    """Compare the indexed oracle with brute force on many small random graphs."""
    rng = random.Random(seed)
    out = CrossCheck()
    for g in range(graphs):
        config = GeneratorConfig(
            num_nodes=rng.randint(min(8, max_nodes), max_nodes),
            node_classes=rng.randint(2, 4),
            rel_classes=rng.randint(2, 3),
            avg_props_per_entity=2,
            values_per_property=3,
            edge_density=edge_density,
            seed=derive_seed(seed, "oracle", str(g)),
        )
        graph, _ = generate_graph(config)
        out.graphs += 1
        qrng = random.Random(config.seed)
        for t in TEMPLATES:
            for _ in range(per_template):
                try:
                    inst = instantiate(t, graph, qrng)
                except InstantiationError:
                    out.skipped += 1
                    continue
                out.instances += 1
                fast, slow = gold_answer(inst, graph), brute_force_gold(inst, graph)
                if fast.records != slow.records:
                    out.mismatches.append(
                        {"graph_seed": config.seed, "instance": inst.to_dict(), "gold": fast.to_dict(), "brute": slow.to_dict()}
                    )
    return out
