"""Seeded generation of random property graphs with non-word labels."""

from __future__ import annotations

import dataclasses
import hashlib
import math
import os
import random
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Iterator, Mapping

from .graph import EntitySchema, PropertyGraph, PropertyValue, node_pattern, rel_pattern

DICTIONARY_ENV = "WALKBENCH_DICTIONARY"
MAX_LABEL_TRIES = 10_000
LETTERS = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class GeneratorConfig:
    num_nodes: int = 100
    node_classes: int = 4
    rel_classes: int = 2
    avg_props_per_entity: int = 3
    values_per_property: int = 5
    edge_density: float = 0.04
    label_length: tuple[int, int] = (4, 8)
    numeric_property_fraction: float = 0.25
    seed: int = 0

    def __post_init__(self):
        for name in ("num_nodes", "node_classes", "rel_classes", "avg_props_per_entity", "values_per_property"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.node_classes > self.num_nodes:
            raise ValueError("node_classes cannot exceed num_nodes")
        if not 0.0 <= self.edge_density <= 1.0:
            raise ValueError("edge_density must lie in [0, 1]")
        if not 0.0 <= self.numeric_property_fraction <= 1.0:
            raise ValueError("numeric_property_fraction must lie in [0, 1]")
        lo, hi = self.label_length
        if not 1 <= lo <= hi:
            raise ValueError("label_length must be a non-empty range of positive lengths")
        object.__setattr__(self, "label_length", (int(lo), int(hi)))

    def replace(self, **changes) -> "GeneratorConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, data: Mapping) -> "GeneratorConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown generator options: {', '.join(sorted(unknown))}")
        kwargs = dict(data)
        if "label_length" in kwargs:
            kwargs["label_length"] = tuple(kwargs["label_length"])
        return cls(**kwargs)


_SCALING = dict(node_classes=8, rel_classes=4, avg_props_per_entity=6, values_per_property=10)

PRESETS: dict[str, GeneratorConfig] = {
    "paper-100": GeneratorConfig(num_nodes=100),
    "paper-150": GeneratorConfig(num_nodes=150, **_SCALING),
    "paper-200": GeneratorConfig(num_nodes=200, **_SCALING),
    "paper-500": GeneratorConfig(num_nodes=500, **_SCALING),
}


def preset(name: str, **overrides) -> GeneratorConfig:
    try:
        base = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    return base.replace(**overrides)


# -- dictionary -------------------------------------------------------------


class Dictionary:
    """Case-insensitive English word set."""

    def __init__(self, words) -> None:
        self.words = frozenset(w.strip().lower() for w in words if w.strip())
        if not self.words:
            raise ValueError("dictionary is empty")

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.words

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def from_file(cls, path) -> "Dictionary":
        with open(path, encoding="utf-8") as fh:
            return cls(fh)


@lru_cache(maxsize=4)
def _load(path: str | None) -> Dictionary:
    if path:
        return Dictionary.from_file(path)
    text = resources.files("walkbench").joinpath("data/words.txt").read_text(encoding="utf-8")
    return Dictionary(text.splitlines())


def default_dictionary() -> Dictionary:
    return _load(os.environ.get(DICTIONARY_ENV))


# -- seeding and labels -----------------------------------------------------


def derive_seed(root: int, *labels: str) -> int:
    """Child seed for a named stage; stages never share or perturb each other's streams."""
    h = hashlib.sha256(str(root).encode())
    for label in labels:
        h.update(b"/" + label.encode())
    return int.from_bytes(h.digest()[:8], "big")


def random_label(rng: random.Random, length_range=(4, 8), dictionary: Dictionary | None = None) -> str:
    """Random lowercase string rejected until it is not a dictionary word."""
    dictionary = dictionary if dictionary is not None else default_dictionary()
    lo, hi = length_range
    for _ in range(MAX_LABEL_TRIES):
        word = "".join(rng.choice(LETTERS) for _ in range(rng.randint(lo, hi)))
        if word not in dictionary:
            return word
    raise RuntimeError(f"no non-word label found after {MAX_LABEL_TRIES} attempts")


# -- blueprint --------------------------------------------------------------


@dataclass(frozen=True)
class PropertySpec:
    name: str
    pool: tuple[PropertyValue, ...]
    numeric: bool


@dataclass(frozen=True)
class NodeClass:
    label: str
    properties: tuple[PropertySpec, ...]


@dataclass(frozen=True)
class RelClass:
    name: str
    source: str
    target: str
    properties: tuple[PropertySpec, ...]


@dataclass(frozen=True)
class SchemaBlueprint:
    node_classes: tuple[NodeClass, ...]
    rel_classes: tuple[RelClass, ...] = field(default=())

    def schema_entities(self) -> list[EntitySchema]:
        out = [
            EntitySchema("Node", c.label, node_pattern(c.label), tuple(sorted([p.name for p in c.properties] + ["key"])))
            for c in self.node_classes
        ]
        out += [
            EntitySchema(
                "Relationship", r.name, rel_pattern(r.name, r.source, r.target), tuple(sorted(p.name for p in r.properties))
            )
            for r in self.rel_classes
        ]
        return out

    def node_class(self, label: str) -> NodeClass:
        for c in self.node_classes:
            if c.label == label:
                return c
        raise KeyError(label)

    def rel_class(self, name: str) -> RelClass:
        for r in self.rel_classes:
            if r.name == name:
                return r
        raise KeyError(name)

    def property_spec(self, entity: str, prop: str) -> PropertySpec | None:
        for c in self.node_classes:
            if c.label == entity:
                return next((p for p in c.properties if p.name == prop), None)
        for r in self.rel_classes:
            if r.name == entity:
                return next((p for p in r.properties if p.name == prop), None)
        return None

    def to_dict(self) -> dict:
        def props(specs):
            return [{"name": p.name, "numeric": p.numeric, "pool": list(p.pool)} for p in specs]

        return {
            "node_classes": [{"label": c.label, "properties": props(c.properties)} for c in self.node_classes],
            "rel_classes": [
                {"name": r.name, "source": r.source, "target": r.target, "properties": props(r.properties)}
                for r in self.rel_classes
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "SchemaBlueprint":
        def props(items):
            return tuple(PropertySpec(p["name"], tuple(p["pool"]), p["numeric"]) for p in items)

        return cls(
            tuple(NodeClass(c["label"], props(c["properties"])) for c in data["node_classes"]),
            tuple(RelClass(r["name"], r["source"], r["target"], props(r["properties"])) for r in data["rel_classes"]),
        )


class _Namer:
    """Hands out non-word names that are unique across the whole schema."""

    def __init__(self, rng: random.Random, length_range, dictionary: Dictionary) -> None:
        self.rng = rng
        self.length_range = length_range
        self.dictionary = dictionary
        self.used = {"key"}

    def __call__(self) -> str:
        while True:
            name = random_label(self.rng, self.length_range, self.dictionary)
            if name not in self.used:
                self.used.add(name)
                return name


def _value_pool(rng: random.Random, config: GeneratorConfig, numeric: bool, dictionary: Dictionary) -> tuple:
    k = config.values_per_property
    if numeric:
        return tuple(v / 100 for v in rng.sample(range(100_000), k))
    pool: list[str] = []
    while len(pool) < k:
        word = random_label(rng, config.label_length, dictionary)
        if word not in pool:
            pool.append(word)
    return tuple(pool)


def _prop_count(rng: random.Random, avg: int) -> int:
    return max(1, rng.choice((avg - 1, avg, avg + 1)))


def schema_supports_all_templates(pairs: list[tuple[str, str]]) -> bool:
    """True when some class fans out to two target labels and some two classes chain."""
    targets: dict[str, set[str]] = {}
    for src, dst in pairs:
        targets.setdefault(src, set()).add(dst)
    fan_out = any(len(ds) >= 2 for ds in targets.values())
    chain = any(dst in targets for _, dst in pairs)
    return fan_out and chain


def _endpoints(rng: random.Random, labels: list[str], count: int) -> list[tuple[str, str]]:
    # Rejection keeps the draw uniform over feasible assignments. Feasibility
    # needs two node classes and two relationship classes.
    feasible = len(labels) >= 2 and count >= 2
    for _ in range(MAX_LABEL_TRIES):
        pairs = [(rng.choice(labels), rng.choice(labels)) for _ in range(count)]
        if not feasible or schema_supports_all_templates(pairs):
            return pairs
    raise RuntimeError("could not draw a relationship layout supporting every template")


def generate_blueprint(
    config: GeneratorConfig, rng: random.Random, dictionary: Dictionary | None = None
) -> SchemaBlueprint:
    """Node and relationship classes with fresh property keys and value pools.

    Relationship endpoints are drawn uniformly, conditioned (when there are
    at least two node and two relationship classes) on the layout admitting
    both a fan-out to two target classes and a two-hop class chain, so that
    every query template can be posed.
    """
    dictionary = dictionary if dictionary is not None else default_dictionary()
    namer = _Namer(rng, config.label_length, dictionary)

    def specs() -> tuple[PropertySpec, ...]:
        out = []
        for _ in range(_prop_count(rng, config.avg_props_per_entity)):
            name = namer()
            numeric = rng.random() < config.numeric_property_fraction
            out.append(PropertySpec(name, _value_pool(rng, config, numeric, dictionary), numeric))
        return tuple(out)

    nodes = tuple(NodeClass(namer().capitalize(), specs()) for _ in range(config.node_classes))
    pairs = _endpoints(rng, [c.label for c in nodes], config.rel_classes)
    rels = tuple(RelClass(namer().upper(), src, dst, specs()) for src, dst in pairs)
    return SchemaBlueprint(nodes, rels)


# -- graph ------------------------------------------------------------------


def bernoulli_indices(rng: random.Random, m: int, p: float) -> Iterator[int]:
    """Indices in range(m) each selected independently with probability p.

    Gaps are drawn from the geometric distribution, so the cost is
    proportional to the number of successes rather than to m.
    """
    if p <= 0.0 or m <= 0:
        return
    if p >= 1.0:
        yield from range(m)
        return
    log_q = math.log1p(-p)
    i = -1
    while True:
        i += int(math.log1p(-rng.random()) / log_q) + 1
        if i >= m:
            return
        yield i


def generate_graph(
    config: GeneratorConfig, dictionary: Dictionary | None = None
) -> tuple[PropertyGraph, SchemaBlueprint]:
    dictionary = dictionary if dictionary is not None else default_dictionary()
    seed = config.seed
    blueprint = generate_blueprint(config, random.Random(derive_seed(seed, "blueprint")), dictionary)

    structure = random.Random(derive_seed(seed, "structure"))
    classes = [structure.randrange(config.node_classes) for _ in range(config.num_nodes)]
    members: dict[str, list[int]] = {c.label: [] for c in blueprint.node_classes}
    for node_id, c in enumerate(classes):
        members[blueprint.node_classes[c].label].append(node_id)

    edges: list[tuple[RelClass, int, int]] = []
    for rc in blueprint.rel_classes:
        sources, targets = members[rc.source], members[rc.target]
        for i in bernoulli_indices(structure, len(sources) * len(targets), config.edge_density):
            s, t = sources[i // len(targets)], targets[i % len(targets)]
            if s != t:
                edges.append((rc, s, t))

    keys_rng = random.Random(derive_seed(seed, "keys"))
    keys: list[str] = []
    seen: set[str] = set()
    while len(keys) < config.num_nodes:
        k = random_label(keys_rng, config.label_length, dictionary)
        if k not in seen:
            seen.add(k)
            keys.append(k)

    values = random.Random(derive_seed(seed, "properties"))
    graph = PropertyGraph()
    for node_id, c in enumerate(classes):
        nc = blueprint.node_classes[c]
        props = {p.name: values.choice(p.pool) for p in nc.properties}
        props["key"] = keys[node_id]
        graph.add_node(nc.label, props)
    for rc, s, t in edges:
        graph.add_relationship(rc.name, s, t, {p.name: values.choice(p.pool) for p in rc.properties})
    return graph, blueprint
