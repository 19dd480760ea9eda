import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walkbench.benchmark import (
    ARGMAX,
    EXACT_SET,
    SINGLE_COUNT,
    SPECS,
    TEMPLATES,
    VALUE,
    BenchmarkConfig,
    GoldAnswer,
    InstantiationError,
    Template,
    gold_answer,
    instantiate,
    make_instance,
)
from walkbench.brute import MAX_RELATIONSHIPS, OracleGuardError, brute_force_gold
from walkbench.generator import GeneratorConfig, generate_graph, preset
from walkbench.graph import PropertyGraph

from conftest import build


def records(t, graph, **params):
    return list(gold_answer(make_instance(t, params), graph).records)


def test_twelve_templates_in_three_categories():
    assert len(TEMPLATES) == 12
    cats = [SPECS[t].category for t in TEMPLATES]
    assert cats.count("Retrieval & Aggregation") == 5
    assert cats.count("Path & Relational Traversal") == 4
    assert cats.count("Complex Logical Composition") == 3


def test_question_text_embeds_schema():
    inst = make_instance(Template.NODE_COUNT, {"source_label": "Cevaz", "target_label": "Egodpw"})
    assert inst.question_text == (
        'Count the number of "Cevaz" nodes that are connected to any "Egodpw" node. '
        'Return ONLY the output with the count in JSON format: [{"count": "number"}].'
    )
    remote = make_instance(
        Template.REMOTE_NODE_PROPERTY,
        {"source_label": "A", "source_key": "kk", "target_label": "B", "prop_name": "p", "prop_type": "number", "max_hops": 3},
    )
    assert remote.output_schema == '[{"value": "number"}]'
    assert remote.question_text.endswith('Return ONLY ONE answer in JSON format: [{"value": "number"}].')


def test_integral_numbers_render_without_decimal():
    inst = make_instance(Template.NODE_BY_PROPERTY, {"node_label": "A", "prop_name": "p", "prop_value": 12.0})
    assert '"p" is "12"' in inst.question_text


def test_node_count_example():
    g = build([("a1", "S", {}), ("b1", "T", {}), ("a2", "S", {})], [("R", "a1", "b1")])
    assert records(Template.NODE_COUNT, g, source_label="S", target_label="T") == [{"count": 1}]


def test_node_count_counts_distinct_sources():
    g = build([("a1", "S", {}), ("b1", "T", {}), ("b2", "T", {})], [("R", "a1", "b1"), ("Q", "a1", "b2")])
    assert records(Template.NODE_COUNT, g, source_label="S", target_label="T") == [{"count": 1}]


def test_path_finding_chain():
    g = build([("x", "S", {}), ("y", "M", {}), ("z", "T", {})], [("R", "x", "y"), ("R", "y", "z")])
    got = records(Template.PATH_FINDING, g, source_label="S", middle_label="M", target_label="T")
    assert got == [{"source_node_key": "x", "target_node_key": "z"}]


def test_path_finding_self_loop_needs_two_relationships():
    one = build([("x", "A", {})], [("R", "x", "x")])
    assert records(Template.PATH_FINDING, one, source_label="A", middle_label="A", target_label="A") == []
    two = build([("x", "A", {})], [("R", "x", "x"), ("R", "x", "x")])
    assert len(records(Template.PATH_FINDING, two, source_label="A", middle_label="A", target_label="A")) == 1


def test_node_with_most_relationships_keeps_ties():
    g = build(
        [("a", "S", {}), ("b", "S", {}), ("c", "S", {}), ("t", "T", {})],
        [("R", "a", "t"), ("R", "b", "t"), ("Q", "c", "t"), ("Q", "c", "t")],
    )
    got = records(Template.NODE_WITH_MOST_RELATIONSHIPS, g, source_node_label="S", rel_type_name="R")
    assert got == [{"node_key": "a", "rel_count": 1}, {"node_key": "b", "rel_count": 1}]


def test_variable_hop_needs_one_more_step():
    g = build(
        [("a", "S", {}), ("b", "T", {}), ("c", "T", {}), ("d", "X", {})],
        [("R", "a", "b"), ("R", "b", "c")],
    )
    # b has an outgoing edge, c does not
    got = records(Template.VARIABLE_HOP_PATH, g, source_label="S", target_label="T", n=3)
    assert got == [{"source_node_key": "a", "target_node_key": "b"}]


def test_variable_hop_back_to_source_needs_spare_edge():
    cycle = build([("a", "S", {}), ("b", "X", {})], [("R", "a", "b"), ("R", "b", "a")])
    assert records(Template.VARIABLE_HOP_PATH, cycle, source_label="S", target_label="S", n=3) == []
    cycle.add_relationship("R", 0, 1)
    got = records(Template.VARIABLE_HOP_PATH, cycle, source_label="S", target_label="S", n=3)
    assert got == [{"source_node_key": "a", "target_node_key": "a"}]


def test_remote_node_property_excludes_direct_neighbours():
    g = build(
        [("a", "S", {}), ("b", "T", {"p": "near"}), ("c", "T", {"p": "far"})],
        [("R", "a", "b"), ("R", "b", "c"), ("R", "a", "c")],
    )
    params = dict(source_label="S", source_key="a", target_label="T", prop_name="p", prop_type="string", max_hops=3)
    assert records(Template.REMOTE_NODE_PROPERTY, g, **params) == []
    g2 = build(
        [("a", "S", {}), ("b", "T", {"p": "near"}), ("c", "T", {"p": "far"})],
        [("R", "a", "b"), ("R", "b", "c")],
    )
    assert records(Template.REMOTE_NODE_PROPERTY, g2, **params) == [{"value": "far"}]


def test_logic_templates():
    g = build(
        [("a", "S", {}), ("b", "S", {}), ("x", "T1", {}), ("y", "T2", {})],
        [("R", "a", "x"), ("R", "a", "y"), ("R", "b", "x")],
    )
    both = records(Template.COMPOSITIONAL_INTERSECTION, g, source_label="S", target1_label="T1", target2_label="T2")
    assert both == [{"node_key": "a"}]
    neg = records(
        Template.NEGATION_WITH_CONNECTION, g, source_label="S", positive_target_label="T1", negative_target_label="T2"
    )
    assert neg == [{"node_key": "b"}]


def test_negation_on_rel_property():
    g = build(
        [("a", "S", {"c": "red"}), ("b", "S", {"c": "red"}), ("t", "T", {})],
        [("R", "a", "t", {"w": "hi"}), ("R", "b", "t", {"w": "lo"})],
    )
    params = dict(
        source_label="S", source_prop_name="c", source_prop_value="red", rel_type_name="R", target_label="T", prop_name="w"
    )
    assert records(Template.NEGATION_ON_REL_PROPERTY, g, val2="lo", **params) == [{"node_key": "a"}]
    only_lo = build([("b", "S", {"c": "red"}), ("t", "T", {})], [("R", "b", "t", {"w": "lo"})])
    assert records(Template.NEGATION_ON_REL_PROPERTY, only_lo, val2="lo", **params) == []


def test_modes_and_fields():
    assert SPECS[Template.NODE_COUNT].mode == SINGLE_COUNT
    assert SPECS[Template.NODE_WITH_MOST_RELATIONSHIPS].mode == ARGMAX
    assert SPECS[Template.REMOTE_NODE_PROPERTY].mode == VALUE
    assert SPECS[Template.RELATIONSHIP_BY_PROPERTY].fields == ("source_key", "target_key")
    assert SPECS[Template.PATH_FINDING].mode == EXACT_SET


def test_instantiate_on_edgeless_graph_fails():
    g, _ = generate_graph(GeneratorConfig(edge_density=0.0))
    with pytest.raises(InstantiationError, match="not instantiable"):
        instantiate(Template.PATH_FINDING, g, random.Random(0))


def test_instantiate_is_seeded():
    g, _ = generate_graph(preset("paper-100", seed=1))
    for t in TEMPLATES:
        a = instantiate(t, g, random.Random(5))
        b = instantiate(t, g, random.Random(5))
        assert a == b
        assert gold_answer(a, g)
        assert a.params.get("n", 3) == 3 and a.params.get("max_hops", 3) == 3


def test_instance_and_gold_round_trip():
    g, _ = generate_graph(preset("paper-100", seed=1))
    inst = instantiate(Template.PATH_FINDING, g, random.Random(0))
    gold = gold_answer(inst, g)
    assert type(inst).from_dict(inst.to_dict()) == inst
    assert GoldAnswer.from_dict(gold.to_dict()) == gold


def test_hop_bounds_configurable():
    g, _ = generate_graph(preset("paper-100", seed=1))
    inst = instantiate(Template.VARIABLE_HOP_PATH, g, random.Random(0), BenchmarkConfig(hop_bound=2))
    assert inst.params["n"] == 2


def test_single_node_property_lookup_both_oracles():
    g = build([("only", "A", {"p": "x"})])
    inst = make_instance(Template.NODE_BY_PROPERTY, {"node_label": "A", "prop_name": "p", "prop_value": "x"})
    assert gold_answer(inst, g) == brute_force_gold(inst, g)
    assert list(gold_answer(inst, g).records) == [{"node_key": "only"}]


def test_diamond_variable_hop_both_oracles():
    g = build(
        [("a", "S", {}), ("b", "M", {}), ("c", "M", {}), ("d", "T", {}), ("e", "X", {})],
        [("R", "a", "b"), ("R", "a", "c"), ("R", "b", "d"), ("R", "c", "d"), ("R", "d", "e")],
    )
    inst = make_instance(Template.VARIABLE_HOP_PATH, {"source_label": "S", "target_label": "T", "n": 3})
    assert gold_answer(inst, g) == brute_force_gold(inst, g)


def test_brute_force_guard():
    g = build([("a", "A", {}), ("b", "A", {})])
    for _ in range(MAX_RELATIONSHIPS + 1):
        g.add_relationship("R", 0, 1)
    inst = make_instance(Template.RELATIONSHIP_COUNT, {"rel_type_name": "R"})
    with pytest.raises(OracleGuardError):
        brute_force_gold(inst, g)


# -- properties ------------------------------------------------------------------


def small_graph(seed):
    rng = random.Random(seed)
    config = GeneratorConfig(
        num_nodes=rng.randint(4, 14), node_classes=rng.randint(1, 3), rel_classes=rng.randint(1, 3),
        avg_props_per_entity=2, values_per_property=3, edge_density=rng.choice([0.1, 0.25, 0.4]), seed=seed,
    )
    return generate_graph(config)[0]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(TEMPLATES))
def test_oracles_agree(seed, template):
    g = small_graph(seed)
    try:
        inst = instantiate(template, g, random.Random(seed))
    except InstantiationError:
        return
    assert gold_answer(inst, g) == brute_force_gold(inst, g)


def relabel(g, rng):
    order = list(range(len(g.nodes)))
    rng.shuffle(order)
    new = PropertyGraph()
    where = {}
    for old in order:
        n = g.nodes[old]
        where[old] = new.add_node(n.label, n.properties).id
    rels = list(g.relationships)
    rng.shuffle(rels)
    for r in rels:
        new.add_relationship(r.rel_type, where[r.source], where[r.target], r.properties)
    return new


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from(TEMPLATES))
def test_gold_invariant_under_relabelling(seed, template):
    g = small_graph(seed)
    try:
        inst = instantiate(template, g, random.Random(seed))
    except InstantiationError:
        return
    assert gold_answer(inst, relabel(g, random.Random(seed))) == gold_answer(inst, g)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.integers(1, 3))
def test_path_from_specific_node_monotone(seed, k):
    g = small_graph(seed)
    try:
        inst = instantiate(Template.PATH_FROM_SPECIFIC_NODE, g, random.Random(seed))
    except InstantiationError:
        return
    small = gold_answer(make_instance(inst.template, {**inst.params, "n": k}), g)
    big = gold_answer(make_instance(inst.template, {**inst.params, "n": k + 1}), g)
    assert set(map(str, small.records)) <= set(map(str, big.records))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31))
def test_remote_values_not_exclusive_to_direct_neighbours(seed):
    g = small_graph(seed)
    try:
        inst = instantiate(Template.REMOTE_NODE_PROPERTY, g, random.Random(seed))
    except InstantiationError:
        return
    p = inst.params
    src = g.node_by_key(p["source_key"])
    direct = set(g.successors(src.id))
    for rec in gold_answer(inst, g).records:
        holders = {n.id for n in g.nodes if n.label == p["target_label"] and n.properties.get(p["prop_name"]) == rec["value"]}
        assert holders - direct
