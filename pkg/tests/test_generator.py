import random
from collections import Counter

import pytest

from walkbench.generator import (
    PRESETS,
    Dictionary,
    GeneratorConfig,
    default_dictionary,
    derive_seed,
    generate_blueprint,
    generate_graph,
    preset,
    random_label,
)


def test_random_label_deterministic_and_non_word():
    a = random_label(random.Random(7), (4, 8))
    b = random_label(random.Random(7), (4, 8))
    assert a == b
    assert 4 <= len(a) <= 8 and a.isalpha()
    assert a not in default_dictionary()


def test_random_label_gives_up_on_exhaustive_dictionary():
    letters = "abcdefghijklmnopqrstuvwxyz"
    # one-letter labels over a dictionary holding every letter
    with pytest.raises(RuntimeError):
        random_label(random.Random(0), (1, 1), Dictionary(letters))


def test_dictionary_lookup_case_insensitive():
    d = default_dictionary()
    assert len(d) > 50_000
    assert "house" in d and "House" in d
    assert "cevaz" not in d


def test_blueprint_counts_and_determinism():
    config = GeneratorConfig(node_classes=4, rel_classes=2)
    bp = generate_blueprint(config, random.Random(1))
    assert len(bp.node_classes) == 4 and len(bp.rel_classes) == 2
    assert bp == generate_blueprint(config, random.Random(1))


def test_single_class_blueprint_is_self_referential():
    bp = generate_blueprint(GeneratorConfig(num_nodes=5, node_classes=1, rel_classes=1), random.Random(0))
    (rel,) = bp.rel_classes
    assert rel.source == rel.target == bp.node_classes[0].label


def test_blueprint_names_distinct_and_pools_sized():
    config = preset("paper-500")
    bp = generate_blueprint(config, random.Random(3))
    names = [c.label for c in bp.node_classes] + [r.name for r in bp.rel_classes]
    props = [p for c in bp.node_classes for p in c.properties] + [p for r in bp.rel_classes for p in r.properties]
    everything = [n.lower() for n in names] + [p.name for p in props]
    assert len(set(everything)) == len(everything)
    assert "key" not in [p.name for p in props]
    assert all(len(set(p.pool)) == config.values_per_property for p in props)
    d = default_dictionary()
    assert not any(n in d for n in everything)


def test_graph_dump_deterministic():
    config = preset("paper-100", seed=11)
    assert generate_graph(config)[0].to_json() == generate_graph(config)[0].to_json()


def test_zero_density_gives_no_edges():
    g, _ = generate_graph(GeneratorConfig(edge_density=0.0))
    assert g.relationships == []


@pytest.mark.parametrize("seed", range(5))
def test_graph_conforms_to_blueprint(seed):
    g, bp = generate_graph(preset("paper-100", seed=seed))
    assert len(g.nodes) == 100
    assert len({n.key for n in g.nodes}) == 100
    d = default_dictionary()
    assert not any(n.key in d for n in g.nodes)
    for n in g.nodes:
        nc = bp.node_class(n.label)
        assert set(n.properties) == {p.name for p in nc.properties} | {"key"}
        for p in nc.properties:
            assert n.properties[p.name] in p.pool
    for r in g.relationships:
        rc = bp.rel_class(r.rel_type)
        assert (g.nodes[r.source].label, g.nodes[r.target].label) == (rc.source, rc.target)
        assert r.source != r.target
        for p in rc.properties:
            assert r.properties[p.name] in p.pool


def test_mean_property_count_matches_average():
    counts = []
    for seed in range(40):
        bp = generate_blueprint(preset("paper-500"), random.Random(seed))
        counts += [len(c.properties) for c in bp.node_classes] + [len(r.properties) for r in bp.rel_classes]
    assert abs(sum(counts) / len(counts) - 6) < 0.25
    assert set(counts) <= {5, 6, 7}


def test_node_classes_uniform_chi_square():
    g, bp = generate_graph(GeneratorConfig(num_nodes=10_000, edge_density=0.0, seed=5))
    observed = Counter(n.label for n in g.nodes)
    expected = 10_000 / len(bp.node_classes)
    chi2 = sum((observed[c.label] - expected) ** 2 / expected for c in bp.node_classes)
    assert chi2 < 14.16  # 3-sigma (p = 0.0027) quantile for 3 degrees of freedom


def test_presets_match_configurations():
    assert PRESETS["paper-100"].num_nodes == 100
    assert (PRESETS["paper-100"].node_classes, PRESETS["paper-100"].rel_classes) == (4, 2)
    assert PRESETS["paper-100"].avg_props_per_entity == 3 and PRESETS["paper-100"].values_per_property == 5
    for name, n in (("paper-150", 150), ("paper-200", 200), ("paper-500", 500)):
        c = PRESETS[name]
        assert (c.num_nodes, c.node_classes, c.rel_classes, c.avg_props_per_entity, c.values_per_property) == (n, 8, 4, 6, 10)


def test_config_validation():
    with pytest.raises(ValueError):
        GeneratorConfig(num_nodes=2, node_classes=3)
    with pytest.raises(ValueError):
        GeneratorConfig(edge_density=1.5)
    with pytest.raises(ValueError):
        GeneratorConfig.from_mapping({"bogus": 1})
    with pytest.raises(ValueError):
        preset("paper-1000")
    assert GeneratorConfig.from_mapping({"label_length": [3, 5]}).label_length == (3, 5)


def test_derived_seeds_are_stage_specific():
    assert derive_seed(1, "blueprint") != derive_seed(1, "structure")
    assert derive_seed(1, "blueprint") == derive_seed(1, "blueprint")


def test_changing_density_keeps_blueprint():
    a = generate_graph(GeneratorConfig(edge_density=0.02, seed=4))[1]
    b = generate_graph(GeneratorConfig(edge_density=0.08, seed=4))[1]
    assert a == b
