import pytest

from walkbench.graph import PropertyGraph


def build(nodes, edges=()):
    """nodes: [(key, label, props)], edges: [(type, src_key, dst_key, props)]."""
    g = PropertyGraph()
    ids = {}
    for key, label, props in nodes:
        ids[key] = g.add_node(label, {"key": key, **props}).id
    for rel_type, src, dst, *props in edges:
        g.add_relationship(rel_type, ids[src], ids[dst], props[0] if props else {})
    return g


@pytest.fixture
def g1():
    return build([("k1", "A", {"p": "x"}), ("k2", "A", {"p": "y"}), ("k3", "B", {"p": "x"})])


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
