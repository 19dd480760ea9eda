"""Tool-based graph traversal benchmark: graphs, mazes, tools, oracles, agents and scoring."""

__version__ = "0.1.0"
