"""Built-in graphs used by the verification battery, docs and tests."""

from __future__ import annotations

from .graph import MetricGraph


def interval(length: float = 1.0) -> MetricGraph:
    """Single edge, Dirichlet at the left endpoint, free (Neumann) right."""
    return MetricGraph.build(["v0", "v1"], [("e0", "v0", "v1", length)], ["v0"])


def loop(length: float = 1.0) -> MetricGraph:
    """One self-loop with a Dirichlet vertex."""
    return MetricGraph.build(["v0"], [("e0", "v0", "v0", length)], ["v0"])


def flower(n_petals: int, petal_length: float = 1.0) -> MetricGraph:
    """n self-loops attached to a single Dirichlet vertex."""
    edges = [(f"p{i}", "c", "c", petal_length) for i in range(1, n_petals + 1)]
    return MetricGraph.build(["c"], edges, ["c"])


def star3(edge_length: float = 1.0) -> MetricGraph:
    """Three edges from Dirichlet leaves to a Kirchhoff center."""
    edges = [(f"e{i}", f"l{i}", "c", edge_length) for i in range(1, 4)]
    return MetricGraph.build(["l1", "l2", "l3", "c"], edges, ["l1", "l2", "l3"])


def doubled_triangle(side: float = 1.0) -> MetricGraph:
    """Triangle with every side doubled (all degrees 4), Dirichlet at v1."""
    edges = []
    for a, b in (("v1", "v2"), ("v2", "v3"), ("v3", "v1")):
        tag = a[1] + b[1]
        edges.append((f"e{tag}.1", a, b, side))
        edges.append((f"e{tag}.2", a, b, side))
    return MetricGraph.build(["v1", "v2", "v3"], edges, ["v1"])


def suite_graphs() -> dict[str, MetricGraph]:
    return {
        "interval": interval(),
        "loop": loop(),
        "flower1": flower(1),
        "flower2": flower(2),
        "flower3": flower(3),
        "star3": star3(),
        "doubled-triangle": doubled_triangle(),
    }


def builtin(name: str) -> MetricGraph:
    graphs = suite_graphs()
    if name not in graphs:
        raise KeyError(f"unknown builtin graph {name!r}; available: {', '.join(graphs)}")
    return graphs[name]
