import math

import pytest
from hypothesis import given, strategies as st

from graphtorsion import suite
from graphtorsion.graph import (
    GraphPoint,
    MetricGraph,
    insert_dummy_vertex,
    total_length,
    validate,
    vertex_degree,
)


def test_valid_interval_gives_empty_report():
    assert validate(suite.interval()) == []


def test_disconnected_graph_reported():
    g = MetricGraph.build(
        ["a", "b", "c", "d"],
        [("e0", "a", "b", 1.0), ("e1", "c", "d", 1.0)],
        ["a"],
    )
    assert any("not connected" in v for v in validate(g))


def test_empty_dirichlet_reported():
    g = MetricGraph.build(["a", "b"], [("e0", "a", "b", 1.0)], [])
    assert any("empty Dirichlet" in v for v in validate(g))


@pytest.mark.parametrize(
    "edges, message",
    [
        ([("e0", "a", "b", 0.0)], "non-positive"),
        ([("e0", "a", "b", -2.0)], "non-positive"),
        ([("e0", "a", "b", math.inf)], "non-finite"),
        ([("e0", "a", "b", 1.0), ("e0", "a", "b", 1.0)], "duplicate edge"),
        ([("e0", "a", "z", 1.0)], "unknown vertex"),
    ],
)
def test_structural_violations(edges, message):
    g = MetricGraph.build(["a", "b"], edges, ["a"])
    assert any(message in v for v in validate(g))


def test_duplicate_vertex_reported():
    g = MetricGraph.build(["a", "a", "b"], [("e0", "a", "b", 1.0)], ["a"])
    assert any("duplicate vertex" in v for v in validate(g))


def test_validate_is_idempotent():
    g = suite.flower(2)
    first = validate(g)
    assert first == validate(g) == []


def test_total_length():
    assert total_length(suite.interval()) == 1.0
    assert total_length(suite.flower(3)) == 3.0
    g = MetricGraph.build(
        ["c", "a", "b", "d"],
        [("e1", "a", "c", 0.5), ("e2", "b", "c", 0.5), ("e3", "d", "c", 0.5)],
        ["a"],
    )
    assert total_length(g) == 1.5


def test_vertex_degree():
    assert vertex_degree(suite.flower(3), "c") == 6
    assert vertex_degree(suite.interval(), "v1") == 1
    assert vertex_degree(suite.star3(), "c") == 3
    with pytest.raises(KeyError):
        vertex_degree(suite.interval(), "missing")


def test_degree_sum_is_twice_edge_count():
    for g in suite.suite_graphs().values():
        assert sum(vertex_degree(g, v) for v in g.vertices) == 2 * len(g.edges)


def test_insert_dummy_vertex_interval():
    g = suite.interval()
    out = insert_dummy_vertex(g, GraphPoint("e0", 0.3))
    assert validate(out) == []
    assert sorted(e.length for e in out.edges) == [0.3, 0.7]
    new_vertex = [v for v in out.vertices if v not in g.vertices]
    assert len(new_vertex) == 1
    assert vertex_degree(out, new_vertex[0]) == 2
    assert new_vertex[0] not in out.dirichlet_set
    assert out.dirichlet == g.dirichlet


def test_insert_dummy_vertex_loop():
    out = insert_dummy_vertex(suite.loop(), GraphPoint("e0", 0.5))
    assert validate(out) == []
    assert len(out.edges) == 2
    assert all(vertex_degree(out, v) == 2 for v in out.vertices)


@pytest.mark.parametrize("s", [0.0, 1.0, -0.1, 1.5])
def test_insert_dummy_vertex_rejects_endpoints(s):
    with pytest.raises(ValueError):
        insert_dummy_vertex(suite.interval(), GraphPoint("e0", s))


@given(st.floats(min_value=1e-6, max_value=1.0 - 1e-6), st.floats(min_value=1e-3, max_value=1e3))
def test_insert_dummy_preserves_length(fraction, scale):
    g = suite.star3(edge_length=scale)
    out = insert_dummy_vertex(g, GraphPoint("e2", fraction * scale))
    assert total_length(out) == pytest.approx(total_length(g), rel=4e-16, abs=0.0)
