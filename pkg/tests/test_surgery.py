import numpy as np
import pytest

from graphtorsion import suite
from graphtorsion.graph import MetricGraph, total_length, validate, vertex_degree
from graphtorsion.solver import scan_spectrum
from graphtorsion.surgery import (
    SurgeryPreconditionError,
    apply,
    cut_cycle,
    double_edges,
    glue_vertices,
    unfold_to_cycle,
    upper_bound_chain,
)


def test_double_interval():
    out = double_edges(suite.interval())
    assert validate(out) == []
    assert len(out.edges) == 2
    assert all(e.source == "v0" and e.target == "v1" and e.length == 1.0 for e in out.edges)
    assert total_length(out) == 2.0
    assert out.dirichlet == ("v0",)


def test_double_flower_doubles_petals():
    out = double_edges(suite.flower(3))
    assert len(out.edges) == 6
    assert all(e.source == e.target == "c" for e in out.edges)


def test_double_makes_degrees_even():
    for g in suite.suite_graphs().values():
        out = double_edges(g)
        assert all(vertex_degree(out, v) % 2 == 0 for v in out.vertices)


def test_glue_path_ends_gives_cycle():
    g = MetricGraph.build(
        ["v1", "v2", "v3"],
        [("a", "v1", "v2", 1.0), ("b", "v2", "v3", 1.0)],
        ["v1"],
    )
    out = glue_vertices(g, ["v1", "v3"])
    assert validate(out) == []
    assert len(out.vertices) == 2
    assert vertex_degree(out, "v2") == 2
    assert all(vertex_degree(out, v) == 2 for v in out.vertices)
    assert total_length(out) == total_length(g)
    assert out.dirichlet_set == {"v1+v3"}


def test_glue_star_leaves_gives_parallel_edges():
    out = glue_vertices(suite.star3(), ["l1", "l2", "l3"])
    assert validate(out) == []
    assert len(out.vertices) == 2
    assert len(out.edges) == 3
    merged = "l1+l2+l3"
    assert all({e.source, e.target} == {merged, "c"} for e in out.edges)
    assert out.dirichlet == (merged,)


def test_glue_dirichlet_union_semantics():
    g = MetricGraph.build(
        ["a", "b", "c"],
        [("e1", "a", "b", 1.0), ("e2", "b", "c", 1.0)],
        ["a"],
    )
    out = glue_vertices(g, ["b", "c"])  # no Dirichlet member: stays Kirchhoff
    assert out.dirichlet == ("a",)
    out = glue_vertices(g, ["a", "c"])  # Dirichlet member wins
    assert out.dirichlet == ("a+c",)


def test_glue_errors():
    with pytest.raises(SurgeryPreconditionError):
        glue_vertices(suite.star3(), ["l1"])
    with pytest.raises(SurgeryPreconditionError):
        glue_vertices(suite.star3(), ["l1", "nope"])


def test_unfold_doubled_triangle_structure():
    g = suite.doubled_triangle()
    out = unfold_to_cycle(g)
    assert validate(out) == []
    assert len(out.edges) == 6
    assert total_length(out) == 6.0
    origins = [v.split("@")[0] for v in out.vertices]
    assert sorted(origins) == ["v1", "v1", "v2", "v2", "v3", "v3"]
    assert all(vertex_degree(out, v) == 2 for v in out.vertices)
    # every circuit edge joins the original endpoints of its source edge
    lengths = {e.id: e.length for e in g.edges}
    ends = {e.id: {e.source, e.target} for e in g.edges}
    for e in out.edges:
        assert e.length == lengths[e.id]
        assert {e.source.split("@")[0], e.target.split("@")[0]} == ends[e.id]
    # both visits of the Dirichlet vertex are marked in "all" mode
    assert set(out.dirichlet) == {v for v in out.vertices if v.startswith("v1@")}
    single = unfold_to_cycle(g, "single")
    assert single.dirichlet == ("v1@0",)


def test_unfold_visit_order_follows_smallest_id_tie_break():
    # with parallel copies labeled a,b,c then x,y,z the greedy circuit walks
    # the triangle twice: v1 v2 v3 v1 v2 v3
    g = MetricGraph.build(
        ["v1", "v2", "v3"],
        [
            ("a", "v1", "v2", 1.0), ("b", "v2", "v3", 1.0), ("c", "v3", "v1", 1.0),
            ("x", "v1", "v2", 1.0), ("y", "v2", "v3", 1.0), ("z", "v3", "v1", 1.0),
        ],
        ["v1"],
    )
    out = unfold_to_cycle(g)
    origins = [v.split("@")[0] for v in out.vertices]
    assert origins == ["v1", "v2", "v3", "v1", "v2", "v3"]
    assert [e.id for e in out.edges] == ["a", "b", "c", "x", "y", "z"]
    assert out.dirichlet == ("v1@0", "v1@3")


def test_unfold_loop_is_identity_up_to_renaming():
    out = unfold_to_cycle(suite.loop())
    assert len(out.edges) == 1
    e = out.edges[0]
    assert e.source == e.target == "v0@0"
    assert e.length == 1.0
    assert out.dirichlet == ("v0@0",)


def test_unfold_rejects_odd_degrees():
    with pytest.raises(SurgeryPreconditionError):
        unfold_to_cycle(suite.star3())
    with pytest.raises(SurgeryPreconditionError):
        unfold_to_cycle(suite.interval())


def test_unfold_deterministic():
    a = unfold_to_cycle(suite.doubled_triangle())
    b = unfold_to_cycle(suite.doubled_triangle())
    assert a == b


def test_cut_loop():
    out = cut_cycle(suite.loop(), "v0")
    assert validate(out) == []
    assert out.vertices == ("v0-", "v0+")
    assert out.dirichlet == ("v0-", "v0+")
    assert total_length(out) == 1.0


def test_cut_keeps_interior_vertices():
    g = MetricGraph.build(
        ["v1", "v2", "v3"],
        [("a", "v1", "v2", 1.0), ("b", "v2", "v3", 0.5), ("c", "v3", "v1", 0.75)],
        ["v1", "v3"],
    )
    out = cut_cycle(g, "v1")
    assert validate(out) == []
    assert out.vertices[0] == "v1-" and out.vertices[-1] == "v1+"
    assert set(out.vertices[1:-1]) == {"v2", "v3"}
    assert "v3" in out.dirichlet_set  # interior Dirichlet point preserved
    assert total_length(out) == pytest.approx(2.25)


def test_cut_errors():
    with pytest.raises(SurgeryPreconditionError):
        cut_cycle(suite.star3(), "l1")
    g = MetricGraph.build(
        ["a", "b"],
        [("e1", "a", "b", 1.0), ("e2", "b", "a", 1.0)],
        ["a"],
    )
    with pytest.raises(SurgeryPreconditionError):
        cut_cycle(g, "b")


def test_cut_then_glue_round_trip_spectrum():
    loop = suite.loop()
    path = cut_cycle(loop, "v0")
    back = glue_vertices(path, ["v0-", "v0+"])
    b0 = scan_spectrum(loop, 20.0)
    b1 = scan_spectrum(back, 20.0)
    assert b0.n_pairs == b1.n_pairs
    assert np.allclose(b0.lambdas, b1.lambdas, rtol=1e-9)


def test_apply_provenance_total():
    for g, spec in [
        (suite.interval(), "double"),
        (suite.star3(), "glue:l1,l2"),
        (suite.doubled_triangle(), "unfold"),
        (suite.loop(), "cut:v0"),
    ]:
        op = apply(g, spec)
        assert set(op.provenance) == set(op.graph.edge_ids)
        originals = set(g.edge_ids)
        assert all(src in originals for src in op.provenance.values())


def test_apply_unknown_op():
    with pytest.raises(ValueError):
        apply(suite.interval(), "shrink")


def test_length_conservation_exact():
    g = suite.doubled_triangle()
    assert total_length(glue_vertices(g, ["v2", "v3"])) == total_length(g)
    assert total_length(unfold_to_cycle(g)) == total_length(g)
    assert total_length(double_edges(g)) == 2.0 * total_length(g)


@pytest.mark.parametrize("alpha", [0.5, 1.0])
def test_upper_bound_chain_star3(alpha):
    report = upper_bound_chain(suite.star3(), alpha)
    assert report.all_hold, [c for c in report.checks if not c.holds]
    # stage sequence is nondecreasing up to tolerances
    values = [s.value for s in report.stages]
    tols = [s.tail_bound for s in report.stages]
    for i in range(len(values) - 1):
        assert values[i] <= values[i + 1] + tols[i] + tols[i + 1] + 1e-8


def test_upper_bound_chain_interval_tight():
    report = upper_bound_chain(suite.interval(), 1.0)
    assert report.all_hold
    final = report.stages[-1]
    assert abs(final.value - report.upper_bound) <= final.tail_bound + 1e-8
    assert report.upper_bound == pytest.approx(1.0 / 3.0, rel=1e-12)


def test_upper_bound_chain_flower_has_slack():
    report = upper_bound_chain(suite.flower(2), 0.8)
    assert report.all_hold
    # flower is the minimizer, so the chain ends well above the original value
    assert report.stages[0].value < report.upper_bound / 2.0
