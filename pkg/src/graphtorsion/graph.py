"""Metric graph data model and validation.

A metric graph is a combinatorial graph whose edges carry positive lengths;
each edge is identified with the interval [0, length], oriented from its
source vertex (s = 0) to its target vertex (s = length). Self-loops and
parallel edges are first-class. A nonempty subset of vertices carries
Dirichlet conditions; everything downstream (spectrum, torsion, surgery)
assumes that subset is nonempty.

All objects are immutable after construction and safe to share across
threads. Construction is permissive: semantic problems are reported by
``validate`` as data, they do not raise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class InvalidGraphError(ValueError):
    """An operation that requires a valid graph received an invalid one."""


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    length: float


@dataclass(frozen=True)
class GraphPoint:
    """A point on the graph: edge id plus arclength coordinate in [0, length]."""

    edge: str
    s: float


@dataclass(frozen=True)
class MetricGraph:
    """Compact metric graph with a distinguished Dirichlet vertex set.

    ``vertices`` and ``dirichlet`` preserve insertion order so that
    serialization and solver output are deterministic.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    dirichlet: tuple[str, ...]

    @staticmethod
    def build(vertices, edges, dirichlet) -> "MetricGraph":
        """Build a graph from plain iterables.

        ``edges`` items are either ``Edge`` objects or ``(id, source, target,
        length)`` tuples.
        """
        edge_objs = []
        for e in edges:
            if isinstance(e, Edge):
                edge_objs.append(e)
            else:
                eid, src, tgt, length = e
                edge_objs.append(Edge(str(eid), str(src), str(tgt), float(length)))
        return MetricGraph(
            vertices=tuple(str(v) for v in vertices),
            edges=tuple(edge_objs),
            dirichlet=tuple(str(v) for v in dirichlet),
        )

    @property
    def dirichlet_set(self) -> frozenset:
        return frozenset(self.dirichlet)

    @property
    def edge_ids(self) -> tuple[str, ...]:
        return tuple(e.id for e in self.edges)

    def edge(self, edge_id: str) -> Edge:
        for e in self.edges:
            if e.id == edge_id:
                return e
        raise KeyError(f"unknown edge id: {edge_id!r}")

    def has_vertex(self, v: str) -> bool:
        return v in self.vertices


def validate(g: MetricGraph) -> list[str]:
    """Check every structural invariant; return one message per violation.

    An empty report means the graph is valid. Violations are data, not
    failures: this function never raises and has no side effects.
    """
    report: list[str] = []
    seen_v = set()
    for v in g.vertices:
        if v in seen_v:
            report.append(f"duplicate vertex id: {v!r}")
        seen_v.add(v)
    seen_e = set()
    for e in g.edges:
        if e.id in seen_e:
            report.append(f"duplicate edge id: {e.id!r}")
        seen_e.add(e.id)
        for end in (e.source, e.target):
            if end not in seen_v:
                report.append(f"edge {e.id!r} references unknown vertex {end!r}")
        if not (math.isfinite(e.length) and e.length > 0):
            report.append(f"edge {e.id!r} has non-positive or non-finite length {e.length!r}")
    if not g.edges:
        report.append("graph has no edges")
    if not g.dirichlet:
        report.append("empty Dirichlet set")
    seen_d = set()
    for v in g.dirichlet:
        if v not in seen_v:
            report.append(f"Dirichlet vertex {v!r} is not a vertex of the graph")
        if v in seen_d:
            report.append(f"duplicate Dirichlet vertex: {v!r}")
        seen_d.add(v)
    if g.vertices and not _connected(g):
        report.append("graph is not connected")
    return report


def require_valid(g: MetricGraph) -> None:
    """Raise ``InvalidGraphError`` listing all violations, if any."""
    report = validate(g)
    if report:
        raise InvalidGraphError("; ".join(report))


def _connected(g: MetricGraph) -> bool:
    # Connectivity of the combinatorial skeleton; edges are intervals, so this
    # is equivalent to topological connectivity.
    if not g.vertices:
        return True
    adjacency: dict[str, set[str]] = {v: set() for v in g.vertices}
    for e in g.edges:
        if e.source in adjacency and e.target in adjacency:
            adjacency[e.source].add(e.target)
            adjacency[e.target].add(e.source)
    stack = [g.vertices[0]]
    seen = {g.vertices[0]}
    while stack:
        v = stack.pop()
        for w in adjacency[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(set(g.vertices))


def total_length(g: MetricGraph) -> float:
    """Sum of all edge lengths."""
    return float(sum(e.length for e in g.edges))


def vertex_degree(g: MetricGraph, v: str) -> int:
    """Number of edge endpoints incident to ``v``; a self-loop contributes 2."""
    if v not in g.vertices:
        raise KeyError(f"unknown vertex id: {v!r}")
    deg = 0
    for e in g.edges:
        deg += (e.source == v) + (e.target == v)
    return deg


def min_edge_length(g: MetricGraph) -> float:
    return min(e.length for e in g.edges)


def check_point(g: MetricGraph, p: GraphPoint) -> Edge:
    """Return the edge of ``p`` after checking 0 <= s <= length."""
    e = g.edge(p.edge)
    if not (0.0 <= p.s <= e.length):
        raise ValueError(f"point s={p.s!r} is outside edge {p.edge!r} of length {e.length!r}")
    return e


def _fresh_id(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def insert_dummy_vertex(g: MetricGraph, p: GraphPoint) -> MetricGraph:
    """Split one edge at an interior point into two edges joined at a new
    degree-2 Kirchhoff vertex.

    The new vertex is not Dirichlet, total length is preserved up to one
    floating-point addition, and the spectrum is unchanged.
    """
    e = g.edge(p.edge)
    if not (0.0 < p.s < e.length):
        raise ValueError(f"split point must be interior to the edge, got s={p.s!r} on length {e.length!r}")
    vertex_ids = set(g.vertices)
    edge_ids = set(g.edge_ids)
    new_v = _fresh_id(f"{e.id}#v", vertex_ids)
    new_e0 = _fresh_id(f"{e.id}#0", edge_ids)
    new_e1 = _fresh_id(f"{e.id}#1", edge_ids | {new_e0})
    new_edges = []
    for old in g.edges:
        if old.id == e.id:
            new_edges.append(Edge(new_e0, old.source, new_v, p.s))
            new_edges.append(Edge(new_e1, new_v, old.target, old.length - p.s))
        else:
            new_edges.append(old)
    return MetricGraph(
        vertices=g.vertices + (new_v,),
        edges=tuple(new_edges),
        dirichlet=g.dirichlet,
    )
