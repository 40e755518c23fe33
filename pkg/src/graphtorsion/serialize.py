"""Graph document I/O and canonical number formatting.

The graph document is a JSON object with fields "vertices" (array of
strings), "edges" (array of objects {"id", "from", "to", "length"}) and
"dirichlet" (array of strings). Surgery output adds a "provenance" field
mapping new edge ids to the ids they originate from.

Reports and documents are emitted through ``dumps_canonical`` so identical
inputs produce byte-identical output: floats are printed with 17 significant
digits and object fields keep insertion order.
"""

from __future__ import annotations

import json

from .graph import MetricGraph


class DocumentError(ValueError):
    """A graph document is structurally malformed."""


def format_float(x) -> str:
    return format(float(x), ".17g")


def _write(obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (key, value) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(key)))
            out.append(": ")
            _write(value, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, value in enumerate(obj):
            if i:
                out.append(", ")
            _write(value, out)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(format_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(obj) -> str:
    out: list[str] = []
    _write(obj, out)
    return "".join(out)


def graph_to_document(g: MetricGraph, provenance: dict[str, str] | None = None) -> dict:
    doc = {
        "vertices": list(g.vertices),
        "edges": [
            {"id": e.id, "from": e.source, "to": e.target, "length": float(e.length)}
            for e in g.edges
        ],
        "dirichlet": list(g.dirichlet),
    }
    if provenance is not None:
        doc["provenance"] = dict(provenance)
    return doc


def graph_from_document(doc) -> MetricGraph:
    if not isinstance(doc, dict):
        raise DocumentError("graph document must be a JSON object")
    for key in ("vertices", "edges", "dirichlet"):
        if key not in doc:
            raise DocumentError(f"graph document is missing field {key!r}")
    vertices = doc["vertices"]
    edges = doc["edges"]
    dirichlet = doc["dirichlet"]
    if not isinstance(vertices, list) or not all(isinstance(v, str) for v in vertices):
        raise DocumentError('"vertices" must be an array of strings')
    if not isinstance(dirichlet, list) or not all(isinstance(v, str) for v in dirichlet):
        raise DocumentError('"dirichlet" must be an array of strings')
    if not isinstance(edges, list):
        raise DocumentError('"edges" must be an array of objects')
    parsed = []
    for entry in edges:
        if not isinstance(entry, dict):
            raise DocumentError("edge entries must be objects")
        for key in ("id", "from", "to", "length"):
            if key not in entry:
                raise DocumentError(f"edge entry is missing field {key!r}")
        if not all(isinstance(entry[k], str) for k in ("id", "from", "to")):
            raise DocumentError('edge fields "id", "from", "to" must be strings')
        if isinstance(entry["length"], bool) or not isinstance(entry["length"], (int, float)):
            raise DocumentError('edge field "length" must be a number')
        parsed.append((entry["id"], entry["from"], entry["to"], float(entry["length"])))
    return MetricGraph.build(vertices, parsed, dirichlet)


def load_graph_json(text: str) -> MetricGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    return graph_from_document(doc)


def load_graph_file(path: str) -> MetricGraph:
    with open(path, "r", encoding="utf-8") as fh:
        return load_graph_json(fh.read())


def dump_graph_json(g: MetricGraph, provenance: dict[str, str] | None = None) -> str:
    return dumps_canonical(graph_to_document(g, provenance))
