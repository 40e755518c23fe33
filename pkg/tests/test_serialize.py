import json

import pytest

from graphtorsion import suite
from graphtorsion.serialize import (
    DocumentError,
    dumps_canonical,
    format_float,
    graph_from_document,
    graph_to_document,
    load_graph_json,
)


def test_document_round_trip():
    g = suite.doubled_triangle()
    doc = graph_to_document(g)
    back = graph_from_document(json.loads(json.dumps(doc)))
    assert back == g


def test_document_field_names():
    doc = graph_to_document(suite.interval())
    assert list(doc) == ["vertices", "edges", "dirichlet"]
    assert list(doc["edges"][0]) == ["id", "from", "to", "length"]


def test_provenance_field():
    doc = graph_to_document(suite.interval(), provenance={"e0": "e0"})
    assert doc["provenance"] == {"e0": "e0"}


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[1, 2]",
        '{"vertices": ["a"], "edges": []}',
        '{"vertices": "a", "edges": [], "dirichlet": []}',
        '{"vertices": ["a"], "edges": [{"id": "e"}], "dirichlet": []}',
        '{"vertices": ["a"], "edges": [{"id": "e", "from": "a", "to": "a", "length": "x"}], "dirichlet": []}',
        '{"vertices": ["a"], "edges": [{"id": 1, "from": "a", "to": "a", "length": 1.0}], "dirichlet": []}',
    ],
)
def test_malformed_documents_raise(text):
    with pytest.raises(DocumentError):
        load_graph_json(text)


def test_format_float_17_digits():
    assert format_float(0.25) == "0.25"
    assert format_float(1.0 / 3.0) == "0.33333333333333331"
    assert float(format_float(2.0 / 7.0)) == 2.0 / 7.0


def test_dumps_canonical_deterministic():
    obj = {"b": [1.5, 2, None, True], "a": {"x": 1e-9}}
    one = dumps_canonical(obj)
    two = dumps_canonical({"b": [1.5, 2, None, True], "a": {"x": 1e-9}})
    assert one == two
    assert json.loads(one) == {"b": [1.5, 2, None, True], "a": {"x": 1e-9}}
