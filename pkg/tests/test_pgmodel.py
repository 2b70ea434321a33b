import math

import pytest
from hypothesis import given, strategies as st

from rdfpg.pgmodel import (
    DuplicateRelationError,
    GraphValidationError,
    PGNode,
    PGRelation,
    PropertyGraph,
    PropertyTypeConflict,
    merge_node,
    normalize_value,
    validate_graph,
)


def test_normalize_scalar_and_list():
    assert normalize_value(["a"]) == "a"
    assert normalize_value(["b", "a", "b"]) == ("a", "b")
    assert normalize_value([("a", "c"), "b"]) == ("a", "b", "c")
    assert normalize_value([True, True]) is True


def test_normalize_rejects_mixed_types_and_nan():
    with pytest.raises(PropertyTypeConflict):
        normalize_value([1, "1"], "http://ex.org/a", "n")
    with pytest.raises(PropertyTypeConflict):
        normalize_value([1, True])
    with pytest.raises(ValueError):
        normalize_value([math.nan])
    with pytest.raises(ValueError):
        normalize_value([])


@given(st.lists(st.text(max_size=4), min_size=1, max_size=6), st.randoms(use_true_random=False))
def test_normalize_is_order_insensitive_and_idempotent(values, rng):
    shuffled = list(values)
    rng.shuffle(shuffled)
    a = normalize_value(values)
    assert normalize_value(shuffled) == a
    assert normalize_value([a]) == a


def test_iri_is_reserved():
    with pytest.raises(ValueError):
        PGNode("http://ex.org/a", {"A"}, {"iri": "x"})
    with pytest.raises(ValueError):
        PGRelation("http://ex.org/r", "t", "http://ex.org/a", "http://ex.org/b", {"iri": 1})


def test_node_merge_unions_labels_and_values():
    a = PGNode("http://ex.org/a", {"A"}, {"name": "x", "n": 1})
    b = PGNode("http://ex.org/a", {"B"}, {"name": "y", "m": True})
    m = merge_node(a, b)
    assert m.labels == {"A", "B"}
    assert m.properties == {"m": True, "n": 1, "name": ("x", "y")}
    pg = PropertyGraph([a, b])
    assert pg.merges == 1 and pg.nodes["http://ex.org/a"] == m


@given(st.lists(st.tuples(st.sets(st.sampled_from("ABC")), st.lists(st.integers(0, 3), max_size=3)),
                min_size=1, max_size=5), st.randoms(use_true_random=False))
def test_merge_is_order_independent(parts, rng):
    nodes = [PGNode("http://ex.org/a", labels, {"v": normalize_value(vals)} if vals else {})
             for labels, vals in parts]
    forward = PropertyGraph(nodes)
    rng.shuffle(nodes)
    assert PropertyGraph(nodes) == forward


def test_duplicate_relations():
    r = PGRelation("http://ex.org/r", "t", "http://ex.org/a", "http://ex.org/b", {"w": 1})
    pg = PropertyGraph()
    assert pg.add_relation(r) is True
    assert pg.add_relation(PGRelation(r.iri, r.type, r.from_iri, r.to_iri, {"w": 1})) is False
    with pytest.raises(DuplicateRelationError):
        pg.add_relation(PGRelation(r.iri, "other", r.from_iri, r.to_iri, {"w": 1}))


def _graph():
    pg = PropertyGraph([PGNode("http://ex.org/a", {"A"}), PGNode("http://ex.org/b")])
    pg.add_relation(PGRelation("http://ex.org/r1", "t", "http://ex.org/a", "http://ex.org/b"))
    pg.add_relation(PGRelation("http://ex.org/r2", "t", "http://ex.org/a", "http://ex.org/gone"))
    pg.add_relation(PGRelation("http://ex.org/r3", "t", "http://ex.org/x", "http://ex.org/y"))
    return pg


def test_validate_error_mode_lists_every_dangling_endpoint():
    with pytest.raises(GraphValidationError) as err:
        validate_graph(_graph(), "error")
    msg = str(err.value)
    assert "http://ex.org/r2" in msg and "http://ex.org/gone" in msg
    assert "http://ex.org/x" in msg and "http://ex.org/y" in msg
    assert msg.startswith("3 dangling")


def test_validate_skip_mode_drops_dangling_relations():
    pg = _graph()
    report = validate_graph(pg, "skip")
    assert report.dangling_count == 2
    assert set(report.graph.relations) == {"http://ex.org/r1"}
    assert report.empty_label_nodes == ["http://ex.org/b"]
    assert not report.ok
    # the input graph is not modified
    assert len(pg.relations) == 3


def test_validate_clean_graph():
    pg = PropertyGraph([PGNode("http://ex.org/a", {"A"})])
    report = validate_graph(pg)
    assert report.ok and report.graph is pg
