import io
import random
import xml.etree.ElementTree as ET

import pytest
from hypothesis import given, settings, strategies as st

from gen import random_property_graph
from readers import NS, graph_signature, graphml_keys, read_graphml
from rdfpg.emit.graphml import GraphMLError, GraphMLEmitter, collect_keys, emit_graphml
from rdfpg.mapping import emit_graph
from rdfpg.pgmodel import PGNode, PGRelation, PropertyGraph


def small():
    pg = PropertyGraph([
        PGNode("http://ex.org/p1", {"Protein", "Resource"}, {"prefName": "P1", "len": 300}),
        PGNode("http://ex.org/c1", {"Protcmplx"}, {"prefName": "C1", "score": (0.5, 1.5)}),
    ])
    pg.add_relation(PGRelation("http://ex.org/s1", "is_part_of", "http://ex.org/p1", "http://ex.org/c1",
                               {"evidence": "IMP"}))
    return pg


def test_document_structure():
    text = emit_graphml(small())
    root = ET.fromstring(text.encode())
    assert root.tag == NS + "graphml"
    graph = root.find(NS + "graph")
    assert graph.get("edgedefault") == "directed"
    keys = graphml_keys(root)
    assert keys["prefName"] == ("node", "prefName", "string")
    assert keys["len"] == ("node", "len", "long")
    assert keys["score"] == ("node", "score", "double")
    assert keys["labelV"] == ("node", "labelV", "string")
    assert keys["labelE"] == ("edge", "labelE", "string")
    node = graph.find(NS + "node")
    assert node.get("id") == "http://ex.org/c1"
    edge = graph.find(NS + "edge")
    assert (edge.get("source"), edge.get("target")) == ("http://ex.org/p1", "http://ex.org/c1")
    # key declarations precede the graph, nodes precede edges
    children = [c.tag for c in root]
    assert children.index(NS + "graph") == len(children) - 1
    kinds = [c.tag for c in graph]
    assert kinds == sorted(kinds, key=lambda t: t != NS + "node")


def test_labels_and_lists_use_separators():
    text = emit_graphml(small())
    assert "<data key=\"labelV\">Protein::Resource</data>" in text
    assert "0.5\u241f1.5" in text


def test_key_ids_disambiguate_shared_and_odd_names():
    pg = PropertyGraph([PGNode("http://ex.org/a", {"A"}, {"w": 1, "first name": "x", "labelVx": "y"}),
                        PGNode("http://ex.org/b", {"A"})])
    pg.add_relation(PGRelation("http://ex.org/r", "t", "http://ex.org/a", "http://ex.org/b", {"w": 2.5}))
    ids = {(k.target, k.attr_name): k.id for k in collect_keys(pg)}
    assert ids[("node", "w")] == "wV" and ids[("edge", "w")] == "wE"
    assert ids[("node", "first name")] == "first nameV"
    assert len(set(ids.values())) == len(ids)


def test_type_conflict_within_one_kind():
    pg = PropertyGraph([PGNode("http://ex.org/a", set(), {"w": 1}), PGNode("http://ex.org/b", set(), {"w": "1"})])
    with pytest.raises(GraphMLError, match="w"):
        emit_graphml(pg)


def test_reserved_property_names():
    pg = PropertyGraph([PGNode("http://ex.org/a", set(), {"labelV": "x"})])
    with pytest.raises(GraphMLError, match="reserved"):
        emit_graphml(pg)


def test_illegal_xml_characters_are_refused():
    pg = PropertyGraph([PGNode("http://ex.org/a", set(), {"t": "bell\x07"})])
    with pytest.raises(GraphMLError, match="U\\+0007"):
        emit_graphml(pg)


def test_separator_inside_text_is_refused():
    pg = PropertyGraph([PGNode("http://ex.org/a", set(), {"t": "a\u241fb"})])
    with pytest.raises(GraphMLError, match="separator"):
        emit_graphml(pg)


def test_carriage_returns_survive_parsing():
    pg = PropertyGraph([PGNode("http://ex.org/a", {"A"}, {"t": "a\r\nb\rc"})])
    assert read_graphml(emit_graphml(pg)).nodes["http://ex.org/a"].properties["t"] == "a\r\nb\rc"


def test_custom_separator():
    buf = io.StringIO()
    emit_graph(small(), GraphMLEmitter(buf, list_separator="|"), deterministic=True)
    assert "0.5|1.5" in buf.getvalue()
    with pytest.raises(ValueError):
        GraphMLEmitter(buf, list_separator="\x1f")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_document_round_trips(seed):
    pg = random_property_graph(random.Random(seed), max_elements=120)
    text = emit_graphml(pg)
    root = ET.fromstring(text.encode())
    declared = set(graphml_keys(root))
    assert {d.get("key") for d in root.iter(NS + "data")} <= declared
    assert graph_signature(read_graphml(text)) == graph_signature(pg)
