import os
import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import fixture_path
from gen import random_query
from rdfpg.sparql import QuerySyntaxError, UnsupportedFeatureError, parse_select, to_sparql
from rdfpg.sparql.ast import Bind, Call, Optional_, PathPattern, TriplePattern, Union_, Values, Var
from rdfpg.terms import IRI, RDF_TYPE, Literal

PFX = "PREFIX ex: <http://ex.org/>\n"


def test_prefixes_expand_and_a_is_rdf_type():
    q = parse_select(PFX + "SELECT ?x { ?x a ex:T }")
    (bgp,) = q.pattern.elements
    assert bgp.triples == (TriplePattern(Var("x"), IRI(RDF_TYPE), IRI("http://ex.org/T")),)
    assert q.projection == ("x",)


def test_select_star_projects_pattern_variables_in_order():
    q = parse_select("SELECT * { ?b <http://ex.org/p> ?a . BIND(STR(?a) AS ?c) }")
    assert q.projection == ("b", "a", "c")


def test_path_union_optional_values_bind():
    q = parse_select(PFX + """
        SELECT ?iri ?n {
          ?c ex:sub* ex:Top .
          { ?iri a ?c } UNION { ?iri ex:alias ?c }
          OPTIONAL { ?iri ex:name ?n FILTER(?n != "") }
          VALUES (?c) { (ex:A) (UNDEF) }
          BIND(URI(CONCAT("http://ex.org/", MD5(STR(?iri)))) AS ?h)
        }""")
    kinds = [type(e) for e in q.pattern.elements]
    assert PathPattern in [type(t) for t in q.pattern.elements[0].triples]
    assert Union_ in kinds and Optional_ in kinds and Values in kinds and Bind in kinds
    bind = [e for e in q.pattern.elements if isinstance(e, Bind)][0]
    assert isinstance(bind.expr, Call) and bind.expr.name == "IRI"
    values = [e for e in q.pattern.elements if isinstance(e, Values)][0]
    assert values.rows == ((IRI("http://ex.org/A"),), (None,))


def test_semicolon_and_comma_lists():
    q = parse_select(PFX + "SELECT ?s { ?s a ex:T; ex:p ex:a, ex:b. }")
    assert len(q.pattern.elements[0].triples) == 3


@pytest.mark.parametrize("fragment,feature", [
    ("SELECT ?x { ?x ?p ?o } GROUP BY ?x", "GROUP BY"),
    ("SELECT ?x { ?x ?p ?o } ORDER BY ?x", "ORDER BY"),
    ("SELECT ?x { ?x ?p ?o } LIMIT 10", "LIMIT"),
    ("SELECT ?x { ?x ?p ?o MINUS { ?x a ?t } }", "MINUS"),
    ("SELECT ?x { GRAPH ?g { ?x ?p ?o } }", "GRAPH"),
    ("SELECT ?x { SERVICE <http://ex.org/s> { ?x ?p ?o } }", "SERVICE"),
    ("SELECT ?x FROM <http://ex.org/g> { ?x ?p ?o }", "FROM"),
    ("CONSTRUCT { ?x ?p ?o } { ?x ?p ?o }", "CONSTRUCT"),
    ("ASK { ?x ?p ?o }", "ASK"),
    ("SELECT (COUNT(?x) AS ?n) { ?x ?p ?o }", "aggregates"),
    ("SELECT ?x { ?x <http://ex.org/p>+ ?o }", "+"),
    ("SELECT ?x { ?x <http://ex.org/p>/<http://ex.org/q> ?o }", "/"),
    ("SELECT ?x { ?x ^<http://ex.org/p> ?o }", "^"),
    ("SELECT ?x { ?x <http://ex.org/p>|<http://ex.org/q> ?o }", "|"),
    ("SELECT ?x { ?x ?p ?o FILTER(EXISTS { ?x a ?t }) }", "EXISTS"),
    ("SELECT ?x { { SELECT ?x { ?x ?p ?o } } }", "subqueries"),
    ("SELECT ?x { ?x ?p ?o FILTER(LANG(?o) = 'en') }", "LANG"),
])
def test_unsupported_constructs_are_named(fragment, feature):
    with pytest.raises(UnsupportedFeatureError) as err:
        parse_select(fragment)
    assert feature in err.value.feature or feature in str(err.value)
    assert "unsupported SPARQL feature" in str(err.value)


@pytest.mark.parametrize("text,line,col", [
    ("SELECT ?x {\n  ?x ?p \n}", 3, 1),
    ("SELECT ?x { ?x nope:p ?o }", 1, 16),
    ("SELEKT ?x { ?x ?p ?o }", 1, 1),
    ("SELECT ?x { ?x ?p ?o ", None, None),
    ("SELECT ?x { ?x ?p ?o . BIND(STR(?o) AS ?x) }", 1, None),
])
def test_syntax_errors(text, line, col):
    with pytest.raises(QuerySyntaxError) as err:
        parse_select(text)
    if line is not None:
        assert err.value.line == line
    if col is not None:
        assert err.value.column == col


def test_projection_must_occur_in_pattern():
    with pytest.raises(QuerySyntaxError, match=r"\?y"):
        parse_select("SELECT ?y { ?x ?p ?o }")


def test_wrong_arity_is_rejected():
    with pytest.raises(QuerySyntaxError):
        parse_select("SELECT ?x { ?x ?p ?o BIND(MD5(?o, ?p) AS ?h) }")


def test_literal_syntax():
    q = parse_select('SELECT ?x { ?x ?p "a\\tb"@EN , 1 , 2.5 , "t"^^<http://ex.org/dt> , true }')
    objs = [t.object for t in q.pattern.elements[0].triples]
    assert objs[0] == Literal("a\tb", lang="en")
    assert objs[4] == Literal("true", "http://www.w3.org/2001/XMLSchema#boolean")


@pytest.mark.parametrize("name", ["hierarchy", "reified", "plain"])
def test_fixture_queries_parse_and_print_stably(name):
    d = fixture_path("mappings", name)
    with open(os.path.join(d, "prefixes.sparql"), encoding="utf-8") as fh:
        prefixes = fh.read()
    for fname in sorted(os.listdir(d)):
        if fname == "prefixes.sparql":
            continue
        with open(os.path.join(d, fname), encoding="utf-8") as fh:
            q = parse_select(prefixes + fh.read())
        text = to_sparql(q)
        assert to_sparql(parse_select(text)) == text
        assert parse_select(text).projection == q.projection


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32))
def test_printing_then_parsing_is_a_fixpoint(seed):
    rng = random.Random(seed)
    q = random_query(rng)
    text = to_sparql(q)
    again = parse_select(text)
    assert to_sparql(again) == text
    assert again.projection == q.projection
