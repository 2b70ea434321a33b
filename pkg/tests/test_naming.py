import threading

import pytest
from hypothesis import given, strategies as st

from rdfpg.naming import PLAIN_NAME, NameCollisionError, NamePolicy, NameRegistry, local_name, sanitize_name


@pytest.mark.parametrize("iri,name", [
    ("http://ex.org/onto#Protein", "Protein"),
    ("http://knetminer.org/data/rdf/terms/biokno/is_part_of", "is_part_of"),
    ("http://ex.org/path/", "path"),
    ("urn:isbn:123", "_123"),
    ("http://ex.org/has-part", "has_part"),
    ("http://ex.org/a%20b", "a_20b"),
    ("Preferred Name", "Preferred_Name"),
])
def test_sanitize(iri, name):
    assert sanitize_name(iri) == name


def test_local_name_of_hash_terminated_iri():
    assert local_name("http://ex.org/onto#") == "onto"


@given(st.text(max_size=30))
def test_sanitized_names_are_plain(text):
    assert PLAIN_NAME.match(sanitize_name(text))


def test_explicit_policy_wins():
    policy = NamePolicy({"http://ex.org/p": "Preferred Name"})
    assert sanitize_name("http://ex.org/p", policy) == "Preferred Name"


def test_collisions_are_per_kind():
    reg = NameRegistry()
    assert reg.name("label", "http://a.org/Gene") == "Gene"
    assert reg.name("label", "http://a.org/Gene") == "Gene"
    assert reg.name("type", "http://b.org/Gene") == "Gene"
    with pytest.raises(NameCollisionError) as err:
        reg.name("label", "http://b.org/Gene")
    assert "http://a.org/Gene" in str(err.value) and "http://b.org/Gene" in str(err.value)
    assert reg.provenance("label") == {"Gene": "http://a.org/Gene"}


def test_registry_is_thread_safe():
    reg = NameRegistry()
    sources = [f"http://ex.org/n{i}" for i in range(500)]
    errors = []

    def work():
        try:
            for s in sources:
                reg.name("property", s)
        except Exception as e:  # pragma: no cover
            errors.append(e)

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert not errors
    assert len(reg.provenance("property")) == 500
