import pytest

from mock_endpoint import MockEndpoint
from rdfpg.emit.cypher import CypherScriptOptions, emit_script, script_blocks
from rdfpg.emit.push import commit_url, push_script
from rdfpg.pgmodel import PGNode, PropertyGraph

CREDS = ("neo4j", "secret")


def blocks(n_nodes=10, tx=3):
    pg = PropertyGraph([PGNode(f"http://ex.org/n{i}", {"N"}) for i in range(n_nodes)])
    return script_blocks(emit_script(pg, CypherScriptOptions(transaction_size=tx)))


def test_commit_url():
    assert commit_url("http://h:7474/", "movies") == "http://h:7474/db/movies/tx/commit"


def test_all_blocks_succeed():
    bl = blocks()
    with MockEndpoint() as ep:
        report = push_script(bl, ep.url, CREDS)
    assert report.ok and report.blocks_total == len(bl) == report.blocks_ok == report.blocks_sent
    assert report.failed_block is None
    assert [r["path"] for r in ep.requests] == ["/db/neo4j/tx/commit"] * len(bl)
    sent = [[s["statement"] for s in r["body"]["statements"]] for r in ep.requests]
    assert sent == bl


@pytest.mark.parametrize("failure", ["errors", "http"])
def test_stops_at_the_failing_block(failure):
    bl = blocks()
    assert len(bl) == 5
    with MockEndpoint(fail_at=3, failure=failure) as ep:
        report = push_script(bl, ep.url, CREDS)
    assert not report.ok
    assert report.failed_block == 3
    assert report.blocks_ok == 2 and report.blocks_sent == 3
    assert len(ep.requests) == 3
    assert "block 3 of 5" in report.error


def test_bad_credentials_fail_the_first_block():
    with MockEndpoint() as ep:
        report = push_script(blocks(), ep.url, ("neo4j", "wrong"))
    assert report.failed_block == 1 and "Unauthorized" in report.error


def test_unreachable_endpoint():
    with MockEndpoint() as ep:
        url = ep.url
    report = push_script(blocks(), url, CREDS, timeout=2)
    assert not report.ok and report.blocks_sent == 0
    assert report.failed_block == 1
    assert "connection" in report.error
