"""Cypher load scripts: CREATE statements for nodes, MATCH/CREATE for relations.

Every statement occupies exactly one line; line breaks inside strings are
escaped. Statements are grouped into commit blocks separated by blank lines.
"""
import io
import math
from dataclasses import dataclass
from typing import Optional

from .. import __version__
from ..naming import PLAIN_NAME
from .base import Emitter


@dataclass
class CypherScriptOptions:
    transaction_size: int = 500
    create_index: bool = True
    # label used to look up relation endpoints; None matches on iri alone
    default_label: Optional[str] = "Resource"

    def __post_init__(self):
        if self.transaction_size < 1:
            raise ValueError("transaction_size must be >= 1")


def identifier(name):
    """A Cypher identifier, backtick-quoted unless plain."""
    if PLAIN_NAME.match(name):
        return name
    return "`" + name.replace("`", "``") + "`"


_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}


def quote_string(text):
    out = []
    for ch in text:
        esc = _ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif ord(ch) < 0x20 or ch in "\x7f\u0085\u2028\u2029":
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "'" + "".join(out) + "'"


def literal(value):
    if isinstance(value, tuple):
        return "[" + ", ".join(literal(v) for v in value) + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite float {value!r} has no Cypher literal")
        return repr(value)
    return quote_string(value)


def _props_map(iri, properties):
    items = [f"iri: {quote_string(iri)}"]
    for k in sorted(properties):
        items.append(f"{identifier(k)}: {literal(properties[k])}")
    return "{" + ", ".join(items) + "}"


def emit_node_statement(node):
    labels = "".join(":" + identifier(label) for label in sorted(node.labels))
    sep = " " if labels else ""
    return f"CREATE ({labels}{sep}{_props_map(node.iri, node.properties)});"


def emit_relation_statement(rel, default_label="Resource"):
    tag = ":" + identifier(default_label) if default_label else ""
    return (
        f"MATCH (a{tag} {{iri: {quote_string(rel.from_iri)}}}), (b{tag} {{iri: {quote_string(rel.to_iri)}}}) "
        f"CREATE (a)-[:{identifier(rel.type)} {_props_map(rel.iri, rel.properties)}]->(b);"
    )


def emit_index_statement(label):
    return f"CREATE INDEX IF NOT EXISTS FOR (n:{identifier(label)}) ON (n.iri);"


class CypherEmitter(Emitter):
    """Writes a Cypher script to a text stream as elements arrive."""

    def __init__(self, out, options=None):
        self.out = out
        self.options = options or CypherScriptOptions()
        self._in_block = 0
        self._section = None

    def _statement(self, section, text):
        if section != self._section or self._in_block >= self.options.transaction_size:
            self.out.write("\n")
            self._in_block = 0
            self._section = section
        self.out.write(text + "\n")
        self._in_block += 1

    def begin(self, graph):
        self.out.write(f"// rdfpg {__version__} Cypher load script\n")
        self.out.write(f"// nodes: {len(graph.nodes)}, relations: {len(graph.relations)}\n")
        if self.options.create_index:
            labels = graph.labels()
            # relation endpoints are looked up through this label, index it even if nodes lack it
            if self.options.default_label and graph.relations and self.options.default_label not in labels:
                labels = sorted(labels + [self.options.default_label])
            for label in labels:
                self._statement("index", emit_index_statement(label))

    def node(self, node):
        self._statement("nodes", emit_node_statement(node))

    def relation(self, rel):
        self._statement("relations", emit_relation_statement(rel, self.options.default_label))


def emit_script(pg, opts=None, deterministic=True):
    """The whole script for a graph as text."""
    from ..mapping import emit_graph

    buf = io.StringIO()
    emit_graph(pg, CypherEmitter(buf, opts), deterministic)
    return buf.getvalue()


def script_blocks(text):
    """Split a script into commit blocks (lists of statements), dropping comments."""
    blocks = []
    current = []
    for line in text.splitlines():
        stripped = line.strip()
        if stripped.startswith("//"):
            continue
        if not stripped:
            if current:
                blocks.append(current)
                current = []
            continue
        current.append(stripped)
    if current:
        blocks.append(current)
    return blocks
