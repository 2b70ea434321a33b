"""GraphML output following the TinkerPop GraphML reader conventions.

Node labels go in a ``labelV`` data entry (``::``-joined), relation types in
``labelE``. GraphML has no list type, so list values are joined with
``list_separator``.
"""
import io
import re
from dataclasses import dataclass
from typing import List

from .. import __version__
from ..pgmodel import GraphValidationError, value_type
from .base import Emitter

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"
LABEL_SEPARATOR = "::"
# U+241F SYMBOL FOR UNIT SEPARATOR: the control character itself is not legal XML 1.0
DEFAULT_LIST_SEPARATOR = "\u241f"

NODE_LABEL_KEY = "labelV"
EDGE_LABEL_KEY = "labelE"
NODE_IRI_KEY = "iriV"
EDGE_IRI_KEY = "iriE"
RESERVED_NAMES = {NODE_LABEL_KEY, EDGE_LABEL_KEY}

ATTR_TYPES = {str: "string", int: "long", float: "double", bool: "boolean"}
_NCNAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_.\-]*$")
_INVALID_XML = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f\ufffe\uffff\ud800-\udfff]")


class GraphMLError(GraphValidationError):
    pass


@dataclass(frozen=True)
class KeyDecl:
    id: str
    target: str  # "node" or "edge"
    attr_name: str
    attr_type: str


def xml_escape(text):
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
        .replace("'", "&apos;")
    )


def _text(text, where):
    bad = _INVALID_XML.search(text)
    if bad:
        raise GraphMLError(f"{where}: character U+{ord(bad.group()):04X} cannot be represented in XML")
    # parsers normalize a literal CR to LF, so keep it as a character reference
    return xml_escape(text).replace("\r", "&#13;")


def collect_keys(pg) -> List[KeyDecl]:
    """Key declarations for every (property name, element kind) in the graph."""
    found = {"node": {}, "edge": {}}
    for target, elements in (("node", pg.nodes.values()), ("edge", pg.relations.values())):
        types = found[target]
        for el in elements:
            for name, value in el.properties.items():
                if name in RESERVED_NAMES:
                    raise GraphMLError(f"{el.iri}: property name '{name}' is reserved in GraphML output")
                t = value_type(value)
                prev = types.get(name)
                if prev is None:
                    types[name] = t
                elif prev is not t:
                    raise GraphMLError(
                        f"{target} property '{name}' has values of type {prev.__name__} and {t.__name__}"
                    )
    node_names, edge_names = set(found["node"]), set(found["edge"])
    fixed_ids = {NODE_LABEL_KEY, EDGE_LABEL_KEY, NODE_IRI_KEY, EDGE_IRI_KEY}
    keys = [
        KeyDecl(NODE_LABEL_KEY, "node", NODE_LABEL_KEY, "string"),
        KeyDecl(NODE_IRI_KEY, "node", "iri", "string"),
        KeyDecl(EDGE_LABEL_KEY, "edge", EDGE_LABEL_KEY, "string"),
        KeyDecl(EDGE_IRI_KEY, "edge", "iri", "string"),
    ]
    for target, suffix, other in (("node", "V", edge_names), ("edge", "E", node_names)):
        for name, t in found[target].items():
            if _NCNAME.match(name) and name not in other and name not in fixed_ids:
                kid = name
            else:
                kid = name + suffix
                while kid in fixed_ids:
                    kid += suffix
            keys.append(KeyDecl(kid, target, name, ATTR_TYPES[t]))
    order = {"node": 0, "edge": 1}
    keys.sort(key=lambda k: (order[k.target], k.attr_name))
    return keys


def _scalar_text(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


class GraphMLEmitter(Emitter):
    """Streams a GraphML document: header and keys, then nodes, then edges."""

    def __init__(self, out, list_separator=DEFAULT_LIST_SEPARATOR):
        if not list_separator or _INVALID_XML.search(list_separator):
            raise ValueError("list separator must be a non-empty string of legal XML characters")
        self.out = out
        self.list_separator = list_separator
        self._key_ids = {}
        self._graph_open = False
        self._edges_started = False

    def begin(self, graph):
        keys = collect_keys(graph)
        self._key_ids = {(k.target, k.attr_name): k.id for k in keys}
        w = self.out.write
        w('<?xml version="1.0" encoding="UTF-8"?>\n')
        sep = f"U+{ord(self.list_separator[0]):04X}" if len(self.list_separator) == 1 else repr(self.list_separator)
        w(f"<!-- rdfpg {__version__}; nodes: {len(graph.nodes)}, edges: {len(graph.relations)}; "
          f"list values are joined with {_text(sep, 'header')} -->\n")
        w(f'<graphml xmlns="{GRAPHML_NS}">\n')
        for k in keys:
            w(f'  <key id="{xml_escape(k.id)}" for="{k.target}" attr.name="{xml_escape(k.attr_name)}" '
              f'attr.type="{k.attr_type}"/>\n')
        w('  <graph id="G" edgedefault="directed">\n')
        self._graph_open = True

    def _value(self, value, where):
        if isinstance(value, tuple):
            parts = []
            for v in value:
                text = _scalar_text(v)
                if self.list_separator in text:
                    raise GraphMLError(f"{where}: list element contains the list separator")
                parts.append(text)
            return _text(self.list_separator.join(parts), where)
        text = _scalar_text(value)
        if isinstance(value, str) and self.list_separator in text:
            raise GraphMLError(f"{where}: text value contains the list separator")
        return _text(text, where)

    def _data(self, target, el):
        lines = []
        for name in sorted(el.properties):
            kid = self._key_ids[(target, name)]
            where = f"{target} {el.iri} property '{name}'"
            lines.append(f'      <data key="{xml_escape(kid)}">{self._value(el.properties[name], where)}</data>\n')
        return "".join(lines)

    def node(self, node):
        where = f"node {node.iri}"
        iri = _text(node.iri, where)
        labels = LABEL_SEPARATOR.join(sorted(node.labels))
        self.out.write(
            f'    <node id="{iri}">\n'
            f'      <data key="{NODE_LABEL_KEY}">{_text(labels, where)}</data>\n'
            f'      <data key="{NODE_IRI_KEY}">{iri}</data>\n'
            + self._data("node", node)
            + "    </node>\n"
        )

    def relation(self, rel):
        where = f"edge {rel.iri}"
        iri = _text(rel.iri, where)
        self.out.write(
            f'    <edge id="{iri}" source="{_text(rel.from_iri, where)}" target="{_text(rel.to_iri, where)}">\n'
            f'      <data key="{EDGE_LABEL_KEY}">{_text(rel.type, where)}</data>\n'
            f'      <data key="{EDGE_IRI_KEY}">{iri}</data>\n'
            + self._data("edge", rel)
            + "    </edge>\n"
        )

    def end(self):
        if self._graph_open:
            self.out.write("  </graph>\n</graphml>\n")
            self._graph_open = False


def emit_graphml(pg, list_separator=DEFAULT_LIST_SEPARATOR, deterministic=True):
    """The GraphML document for a graph as text."""
    from ..mapping import emit_graph

    buf = io.StringIO()
    emit_graph(pg, GraphMLEmitter(buf, list_separator), deterministic)
    return buf.getvalue()
