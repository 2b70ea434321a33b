"""Readers that rebuild a PropertyGraph from emitted Cypher scripts and GraphML.

They only understand the statement shapes the emitters produce, and share
no code with them, so a round trip through emitter and reader checks both.
"""
import re
import xml.etree.ElementTree as ET

from rdfpg.pgmodel import PGNode, PGRelation, PropertyGraph

# -- Cypher -------------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>'(?:[^'\\]|\\.)*')
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<bquote>`(?:[^`]|``)*`)
  | (?P<word>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<arrow>->)
  | (?P<punct>[(){}\[\]:,;\-])
    """,
    re.VERBOSE | re.DOTALL,
)

_SIMPLE_ESCAPES = {"\\": "\\", "'": "'", '"': '"', "n": "\n", "r": "\r", "t": "\t", "b": "\b", "f": "\f"}


def _unquote(tok):
    body = tok[1:-1]
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1]
        if nxt == "u":
            out.append(chr(int(body[i + 2:i + 6], 16)))
            i += 6
        else:
            out.append(_SIMPLE_ESCAPES[nxt])
            i += 2
    return "".join(out)


def _tokens(line):
    pos = 0
    out = []
    while pos < len(line):
        m = _TOKEN.match(line, pos)
        if not m:
            raise ValueError(f"cannot tokenize Cypher at {pos}: {line[pos:pos + 30]!r}")
        pos = m.end()
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group()))
    return out


class _Statement:
    def __init__(self, line):
        self.toks = _tokens(line)
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, value=None):
        tok = self.toks[self.i]
        if value is not None and tok[1] != value:
            raise ValueError(f"expected {value!r}, got {tok[1]!r}")
        self.i += 1
        return tok

    def name(self):
        kind, text = self.take()
        if kind == "bquote":
            return text[1:-1].replace("``", "`")
        if kind == "word":
            return text
        raise ValueError(f"expected a name, got {text!r}")

    def value(self):
        kind, text = self.peek()
        if text == "[":
            self.take("[")
            items = []
            while self.peek()[1] != "]":
                items.append(self.value())
                if self.peek()[1] == ",":
                    self.take(",")
            self.take("]")
            return tuple(items)
        self.take()
        if kind == "string":
            return _unquote(text)
        if kind == "number":
            return float(text) if any(c in text for c in ".eE") else int(text)
        if text in ("true", "false"):
            return text == "true"
        raise ValueError(f"unexpected value token {text!r}")

    def props(self):
        self.take("{")
        out = {}
        while self.peek()[1] != "}":
            key = self.name()
            self.take(":")
            out[key] = self.value()
            if self.peek()[1] == ",":
                self.take(",")
        self.take("}")
        return out

    def labels(self):
        out = []
        while self.peek()[1] == ":":
            self.take(":")
            out.append(self.name())
        return out

    def node_pattern(self):
        self.take("(")
        var = self.name() if self.peek()[0] in ("word", "bquote") else None
        labels = self.labels()
        props = self.props() if self.peek()[1] == "{" else {}
        self.take(")")
        return var, labels, props


def read_cypher(text):
    """Rebuild the graph described by a Cypher load script."""
    nodes = {}
    relations = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("//") or line.startswith("CREATE INDEX "):
            continue
        st = _Statement(line)
        head = st.take()[1]
        if head == "CREATE":
            _, labels, props = st.node_pattern()
            st.take(";")
            iri = props.pop("iri")
            if iri in nodes:
                raise ValueError(f"node {iri} created twice")
            nodes[iri] = PGNode(iri, frozenset(labels), props)
        elif head == "MATCH":
            ends = {}
            for k in range(2):
                var, _, props = st.node_pattern()
                ends[var] = props["iri"]
                if k == 0:
                    st.take(",")
            st.take("CREATE")
            src, _, _ = st.node_pattern()
            st.take("-")
            st.take("[")
            st.take(":")
            rtype = st.name()
            props = st.props()
            st.take("]")
            st.take("->")
            dst, _, _ = st.node_pattern()
            st.take(";")
            iri = props.pop("iri")
            relations.append(PGRelation(iri, rtype, ends[src], ends[dst], props))
        else:
            raise ValueError(f"unexpected statement: {line}")
    pg = PropertyGraph(nodes.values())
    for r in relations:
        if r.iri in pg.relations:
            raise ValueError(f"relation {r.iri} created twice")
        pg.add_relation(r)
    return pg


# -- GraphML ------------------------------------------------------------------

NS = "{http://graphml.graphdrawing.org/xmlns}"
LIST_SEPARATOR = "\u241f"

_PARSE = {
    "string": str,
    "long": int,
    "int": int,
    "double": float,
    "float": float,
    "boolean": lambda s: {"true": True, "false": False}[s],
}


def graphml_keys(root):
    return {
        k.get("id"): (k.get("for"), k.get("attr.name"), k.get("attr.type"))
        for k in root.iter(NS + "key")
    }


def _typed(text, attr_type):
    conv = _PARSE[attr_type]
    if LIST_SEPARATOR in text:
        return tuple(conv(part) for part in text.split(LIST_SEPARATOR))
    return conv(text)


def read_graphml(text):
    """Rebuild the graph in a GraphML document written with the TinkerPop key layout."""
    root = ET.fromstring(text.encode("utf-8"))
    keys = graphml_keys(root)
    graph = root.find(NS + "graph")
    pg = PropertyGraph()

    def data_of(el, target):
        out = {}
        for d in el.findall(NS + "data"):
            kid = d.get("key")
            if kid not in keys:
                raise ValueError(f"undeclared key {kid}")
            tgt, name, attr_type = keys[kid]
            if tgt != target:
                raise ValueError(f"key {kid} declared for {tgt}, used on {target}")
            out[name] = _typed(d.text or "", attr_type)
        return out

    for el in graph.findall(NS + "node"):
        props = data_of(el, "node")
        label_text = props.pop("labelV", "")
        labels = frozenset(label_text.split("::")) if label_text else frozenset()
        iri = props.pop("iri")
        if iri != el.get("id"):
            raise ValueError(f"node id {el.get('id')} differs from iri {iri}")
        pg.add_node(PGNode(iri, labels, props))
    for el in graph.findall(NS + "edge"):
        props = data_of(el, "edge")
        rtype = props.pop("labelE")
        iri = props.pop("iri")
        pg.add_relation(PGRelation(iri, rtype, el.get("source"), el.get("target"), props))
    return pg


# -- comparison -----------------------------------------------------------------


def _typed_value(v):
    if isinstance(v, tuple):
        return ("list", tuple(_typed_value(x) for x in v))
    return (type(v).__name__, v)


def graph_signature(pg):
    """A hashable, type-aware view of a graph (``1``, ``1.0`` and ``True`` stay distinct)."""
    nodes = frozenset(
        (n.iri, n.labels, frozenset((k, _typed_value(v)) for k, v in n.properties.items()))
        for n in pg.nodes.values()
    )
    rels = frozenset(
        (r.iri, r.type, r.from_iri, r.to_iri, frozenset((k, _typed_value(v)) for k, v in r.properties.items()))
        for r in pg.relations.values()
    )
    return nodes, rels
