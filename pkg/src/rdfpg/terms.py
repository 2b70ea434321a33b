"""RDF terms: IRIs, literals and blank nodes.

Terms are immutable and hashable. Hashes are computed once at construction
because terms are used as dictionary keys on every index lookup.
"""
import re

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
XSD = "http://www.w3.org/2001/XMLSchema#"

XSD_STRING = XSD + "string"
XSD_BOOLEAN = XSD + "boolean"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
RDF_LANGSTRING = RDF + "langString"
RDF_TYPE = RDF + "type"

_ABSOLUTE_IRI = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:[^\s<>\"{}|^`\\]*$")


def is_absolute_iri(text):
    """True if ``text`` has a scheme and no characters illegal in an IRI."""
    return bool(_ABSOLUTE_IRI.match(text))


class Term:
    __slots__ = ("_hash",)
    kind = None

    def __eq__(self, other):
        raise NotImplementedError

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()


class IRI(Term):
    __slots__ = ("value",)
    kind = "iri"

    def __init__(self, value: str):
        if not value or any(c.isspace() for c in value):
            raise ValueError(f"invalid IRI text: {value!r}")
        self.value = value
        self._hash = hash(("iri", value))

    def __eq__(self, other):
        return isinstance(other, IRI) and other.value == self.value

    __hash__ = Term.__hash__

    def __repr__(self):
        return f"IRI({self.value!r})"

    def __str__(self):
        return self.value

    def sort_key(self):
        return (0, self.value, "", "")

    def n3(self):
        return "<" + self.value + ">"


class BNode(Term):
    __slots__ = ("label",)
    kind = "blank"

    def __init__(self, label: str):
        if not label:
            raise ValueError("blank node label must be non-empty")
        self.label = label
        self._hash = hash(("blank", label))

    def __eq__(self, other):
        return isinstance(other, BNode) and other.label == self.label

    __hash__ = Term.__hash__

    def __repr__(self):
        return f"BNode({self.label!r})"

    def __str__(self):
        return self.label

    def sort_key(self):
        return (1, self.label, "", "")

    def n3(self):
        return "_:" + self.label


class Literal(Term):
    """A literal with a lexical form, a datatype IRI text and an optional language tag.

    Language-tagged literals always carry ``rdf:langString``; plain literals
    default to ``xsd:string``.
    """

    __slots__ = ("lexical", "datatype", "lang")
    kind = "literal"

    def __init__(self, lexical: str, datatype: str = None, lang: str = None):
        if lang:
            lang = lang.lower()
            datatype = RDF_LANGSTRING
        elif datatype is None:
            datatype = XSD_STRING
        elif datatype == RDF_LANGSTRING:
            raise ValueError("rdf:langString literal needs a language tag")
        self.lexical = lexical
        self.datatype = datatype
        self.lang = lang or None
        self._hash = hash(("literal", lexical, datatype, self.lang))

    def __eq__(self, other):
        return (
            isinstance(other, Literal)
            and other.lexical == self.lexical
            and other.datatype == self.datatype
            and other.lang == self.lang
        )

    __hash__ = Term.__hash__

    def __repr__(self):
        if self.lang:
            return f"Literal({self.lexical!r}, lang={self.lang!r})"
        if self.datatype != XSD_STRING:
            return f"Literal({self.lexical!r}, datatype={self.datatype!r})"
        return f"Literal({self.lexical!r})"

    def __str__(self):
        return self.lexical

    def sort_key(self):
        return (2, self.lexical, self.datatype, self.lang or "")

    def n3(self):
        out = '"' + escape_string(self.lexical) + '"'
        if self.lang:
            return out + "@" + self.lang
        if self.datatype != XSD_STRING:
            return out + "^^<" + self.datatype + ">"
        return out


_STRING_ESCAPES = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_string(text):
    """Escape text for a double-quoted N-Triples / Turtle / SPARQL string."""
    out = []
    for ch in text:
        esc = _STRING_ESCAPES.get(ch)
        if esc is not None:
            out.append(esc)
        elif ord(ch) < 0x20 or ch == "\x7f":
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def lexical_form(term):
    """Text of a term as used by STR(): the IRI text or the literal lexical form."""
    if isinstance(term, IRI):
        return term.value
    if isinstance(term, Literal):
        return term.lexical
    return term.label
