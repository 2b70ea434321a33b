"""Turtle-subset and N-Triples parsing, plus N-Triples serialization.

Supported Turtle: ``@prefix``/``PREFIX``, ``@base``/``BASE``, the ``a``
keyword, predicate lists (``;``), object lists (``,``), quoted strings (short
and long forms), integer/decimal/double/boolean literals, language tags,
``^^`` datatypes and ``_:label`` blank nodes. Collections and ``[ ]`` blank
node property lists are rejected.
"""
import hashlib
import re
from urllib.parse import urljoin

from .terms import (
    IRI,
    BNode,
    Literal,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    is_absolute_iri,
)

DEFAULT_BNODE_NAMESPACE = "urn:bnode:"


class RDFSyntaxError(ValueError):
    def __init__(self, message, line=None, column=None, token=None, source=None):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        self.source = source
        where = ""
        if line is not None:
            where = f" at line {line}, column {column}"
        if source:
            where = f" in {source}" + where
        tok = f" (near {token!r})" if token is not None else ""
        super().__init__(f"{message}{where}{tok}")


_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+|#[^\n]*"),
    ("IRIREF", r"<(?:[^<>\"{}|^`\\\x00-\x20]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>"),
    ("STRING_LONG2", r'"""(?:[^"\\]|\\.|"(?!""))*"""'),
    ("STRING_LONG1", r"'''(?:[^'\\]|\\.|'(?!''))*'''"),
    ("STRING2", r'"(?:[^"\\\n\r]|\\.)*"'),
    ("STRING1", r"'(?:[^'\\\n\r]|\\.)*'"),
    ("BNODE", r"_:[A-Za-z0-9_](?:[\w.\-]*[\w\-])?"),
    ("LANGTAG", r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"),
    ("DT", r"\^\^"),
    ("DOUBLE", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"[+-]?\d*\.\d+"),
    ("INTEGER", r"[+-]?\d+"),
    ("PNAME", r"(?:[A-Za-z](?:[\w.\-]*[\w\-])?)?:(?:(?:[\w:%]|\\[^\s])(?:[\w.:%\-]|\\[^\s])*)?"),
    ("WORD", r"[A-Za-z][A-Za-z0-9]*"),
    ("PUNCT", r"[.;,\[\]()]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _TOKEN_SPEC))

_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.S)


def _unescape(text, line, col):
    def repl(m):
        code = m.group(1)
        if code[0] in "uU" and len(code) > 1:
            return chr(int(code[1:], 16))
        if code in _ESCAPES:
            return _ESCAPES[code]
        raise RDFSyntaxError("invalid string escape", line, col, "\\" + code)

    return _ESCAPE_RE.sub(repl, text)


def tokenize(text):
    """Yield ``(kind, text, line, column)`` tokens, skipping whitespace/comments."""
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise RDFSyntaxError("unexpected character", line, pos - line_start + 1, text[pos])
        kind = m.lastgroup
        value = m.group()
        if kind != "WS":
            if kind == "PNAME" and value.endswith("."):
                # a trailing dot terminates the statement, it is not part of the name
                value = value.rstrip(".")
            yield kind, value, line, pos - line_start + 1
        end = pos + len(value)
        nl = text.count("\n", pos, end)
        if nl:
            line += nl
            line_start = text.rfind("\n", pos, end) + 1
        pos = end


class _Parser:
    def __init__(self, text, fmt, prefixes, file_id, skolemize, bnode_namespace, source):
        try:
            self.tokens = list(tokenize(text)) if text else []
        except RDFSyntaxError as e:
            if e.source or not source:
                raise
            raise RDFSyntaxError(e.message, e.line, e.column, e.token, source) from None
        self.i = 0
        self.ntriples = fmt == "ntriples"
        self.prefixes = prefixes
        self.base = None
        self.file_id = file_id
        self.skolemize = skolemize
        self.bnode_namespace = bnode_namespace
        self.source = source

    def error(self, message, tok=None):
        if tok is None:
            tok = self.peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else None
            line = last[2] if last else 1
            col = (last[3] + len(last[1])) if last else 1
            return RDFSyntaxError(message, line, col, "<end of input>", self.source)
        return RDFSyntaxError(message, tok[2], tok[3], tok[1], self.source)

    def peek(self):
        if self.i < len(self.tokens):
            return self.tokens[self.i]
        return None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of input")
        self.i += 1
        return tok

    def expect_punct(self, ch):
        tok = self.next()
        if tok[0] != "PUNCT" or tok[1] != ch:
            raise self.error(f"expected '{ch}'", tok)

    def parse(self):
        while self.peek() is not None:
            tok = self.peek()
            if self._is_directive(tok):
                self.directive()
            else:
                yield from self.triples()

    def _is_directive(self, tok):
        if tok[0] == "LANGTAG" and tok[1] in ("@prefix", "@base"):
            return True
        return tok[0] == "WORD" and tok[1].upper() in ("PREFIX", "BASE")

    def directive(self):
        tok = self.next()
        if self.ntriples:
            raise self.error("directives are not allowed in N-Triples", tok)
        word = tok[1].lstrip("@").lower()
        sparql_style = not tok[1].startswith("@")
        if word == "prefix":
            name = self.next()
            if name[0] != "PNAME" or not name[1].endswith(":") or name[1].count(":") != 1:
                raise self.error("expected prefix name ending in ':'", name)
            iri_tok = self.next()
            if iri_tok[0] != "IRIREF":
                raise self.error("expected IRI in prefix declaration", iri_tok)
            self.prefixes[name[1][:-1]] = self.resolve(iri_tok)
        else:
            iri_tok = self.next()
            if iri_tok[0] != "IRIREF":
                raise self.error("expected IRI in base declaration", iri_tok)
            self.base = self.resolve(iri_tok)
        if not sparql_style:
            self.expect_punct(".")

    def resolve(self, tok):
        text = _unescape(tok[1][1:-1], tok[2], tok[3])
        if self.base and not is_absolute_iri(text):
            text = urljoin(self.base, text)
        if not is_absolute_iri(text):
            raise self.error("IRI is not absolute", tok)
        return text

    def triples(self):
        subj = self.subject()
        yield from self.predicate_object_list(subj)
        self.expect_punct(".")

    def predicate_object_list(self, subj):
        while True:
            pred = self.verb()
            while True:
                yield subj, pred, self.object()
                tok = self.peek()
                if tok is not None and tok[:2] == ("PUNCT", ","):
                    self.i += 1
                    continue
                break
            tok = self.peek()
            if tok is not None and tok[:2] == ("PUNCT", ";"):
                while tok is not None and tok[:2] == ("PUNCT", ";"):
                    self.i += 1
                    tok = self.peek()
                # a trailing ';' before '.' is legal Turtle
                if tok is None or tok[:2] == ("PUNCT", "."):
                    return
                continue
            return

    def subject(self):
        tok = self.next()
        kind = tok[0]
        if kind == "IRIREF":
            return IRI(self.resolve(tok))
        if kind == "PNAME":
            return self.pname(tok)
        if kind == "BNODE":
            return self.bnode(tok)
        if kind == "PUNCT" and tok[1] in "[(":
            raise self.error("unsupported Turtle construct (anonymous blank nodes and collections)", tok)
        raise self.error("expected subject", tok)

    def verb(self):
        tok = self.next()
        if tok[0] == "WORD" and tok[1] == "a":
            if self.ntriples:
                raise self.error("'a' is not allowed in N-Triples", tok)
            return IRI(RDF_TYPE)
        if tok[0] == "IRIREF":
            return IRI(self.resolve(tok))
        if tok[0] == "PNAME":
            return self.pname(tok)
        raise self.error("expected predicate", tok)

    def object(self):
        tok = self.next()
        kind = tok[0]
        if kind == "IRIREF":
            return IRI(self.resolve(tok))
        if kind == "PNAME":
            return self.pname(tok)
        if kind == "BNODE":
            return self.bnode(tok)
        if kind.startswith("STRING"):
            if self.ntriples and kind != "STRING2":
                raise self.error("only double-quoted strings are allowed in N-Triples", tok)
            q = 3 if "LONG" in kind else 1
            lexical = _unescape(tok[1][q:-q], tok[2], tok[3])
            nxt = self.peek()
            if nxt is not None and nxt[0] == "LANGTAG":
                self.i += 1
                return Literal(lexical, lang=nxt[1][1:])
            if nxt is not None and nxt[0] == "DT":
                self.i += 1
                dt = self.next()
                if dt[0] == "IRIREF":
                    return Literal(lexical, self.resolve(dt))
                if dt[0] == "PNAME":
                    return Literal(lexical, self.pname(dt).value)
                raise self.error("expected datatype IRI", dt)
            return Literal(lexical)
        if self.ntriples:
            raise self.error("expected IRI, blank node or literal", tok)
        if kind == "INTEGER":
            return Literal(tok[1], XSD_INTEGER)
        if kind == "DECIMAL":
            return Literal(tok[1], XSD_DECIMAL)
        if kind == "DOUBLE":
            return Literal(tok[1], XSD_DOUBLE)
        if kind == "WORD" and tok[1] in ("true", "false"):
            return Literal(tok[1], XSD_BOOLEAN)
        if kind == "PUNCT" and tok[1] in "[(":
            raise self.error("unsupported Turtle construct (anonymous blank nodes and collections)", tok)
        raise self.error("expected object", tok)

    def pname(self, tok):
        if self.ntriples:
            raise self.error("prefixed names are not allowed in N-Triples", tok)
        prefix, _, local = tok[1].partition(":")
        if prefix not in self.prefixes:
            raise self.error(f"undefined prefix '{prefix}:'", tok)
        local = re.sub(r"\\(.)", r"\1", local)
        text = self.prefixes[prefix] + local
        if not is_absolute_iri(text):
            raise self.error("IRI is not absolute after prefix expansion", tok)
        return IRI(text)

    def bnode(self, tok):
        label = tok[1][2:]
        if self.skolemize:
            return IRI(f"{self.bnode_namespace}{self.file_id}:{label}")
        return BNode(f"{self.file_id}_{label}" if self.file_id else label)


def parse_triples(text, fmt="turtle", *, prefixes=None, file_id="0", skolemize=True,
                  bnode_namespace=DEFAULT_BNODE_NAMESPACE, source=None):
    """Parse ``text`` and return ``(triples, prefixes)``."""
    if fmt not in ("turtle", "ntriples"):
        raise ValueError(f"unknown RDF format: {fmt}")
    prefixes = {} if prefixes is None else prefixes
    parser = _Parser(text, fmt, prefixes, file_id, skolemize, bnode_namespace, source)
    return list(parser.parse()), prefixes


def load_rdf(stream, fmt, store, **options):
    """Parse an RDF text stream into ``store``; returns the number of new triples.

    ``stream`` may be a file object or a string. Nothing is added to the store
    if the input has a syntax error.
    """
    text = stream if isinstance(stream, str) else stream.read()
    triples, prefixes = parse_triples(text, fmt, **options)
    added = store.add_triples(triples)
    store.prefixes.update(prefixes)
    return added


def guess_format(path):
    p = str(path).lower()
    if p.endswith(".nt"):
        return "ntriples"
    return "turtle"


def load_file(path, store, fmt=None, **options):
    """Load a ``.ttl`` or ``.nt`` file (UTF-8)."""
    options.setdefault("file_id", hashlib.md5(str(path).encode("utf-8")).hexdigest()[:8])
    options.setdefault("source", str(path))
    with open(path, encoding="utf-8") as fh:
        return load_rdf(fh, fmt or guess_format(path), store, **options)


def serialize_ntriples(triples, out=None):
    """Write triples as N-Triples; returns the text when ``out`` is None."""
    lines = [f"{s.n3()} {p.n3()} {o.n3()} .\n" for s, p, o in triples]
    text = "".join(sorted(lines))
    if out is None:
        return text
    out.write(text)
    return None
