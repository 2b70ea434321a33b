"""Recursive-descent parser for the SELECT subset used by mapping queries.

Anything outside the subset is rejected with :class:`UnsupportedFeatureError`
naming the construct, never silently ignored.
"""
import re

from ..terms import (
    IRI,
    Literal,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    is_absolute_iri,
)
from .ast import (
    FUNCTION_ARITY,
    BasicPattern,
    BinOp,
    Bind,
    Call,
    Filter,
    Group,
    Not,
    Optional_,
    PathPattern,
    Query,
    TriplePattern,
    Union_,
    Values,
    Var,
    binding_variables,
    pattern_variables,
)


class QuerySyntaxError(ValueError):
    def __init__(self, message, line=None, column=None, token=None):
        self.message = message
        self.line = line
        self.column = column
        self.token = token
        where = f" at line {line}, column {column}" if line is not None else ""
        tok = f" (near {token!r})" if token is not None else ""
        super().__init__(f"{message}{where}{tok}")


class UnsupportedFeatureError(QuerySyntaxError):
    def __init__(self, feature, line=None, column=None, token=None):
        self.feature = feature
        super().__init__(
            f"unsupported SPARQL feature: {feature} (supported: basic graph patterns, "
            "UNION, OPTIONAL, VALUES, BIND, FILTER with = != && || !, p* paths, "
            "CONCAT/MD5/IRI/STR)",
            line,
            column,
            token,
        )


_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+|#[^\n]*"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("VAR", r"[?$][A-Za-z0-9_]+"),
    ("STRING_LONG2", r'"""(?:[^"\\]|\\.|"(?!""))*"""'),
    ("STRING_LONG1", r"'''(?:[^'\\]|\\.|'(?!''))*'''"),
    ("STRING2", r'"(?:[^"\\\n\r]|\\.)*"'),
    ("STRING1", r"'(?:[^'\\\n\r]|\\.)*'"),
    ("BNODE", r"_:[A-Za-z0-9_]+"),
    ("LANGTAG", r"@[a-zA-Z]+(?:-[a-zA-Z0-9]+)*"),
    ("DT", r"\^\^"),
    ("DOUBLE", r"(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"\d*\.\d+"),
    ("INTEGER", r"\d+"),
    ("PNAME", r"(?:[A-Za-z](?:[\w.\-]*[\w\-])?)?:(?:[\w%](?:[\w.%\-]*[\w%\-])?)?"),
    ("WORD", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("OP", r"!=|&&|\|\||<=|>=|[{}().;,*=!+/^|<>\[\]?-]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{rx})" for n, rx in _TOKEN_SPEC))
_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|.)", re.S)
_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}

_UNSUPPORTED_KEYWORDS = {
    "GROUP": "GROUP BY",
    "ORDER": "ORDER BY",
    "HAVING": "HAVING",
    "LIMIT": "LIMIT",
    "OFFSET": "OFFSET",
    "MINUS": "MINUS",
    "GRAPH": "GRAPH (named graphs)",
    "SERVICE": "SERVICE (federation)",
    "FROM": "FROM (dataset clauses)",
    "CONSTRUCT": "CONSTRUCT",
    "ASK": "ASK",
    "DESCRIBE": "DESCRIBE",
    "INSERT": "INSERT (SPARQL Update)",
    "DELETE": "DELETE (SPARQL Update)",
    "BASE": "BASE",
    "EXISTS": "EXISTS",
    "IN": "IN",
}
_AGGREGATES = {"COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "GROUP_CONCAT"}
_FUNCTION_ALIASES = {"URI": "IRI"}


def _tokenize(text):
    pos, line, line_start = 0, 1, 0
    out = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QuerySyntaxError("unexpected character", line, pos - line_start + 1, text[pos])
        kind, value = m.lastgroup, m.group()
        if kind != "WS":
            out.append((kind, value, line, pos - line_start + 1))
        nl = value.count("\n")
        if nl:
            line += nl
            line_start = pos + value.rfind("\n") + 1
        pos += len(value)
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes = {}
        self.prefix_decls = []

    # -- token helpers ---------------------------------------------------

    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, message, tok=None):
        tok = tok or self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            if last is None:
                return QuerySyntaxError(message, 1, 1, "<end of input>")
            return QuerySyntaxError(message, last[2], last[3] + len(last[1]), "<end of input>")
        return QuerySyntaxError(message, tok[2], tok[3], tok[1])

    def unsupported(self, feature, tok=None):
        tok = tok or self.peek()
        if tok is None:
            return UnsupportedFeatureError(feature)
        return UnsupportedFeatureError(feature, tok[2], tok[3], tok[1])

    def next(self):
        tok = self.peek()
        if tok is None:
            raise self.error("unexpected end of query")
        self.i += 1
        return tok

    def is_op(self, value, k=0):
        tok = self.peek(k)
        return tok is not None and tok[0] == "OP" and tok[1] == value

    def is_word(self, word, k=0):
        tok = self.peek(k)
        return tok is not None and tok[0] == "WORD" and tok[1].upper() == word

    def expect_op(self, value):
        tok = self.next()
        if tok[0] != "OP" or tok[1] != value:
            raise self.error(f"expected '{value}'", tok)
        return tok

    def expect_word(self, word):
        tok = self.next()
        if tok[0] != "WORD" or tok[1].upper() != word:
            raise self.error(f"expected {word}", tok)
        return tok

    def check_unsupported_word(self, tok):
        if tok is not None and tok[0] == "WORD":
            feature = _UNSUPPORTED_KEYWORDS.get(tok[1].upper())
            if feature:
                raise self.unsupported(feature, tok)

    # -- query -----------------------------------------------------------

    def query(self):
        while self.peek() is not None and self.is_word("PREFIX"):
            self.next()
            name = self.next()
            if name[0] != "PNAME" or not name[1].endswith(":") or name[1].count(":") != 1:
                raise self.error("expected prefix name ending in ':'", name)
            iri_tok = self.next()
            if iri_tok[0] != "IRIREF":
                raise self.error("expected IRI in PREFIX declaration", iri_tok)
            ns = iri_tok[1][1:-1]
            if not is_absolute_iri(ns):
                raise self.error("PREFIX IRI is not absolute", iri_tok)
            label = name[1][:-1]
            self.prefixes[label] = ns
            self.prefix_decls.append((label, ns))
        tok = self.peek()
        self.check_unsupported_word(tok)
        if tok is None or not self.is_word("SELECT"):
            raise self.error("expected SELECT")
        self.next()
        if self.is_word("DISTINCT") or self.is_word("REDUCED"):
            self.next()
        projection = []
        star = False
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok[0] == "VAR":
                self.next()
                projection.append(tok[1][1:])
            elif tok[0] == "OP" and tok[1] == "*" and not projection and not star:
                self.next()
                star = True
            elif tok[0] == "OP" and tok[1] == "(":
                raise self.unsupported("expressions or aggregates in the SELECT clause", tok)
            else:
                break
        if not projection and not star:
            raise self.error("expected projected variables or '*'")
        self.check_unsupported_word(self.peek())
        if self.is_word("WHERE"):
            self.next()
        pattern = self.group()
        tok = self.peek()
        if tok is not None:
            self.check_unsupported_word(tok)
            if tok[0] == "WORD" and tok[1].upper() == "VALUES":
                raise self.unsupported("trailing VALUES clause", tok)
            raise self.error("unexpected content after query", tok)
        if star:
            projection = pattern_variables(pattern)
        if len(set(projection)) != len(projection):
            raise self.error("duplicate projected variable")
        mentioned = set(pattern_variables(pattern))
        for v in projection:
            if v not in mentioned:
                raise QuerySyntaxError(f"projected variable ?{v} does not occur in the pattern")
        return Query(tuple(self.prefix_decls), tuple(projection), pattern)

    # -- patterns --------------------------------------------------------

    def group(self):
        self.expect_op("{")
        if self.is_word("SELECT"):
            raise self.unsupported("subqueries")
        elements = []
        triples = []
        scope = set()

        def flush():
            if triples:
                elements.append(BasicPattern(tuple(triples)))
                scope.update(binding_variables(elements[-1]))
                triples.clear()

        while True:
            tok = self.peek()
            if tok is None:
                raise self.error("unterminated group, expected '}'")
            if tok[0] == "OP" and tok[1] == "}":
                self.next()
                break
            if tok[0] == "OP" and tok[1] == ".":
                self.next()
                continue
            self.check_unsupported_word(tok)
            if tok[0] == "OP" and tok[1] == "{":
                flush()
                node = self.group()
                while self.is_word("UNION"):
                    self.next()
                    node = Union_(node, self.group())
                elements.append(node)
            elif tok[0] == "WORD" and tok[1].upper() == "OPTIONAL":
                flush()
                self.next()
                elements.append(Optional_(self.group()))
            elif tok[0] == "WORD" and tok[1].upper() == "VALUES":
                flush()
                self.next()
                elements.append(self.values())
            elif tok[0] == "WORD" and tok[1].upper() == "BIND":
                flush()
                self.next()
                self.expect_op("(")
                expr = self.expression()
                self.expect_word("AS")
                var_tok = self.next()
                if var_tok[0] != "VAR":
                    raise self.error("expected variable after AS", var_tok)
                self.expect_op(")")
                name = var_tok[1][1:]
                for e in elements:
                    scope.update(binding_variables(e))
                if name in scope:
                    raise self.error(f"BIND target ?{name} is already bound in this group", var_tok)
                elements.append(Bind(expr, name))
            elif tok[0] == "WORD" and tok[1].upper() == "FILTER":
                flush()
                self.next()
                if self.is_word("NOT") or self.is_word("EXISTS"):
                    raise self.unsupported("FILTER EXISTS / NOT EXISTS")
                if not self.is_op("("):
                    raise self.unsupported("FILTER without parentheses (function-call form)")
                self.next()
                expr = self.expression()
                self.expect_op(")")
                elements.append(Filter(expr))
            else:
                self.triples_block(triples)
        flush()
        return Group(tuple(elements))

    def values(self):
        variables = []
        if self.peek() is not None and self.peek()[0] == "VAR":
            variables.append(self.next()[1][1:])
            single = True
        else:
            self.expect_op("(")
            single = False
            while self.peek() is not None and self.peek()[0] == "VAR":
                variables.append(self.next()[1][1:])
            self.expect_op(")")
        if len(set(variables)) != len(variables):
            raise self.error("duplicate variable in VALUES")
        self.expect_op("{")
        rows = []
        while not self.is_op("}"):
            if single:
                rows.append((self.values_term(),))
            else:
                self.expect_op("(")
                row = []
                while not self.is_op(")"):
                    row.append(self.values_term())
                self.expect_op(")")
                if len(row) != len(variables):
                    raise self.error(f"VALUES row has {len(row)} terms, expected {len(variables)}")
                rows.append(tuple(row))
        self.expect_op("}")
        return Values(tuple(variables), tuple(rows))

    def values_term(self):
        tok = self.peek()
        if tok is not None and tok[0] == "WORD" and tok[1].upper() == "UNDEF":
            self.next()
            return None
        term = self.term(allow_var=False)
        return term

    def triples_block(self, out):
        subj = self.term(allow_literal=False)
        while True:
            pred, path = self.verb()
            while True:
                obj = self.term()
                if path:
                    out.append(PathPattern(subj, pred, obj, "*"))
                else:
                    out.append(TriplePattern(subj, pred, obj))
                if self.is_op(","):
                    self.next()
                    continue
                break
            if self.is_op(";"):
                while self.is_op(";"):
                    self.next()
                if self.is_op(".") or self.is_op("}"):
                    return
                continue
            return

    def verb(self):
        tok = self.peek()
        if tok is None:
            raise self.error("expected predicate")
        if tok[0] == "OP" and tok[1] in ("^", "(", "!"):
            raise self.unsupported("property path operator " + tok[1], tok)
        if tok[0] == "WORD" and tok[1] == "a":
            self.next()
            pred = IRI(RDF_TYPE)
        elif tok[0] == "VAR":
            self.next()
            pred = Var(tok[1][1:])
        elif tok[0] in ("IRIREF", "PNAME"):
            pred = self.term(allow_var=False, allow_literal=False)
        else:
            raise self.error("expected predicate", tok)
        nxt = self.peek()
        if nxt is not None and nxt[0] == "OP" and nxt[1] in ("*", "+", "?", "/", "|"):
            if isinstance(pred, Var):
                raise self.error("property paths need an IRI predicate", nxt)
            if nxt[1] != "*":
                raise self.unsupported(f"property path operator {nxt[1]}", nxt)
            self.next()
            after = self.peek()
            if after is not None and after[0] == "OP" and after[1] in ("/", "|"):
                raise self.unsupported(f"property path operator {after[1]}", after)
            return pred, True
        return pred, False

    def iri(self, tok):
        if tok[0] == "IRIREF":
            text = tok[1][1:-1]
            if not is_absolute_iri(text):
                raise self.error("IRI is not absolute", tok)
            return IRI(text)
        prefix, _, local = tok[1].partition(":")
        if prefix not in self.prefixes:
            raise self.error(f"undefined prefix '{prefix}:'", tok)
        return IRI(self.prefixes[prefix] + local)

    def term(self, allow_var=True, allow_literal=True):
        tok = self.next()
        kind = tok[0]
        if kind == "VAR":
            if not allow_var:
                raise self.error("variable not allowed here", tok)
            return Var(tok[1][1:])
        if kind in ("IRIREF", "PNAME"):
            return self.iri(tok)
        if kind == "BNODE" or (kind == "OP" and tok[1] == "["):
            raise self.unsupported("blank nodes in query patterns", tok)
        if kind == "OP" and tok[1] == "(":
            raise self.unsupported("RDF collections", tok)
        lit = self.literal(tok)
        if lit is None:
            raise self.error("expected RDF term", tok)
        if not allow_literal:
            raise self.error("literal not allowed here", tok)
        return lit

    def literal(self, tok):
        kind = tok[0]
        if kind.startswith("STRING"):
            q = 3 if "LONG" in kind else 1
            lexical = _ESCAPE_RE.sub(self._unescape, tok[1][q:-q])
            nxt = self.peek()
            if nxt is not None and nxt[0] == "LANGTAG":
                self.next()
                return Literal(lexical, lang=nxt[1][1:])
            if nxt is not None and nxt[0] == "DT":
                self.next()
                dt = self.next()
                if dt[0] not in ("IRIREF", "PNAME"):
                    raise self.error("expected datatype IRI", dt)
                return Literal(lexical, self.iri(dt).value)
            return Literal(lexical)
        if kind == "OP" and tok[1] in "+-":
            nxt = self.peek()
            if nxt is not None and nxt[0] in ("INTEGER", "DECIMAL", "DOUBLE"):
                self.next()
                return self.literal((nxt[0], tok[1] + nxt[1], nxt[2], nxt[3]))
            return None
        if kind == "INTEGER":
            return Literal(tok[1], XSD_INTEGER)
        if kind == "DECIMAL":
            return Literal(tok[1], XSD_DECIMAL)
        if kind == "DOUBLE":
            return Literal(tok[1], XSD_DOUBLE)
        if kind == "WORD" and tok[1] in ("true", "false"):
            return Literal(tok[1], XSD_BOOLEAN)
        return None

    def _unescape(self, m):
        code = m.group(1)
        if code[0] in "uU" and len(code) > 1:
            return chr(int(code[1:], 16))
        if code in _ESCAPES:
            return _ESCAPES[code]
        raise self.error("invalid string escape")

    # -- expressions -----------------------------------------------------

    def expression(self):
        left = self.and_expr()
        while self.is_op("||"):
            self.next()
            left = BinOp("||", left, self.and_expr())
        return left

    def and_expr(self):
        left = self.relational()
        while self.is_op("&&"):
            self.next()
            left = BinOp("&&", left, self.relational())
        return left

    def relational(self):
        left = self.unary()
        tok = self.peek()
        if tok is not None and tok[0] == "OP":
            if tok[1] in ("=", "!="):
                self.next()
                return BinOp(tok[1], left, self.unary())
            if tok[1] in ("<", ">", "<=", ">="):
                raise self.unsupported(f"ordering comparison {tok[1]}", tok)
            if tok[1] in ("+", "-", "*", "/"):
                raise self.unsupported(f"arithmetic operator {tok[1]}", tok)
        self.check_unsupported_word(tok)
        return left

    def unary(self):
        if self.is_op("!"):
            self.next()
            return Not(self.unary())
        return self.primary()

    def primary(self):
        tok = self.peek()
        if tok is None:
            raise self.error("expected expression")
        if tok[0] == "OP" and tok[1] == "(":
            self.next()
            expr = self.expression()
            self.expect_op(")")
            return expr
        if tok[0] == "VAR":
            self.next()
            return Var(tok[1][1:])
        if tok[0] == "WORD" and tok[1] not in ("true", "false"):
            name = tok[1].upper()
            name = _FUNCTION_ALIASES.get(name, name)
            self.check_unsupported_word(tok)
            if name in _AGGREGATES:
                raise self.unsupported(f"aggregate {name}", tok)
            if name not in FUNCTION_ARITY:
                raise self.unsupported(f"function {tok[1]}", tok)
            self.next()
            self.expect_op("(")
            args = []
            if not self.is_op(")"):
                args.append(self.expression())
                while self.is_op(","):
                    self.next()
                    args.append(self.expression())
            self.expect_op(")")
            lo, hi = FUNCTION_ARITY[name]
            if len(args) < lo or (hi is not None and len(args) > hi):
                want = f"exactly {lo}" if lo == hi else f"at least {lo}"
                raise self.error(f"{name} takes {want} argument(s), got {len(args)}", tok)
            return Call(name, tuple(args))
        if tok[0] in ("IRIREF", "PNAME"):
            self.next()
            return self.iri(tok)
        self.next()
        lit = self.literal(tok)
        if lit is None:
            raise self.error("expected expression", tok)
        return lit


def parse_select(text):
    """Parse one SELECT query into a :class:`Query`."""
    return _Parser(text).query()


# -- serialization -------------------------------------------------------


def _term_text(t):
    if isinstance(t, Var):
        return "?" + t.name
    return t.n3()


def _expr_text(e):
    if isinstance(e, Call):
        return f"{e.name}({', '.join(_expr_text(a) for a in e.args)})"
    if isinstance(e, BinOp):
        return f"({_expr_text(e.left)} {e.op} {_expr_text(e.right)})"
    if isinstance(e, Not):
        return f"!{_expr_text(e.expr)}"
    return _term_text(e)


def _pattern_lines(node, indent):
    pad = "  " * indent
    if isinstance(node, Group):
        lines = [pad + "{"]
        for e in node.elements:
            lines.extend(_pattern_lines(e, indent + 1))
        lines.append(pad + "}")
        return lines
    if isinstance(node, BasicPattern):
        out = []
        for t in node.triples:
            if isinstance(t, PathPattern):
                out.append(f"{pad}{_term_text(t.subject)} {t.predicate.n3()}{t.modifier} {_term_text(t.object)} .")
            else:
                out.append(f"{pad}{_term_text(t.subject)} {_term_text(t.predicate)} {_term_text(t.object)} .")
        return out
    if isinstance(node, Union_):
        left = _pattern_lines(node.left, indent)
        right = _pattern_lines(node.right, indent)
        return left + [pad + "UNION"] + right
    if isinstance(node, Optional_):
        inner = _pattern_lines(node.pattern, indent)
        inner[0] = pad + "OPTIONAL " + inner[0].lstrip()
        return inner
    if isinstance(node, Values):
        head = " ".join("?" + v for v in node.variables)
        rows = " ".join(
            "(" + " ".join("UNDEF" if t is None else t.n3() for t in row) + ")" for row in node.rows
        )
        return [f"{pad}VALUES ({head}) {{ {rows} }}"]
    if isinstance(node, Bind):
        return [f"{pad}BIND({_expr_text(node.expr)} AS ?{node.var})"]
    if isinstance(node, Filter):
        return [f"{pad}FILTER({_expr_text(node.expr)})"]
    raise TypeError(f"not a pattern node: {node!r}")


def to_sparql(query):
    """Serialize a :class:`Query` back to SPARQL text that parses to an equal query."""
    lines = [f"PREFIX {label}: <{ns}>" for label, ns in query.prefixes]
    lines.append("SELECT " + " ".join("?" + v for v in query.projection))
    lines.append("WHERE")
    lines.extend(_pattern_lines(query.pattern, 0))
    return "\n".join(lines) + "\n"
