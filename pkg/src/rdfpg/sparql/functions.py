"""Expression evaluation. Errors evaluate to ``None`` (unbound), never raise."""
import hashlib

from ..terms import (
    IRI,
    Literal,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    is_absolute_iri,
    lexical_form,
)
from .ast import BinOp, Call, Not, Var

TRUE = Literal("true", XSD_BOOLEAN)
FALSE = Literal("false", XSD_BOOLEAN)
_NUMERIC = {XSD_INTEGER, XSD_DECIMAL, XSD_DOUBLE}


def _text(term):
    if term is None:
        return None
    return lexical_form(term)


def concat(*args):
    parts = [_text(a) for a in args]
    if any(p is None for p in parts):
        return None
    return Literal("".join(parts))


def md5(arg):
    text = _text(arg)
    if text is None:
        return None
    return Literal(hashlib.md5(text.encode("utf-8")).hexdigest())


def to_iri(arg):
    if isinstance(arg, IRI):
        return arg
    if isinstance(arg, Literal) and is_absolute_iri(arg.lexical):
        return IRI(arg.lexical)
    return None


def to_str(arg):
    text = _text(arg)
    return None if text is None else Literal(text)


_FUNCTIONS = {"CONCAT": concat, "MD5": md5, "IRI": to_iri, "STR": to_str}


def effective_boolean(term):
    """SPARQL effective boolean value; ``None`` when it is an error."""
    if not isinstance(term, Literal):
        return None
    if term.datatype == XSD_BOOLEAN:
        if term.lexical in ("true", "1"):
            return True
        if term.lexical in ("false", "0"):
            return False
        return None
    if term.datatype in (XSD_STRING,) or term.lang:
        return term.lexical != ""
    if term.datatype in _NUMERIC:
        try:
            return float(term.lexical) != 0.0
        except ValueError:
            return None
    return None


def eval_expression(expr, solution):
    """Evaluate ``expr`` against a solution mapping; returns a Term or None."""
    if isinstance(expr, Var):
        return solution.get(expr.name)
    if isinstance(expr, Call):
        args = [eval_expression(a, solution) for a in expr.args]
        return _FUNCTIONS[expr.name](*args)
    if isinstance(expr, BinOp):
        if expr.op in ("=", "!="):
            left = eval_expression(expr.left, solution)
            right = eval_expression(expr.right, solution)
            if left is None or right is None:
                return None
            same = left == right
            return TRUE if same == (expr.op == "=") else FALSE
        left = effective_boolean(eval_expression(expr.left, solution))
        right = effective_boolean(eval_expression(expr.right, solution))
        # SPARQL three-valued logic: an error only wins when it decides the result
        if expr.op == "||":
            if left is True or right is True:
                return TRUE
            if left is None or right is None:
                return None
            return FALSE
        if left is False or right is False:
            return FALSE
        if left is None or right is None:
            return None
        return TRUE
    if isinstance(expr, Not):
        value = effective_boolean(eval_expression(expr.expr, solution))
        if value is None:
            return None
        return FALSE if value else TRUE
    return expr
