"""Immutable syntax tree for the supported SELECT subset.

A group is a sequence of elements evaluated as a join, with FILTERs scoped
over the whole group. IRIs are stored expanded, so two queries that differ
only in their prefix spelling have equal patterns.
"""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

from ..terms import IRI, Term


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return "?" + self.name


Position = Union[Term, Var]


@dataclass(frozen=True)
class TriplePattern:
    subject: Position
    predicate: Position
    object: Position

    def variables(self):
        return [t.name for t in (self.subject, self.predicate, self.object) if isinstance(t, Var)]


@dataclass(frozen=True)
class PathPattern:
    """``subject predicate* object``; ``modifier`` is ``"*"`` (zero-or-more)."""

    subject: Position
    predicate: IRI
    object: Position
    modifier: str = "*"

    def variables(self):
        return [t.name for t in (self.subject, self.object) if isinstance(t, Var)]


@dataclass(frozen=True)
class BasicPattern:
    triples: Tuple[Union[TriplePattern, PathPattern], ...]


@dataclass(frozen=True)
class Group:
    elements: tuple


@dataclass(frozen=True)
class Union_:
    left: Group
    right: Group


@dataclass(frozen=True)
class Optional_:
    pattern: Group


@dataclass(frozen=True)
class Values:
    variables: Tuple[str, ...]
    # None stands for UNDEF
    rows: Tuple[Tuple[Optional[Term], ...], ...]


@dataclass(frozen=True)
class Bind:
    expr: "Expression"
    var: str


@dataclass(frozen=True)
class Filter:
    expr: "Expression"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


@dataclass(frozen=True)
class BinOp:
    op: str  # '=', '!=', '&&', '||'
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Not:
    expr: "Expression"


Expression = Union[Var, Term, Call, BinOp, Not]

FUNCTION_ARITY = {"CONCAT": (1, None), "MD5": (1, 1), "IRI": (1, 1), "STR": (1, 1)}


@dataclass(frozen=True)
class Query:
    prefixes: Tuple[Tuple[str, str], ...]
    projection: Tuple[str, ...]
    pattern: Group

    def variables(self):
        return pattern_variables(self.pattern)


def expression_variables(expr):
    if isinstance(expr, Var):
        return [expr.name]
    if isinstance(expr, Call):
        return [v for a in expr.args for v in expression_variables(a)]
    if isinstance(expr, BinOp):
        return expression_variables(expr.left) + expression_variables(expr.right)
    if isinstance(expr, Not):
        return expression_variables(expr.expr)
    return []


def pattern_variables(node):
    """Variables mentioned anywhere in a pattern, in order of first appearance."""
    seen = {}

    def walk(n):
        if isinstance(n, Group):
            for e in n.elements:
                walk(e)
        elif isinstance(n, BasicPattern):
            for t in n.triples:
                for v in t.variables():
                    seen.setdefault(v, None)
        elif isinstance(n, Union_):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Optional_):
            walk(n.pattern)
        elif isinstance(n, Values):
            for v in n.variables:
                seen.setdefault(v, None)
        elif isinstance(n, Bind):
            for v in expression_variables(n.expr):
                seen.setdefault(v, None)
            seen.setdefault(n.var, None)
        elif isinstance(n, Filter):
            for v in expression_variables(n.expr):
                seen.setdefault(v, None)

    walk(node)
    return list(seen)


def binding_variables(node):
    """Variables a pattern can bind (FILTER-only mentions excluded)."""
    out = {}

    def walk(n):
        if isinstance(n, Group):
            for e in n.elements:
                walk(e)
        elif isinstance(n, BasicPattern):
            for t in n.triples:
                for v in t.variables():
                    out.setdefault(v, None)
        elif isinstance(n, Union_):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, Optional_):
            walk(n.pattern)
        elif isinstance(n, Values):
            for v in n.variables:
                out.setdefault(v, None)
        elif isinstance(n, Bind):
            out.setdefault(n.var, None)

    walk(node)
    return list(out)
