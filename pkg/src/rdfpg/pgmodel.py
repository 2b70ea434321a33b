"""Abstract labelled property graph: the model handlers build and emitters consume."""
import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Tuple

SCALAR_TYPES = (str, int, float, bool)
RESERVED_PROPERTY = "iri"


class GraphValidationError(ValueError):
    pass


class PropertyTypeConflict(GraphValidationError):
    def __init__(self, iri, name, types):
        self.iri = iri
        self.name = name
        super().__init__(
            f"property '{name}' of {iri} mixes value types: {', '.join(sorted(t.__name__ for t in types))}"
        )


class DuplicateRelationError(GraphValidationError):
    def __init__(self, iri, first, second):
        self.iri = iri
        super().__init__(f"relation {iri} defined twice with different content: {first} vs {second}")


def value_type(value):
    """Scalar type of a property value (``type(True)`` is ``bool``, never ``int``)."""
    if isinstance(value, tuple):
        return type(value[0])
    return type(value)


def lexical(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _sort_key(value):
    # lexical order first; type/repr break ties such as 1.0 vs 1 across types
    return (lexical(value), type(value).__name__)


def normalize_value(values, iri="?", name="?"):
    """Canonical value for a collection of scalars: a scalar, or a sorted deduplicated tuple."""
    flat = []
    for v in values:
        if isinstance(v, (tuple, list)):
            flat.extend(v)
        else:
            flat.append(v)
    if not flat:
        raise ValueError(f"property '{name}' of {iri} has no values")
    types = {type(v) for v in flat}
    for t in types:
        if t not in SCALAR_TYPES:
            raise TypeError(f"property '{name}' of {iri}: unsupported value type {t.__name__}")
    if len(types) > 1:
        raise PropertyTypeConflict(iri, name, types)
    if float in types and any(math.isnan(v) for v in flat):
        raise ValueError(f"property '{name}' of {iri}: NaN is not a valid property value")
    unique = sorted(set(flat), key=_sort_key)
    if len(unique) == 1:
        return unique[0]
    return tuple(unique)


@dataclass(frozen=True)
class PGNode:
    iri: str
    labels: FrozenSet[str] = frozenset()
    properties: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if not self.iri:
            raise ValueError("node IRI must be non-empty")
        if RESERVED_PROPERTY in self.properties:
            raise ValueError(f"node {self.iri}: '{RESERVED_PROPERTY}' is a reserved property name")
        if not isinstance(self.labels, frozenset):
            object.__setattr__(self, "labels", frozenset(self.labels))

    __hash__ = None


@dataclass(frozen=True)
class PGRelation:
    iri: str
    type: str
    from_iri: str
    to_iri: str
    properties: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        for attr in ("iri", "type", "from_iri", "to_iri"):
            if not getattr(self, attr):
                raise ValueError(f"relation {self.iri!r}: {attr} must be non-empty")
        if RESERVED_PROPERTY in self.properties:
            raise ValueError(f"relation {self.iri}: '{RESERVED_PROPERTY}' is a reserved property name")

    __hash__ = None

    def stub(self):
        return (self.type, self.from_iri, self.to_iri)


def merge_properties(iri, a, b):
    merged = dict(a)
    for name, value in b.items():
        if name in merged:
            merged[name] = normalize_value([merged[name], value], iri, name)
        else:
            merged[name] = value
    return merged


def merge_node(existing, incoming):
    """Union of labels and of per-name property values for two views of one node."""
    if existing.iri != incoming.iri:
        raise ValueError(f"cannot merge nodes with different IRIs: {existing.iri} vs {incoming.iri}")
    return PGNode(
        existing.iri,
        existing.labels | incoming.labels,
        dict(sorted(merge_properties(existing.iri, existing.properties, incoming.properties).items())),
    )


class PropertyGraph:
    """Nodes and relations keyed by IRI.

    Adding a node whose IRI is already present merges the two; adding a
    relation whose IRI is present is a no-op if identical and an error
    otherwise.
    """

    def __init__(self, nodes=(), relations=()):
        self.nodes: Dict[str, PGNode] = {}
        self.relations: Dict[str, PGRelation] = {}
        self.merges = 0
        for n in nodes:
            self.add_node(n)
        for r in relations:
            self.add_relation(r)

    def add_node(self, node):
        prev = self.nodes.get(node.iri)
        if prev is None:
            self.nodes[node.iri] = node
        else:
            self.nodes[node.iri] = merge_node(prev, node)
            self.merges += 1

    def add_relation(self, rel):
        prev = self.relations.get(rel.iri)
        if prev is None:
            self.relations[rel.iri] = rel
            return True
        if prev != rel:
            raise DuplicateRelationError(rel.iri, _describe(prev), _describe(rel))
        return False

    def __eq__(self, other):
        return (
            isinstance(other, PropertyGraph)
            and self.nodes == other.nodes
            and self.relations == other.relations
        )

    __hash__ = None

    def __repr__(self):
        return f"PropertyGraph(nodes={len(self.nodes)}, relations={len(self.relations)})"

    def sorted_nodes(self):
        return [self.nodes[k] for k in sorted(self.nodes)]

    def sorted_relations(self):
        return [self.relations[k] for k in sorted(self.relations)]

    def labels(self):
        return sorted({label for n in self.nodes.values() for label in n.labels})


def _describe(rel):
    return f"({rel.type}, {rel.from_iri}, {rel.to_iri}, {rel.properties})"


@dataclass
class CheckReport:
    """Findings of a graph validation or a reconstruction check."""

    ok: bool = True
    dangling: List[Tuple[str, str]] = field(default_factory=list)
    empty_label_nodes: List[str] = field(default_factory=list)
    missing: list = field(default_factory=list)
    extra: list = field(default_factory=list)
    graph: "PropertyGraph" = None

    @property
    def dangling_count(self):
        """Number of relations with at least one missing endpoint."""
        return len({rel for rel, _ in self.dangling})


def validate_graph(pg, mode="error"):
    """Check relation endpoints and node labels.

    In ``skip`` mode relations with a missing endpoint are dropped from the
    returned ``report.graph``; in ``error`` mode they raise
    :class:`GraphValidationError` listing every offender.
    """
    if mode not in ("error", "skip"):
        raise ValueError(f"unknown dangling mode: {mode}")
    report = CheckReport()
    report.empty_label_nodes = sorted(iri for iri, n in pg.nodes.items() if not n.labels)
    kept = []
    for rel in pg.sorted_relations():
        missing = [e for e in (rel.from_iri, rel.to_iri) if e not in pg.nodes]
        if missing:
            report.dangling.extend((rel.iri, e) for e in missing)
        else:
            kept.append(rel)
    if report.dangling and mode == "error":
        offenders = "; ".join(f"{rel} -> missing {e}" for rel, e in report.dangling)
        raise GraphValidationError(f"{len(report.dangling)} dangling relation endpoint(s): {offenders}")
    if report.dangling:
        graph = PropertyGraph()
        graph.nodes = dict(pg.nodes)
        for rel in kept:
            graph.relations[rel.iri] = rel
        report.graph = graph
    else:
        report.graph = pg
    report.ok = not report.dangling and not report.empty_label_nodes
    return report
