"""The SPARQL-driven RDF to property graph mapping.

A query set lists node IRIs, then fetches labels and properties for each IRI
with ``?iri`` pre-bound; the same is done for relations. Node and relation
details are built by a pool of handlers over batches of IRIs and sent to a
single consumer that assembles the graph and feeds an emitter.
"""
import logging
import math
import os
import queue
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

from .naming import NamePolicy, NameRegistry
from .pgmodel import (
    RESERVED_PROPERTY,
    PGNode,
    PGRelation,
    PropertyGraph,
    normalize_value,
    validate_graph,
)
from .sparql import QuerySyntaxError, evaluate, parse_select
from .terms import IRI, Literal, XSD

log = logging.getLogger(__name__)

QUERY_FILES = {
    "node_iris_query": ("node-iris.sparql", True),
    "node_labels_query": ("node-labels.sparql", True),
    "node_props_query": ("node-props.sparql", True),
    "relations_query": ("relations.sparql", False),
    "relation_props_query": ("relation-props.sparql", False),
}
PREFIXES_FILE = "prefixes.sparql"

# role -> (variables that must be projected, whether ?iri is a parameter)
CONTRACTS = {
    "node_iris_query": (("iri",), False),
    "node_labels_query": (("label",), True),
    "node_props_query": (("name", "value"), True),
    "relations_query": (("iri", "type", "fromIri", "toIri"), False),
    "relation_props_query": (("name", "value"), True),
}

_INT_TYPES = {XSD + t for t in ("integer", "long", "int")}
_FLOAT_TYPES = {XSD + t for t in ("double", "float", "decimal")}
_BOOL_TYPE = XSD + "boolean"


class ManifestError(ValueError):
    """The manifest is missing, unreadable or lists no query sets."""


class MappingError(ValueError):
    """A mapping query violates its contract, or produced data it cannot map."""


class QueryFileError(ValueError):
    """A query file failed to parse; carries the file name and position."""

    def __init__(self, path, error):
        self.path = str(path)
        self.error = error
        super().__init__(f"{path}: {error}")


@dataclass
class QuerySet:
    name: str
    node_iris_query: object
    node_labels_query: object
    node_props_query: object
    relations_query: object = None
    relation_props_query: object = None

    def __post_init__(self):
        if self.relation_props_query is not None and self.relations_query is None:
            raise MappingError(
                f"query set '{self.name}': a relation properties query needs a relations query"
            )
        for role in QUERY_FILES:
            q = getattr(self, role)
            if q is not None:
                check_contract(role, q, self.name)


def check_contract(role, query, where):
    """Verify that ``query`` projects the reserved variables of its role."""
    required, parameterised = CONTRACTS[role]
    missing = [v for v in required if v not in query.projection]
    fname = QUERY_FILES[role][0]
    if missing:
        raise MappingError(
            f"{where}/{fname}: must project {' '.join('?' + v for v in required)}; "
            f"missing {' '.join('?' + v for v in missing)} "
            f"(projects {' '.join('?' + v for v in query.projection) or 'nothing'})"
        )
    if parameterised and "iri" not in query.variables():
        raise MappingError(f"{where}/{fname}: the pattern must use the ?iri parameter")


@dataclass
class MappingConfig:
    query_sets: List[QuerySet]
    batch_size: int = 2500
    parallelism: int = 1
    default_label: Optional[str] = "Resource"
    dangling_mode: str = "error"
    name_policy: NamePolicy = field(default_factory=NamePolicy)
    deterministic_output: bool = False

    def __post_init__(self):
        if not self.query_sets:
            raise ManifestError("a mapping needs at least one query set")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if self.dangling_mode not in ("error", "skip"):
            raise ValueError(f"dangling_mode must be 'error' or 'skip', got {self.dangling_mode!r}")


@dataclass
class ConversionStats:
    nodes_emitted: int = 0
    relations_emitted: int = 0
    node_merges: int = 0
    dangling_skipped: int = 0
    lang_tags_dropped: int = 0
    timings: dict = field(default_factory=lambda: {
        "listing": 0.0, "node_build": 0.0, "relation_build": 0.0, "emission": 0.0})
    provenance: dict = field(default_factory=dict, repr=False)
    graph: object = field(default=None, repr=False, compare=False)

    def as_dict(self):
        return {
            "nodes": self.nodes_emitted,
            "relations": self.relations_emitted,
            "node_merges": self.node_merges,
            "dangling_skipped": self.dangling_skipped,
            "lang_tags_dropped": self.lang_tags_dropped,
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
        }


class RelationStub(NamedTuple):
    iri: IRI
    type: IRI
    from_iri: str
    to_iri: str


# -- loading ---------------------------------------------------------------


def parse_query_file(path, prefixes_text=""):
    with open(path, encoding="utf-8") as fh:
        body = fh.read()
    return parse_query_text(body, prefixes_text, path)


def parse_query_text(body, prefixes_text="", path="<query>"):
    offset = prefixes_text.count("\n") + 1 if prefixes_text else 0
    text = f"{prefixes_text}\n{body}" if prefixes_text else body
    try:
        return parse_select(text)
    except QuerySyntaxError as e:
        if e.line is not None and e.line > offset:
            e.line -= offset
            e.args = (f"{e.message} at line {e.line}, column {e.column} (near {e.token!r})",)
        raise QueryFileError(path, e) from e


def load_query_set(directory, name=None):
    directory = os.fspath(directory)
    if not os.path.isdir(directory):
        raise ManifestError(f"query set directory not found: {directory}")
    prefixes_text = ""
    ppath = os.path.join(directory, PREFIXES_FILE)
    if os.path.exists(ppath):
        with open(ppath, encoding="utf-8") as fh:
            prefixes_text = fh.read().rstrip("\n")
    queries = {}
    for role, (fname, required) in QUERY_FILES.items():
        path = os.path.join(directory, fname)
        if not os.path.exists(path):
            if required:
                raise MappingError(f"query set {directory}: missing required file {fname}")
            queries[role] = None
            continue
        query = parse_query_file(path, prefixes_text)
        check_contract(role, query, directory)
        queries[role] = query
    return QuerySet(name=name or os.path.basename(os.path.normpath(directory)), **queries)


def read_manifest(manifest_path):
    """Query-set directories listed in a manifest, resolved against its location."""
    manifest_path = os.fspath(manifest_path)
    if not os.path.isfile(manifest_path):
        raise ManifestError(f"mapping manifest not found: {manifest_path}")
    base = os.path.dirname(os.path.abspath(manifest_path))
    dirs = []
    with open(manifest_path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            dirs.append(os.path.join(base, line))
    if not dirs:
        raise ManifestError(f"mapping manifest lists no query sets: {manifest_path}")
    return dirs


def load_mapping(manifest_path, **options):
    """Load every query set named in a manifest into a :class:`MappingConfig`."""
    sets = [load_query_set(d) for d in read_manifest(manifest_path)]
    return MappingConfig(query_sets=sets, **options)


# -- values ----------------------------------------------------------------


def literal_value(term, stats=None):
    """Property value for an RDF term: typed scalars for numeric/boolean literals, text otherwise."""
    if isinstance(term, IRI):
        return term.value
    if not isinstance(term, Literal):
        return str(term)
    dt = term.datatype
    text = term.lexical
    try:
        if dt in _INT_TYPES:
            return int(text.strip())
        if dt in _FLOAT_TYPES:
            value = float(text.strip())
            if math.isfinite(value):
                return value
            return text
        if dt == _BOOL_TYPE:
            if text in ("true", "1"):
                return True
            if text in ("false", "0"):
                return False
    except ValueError:
        pass
    if term.lang and stats is not None:
        stats.lang_tags_dropped += 1
    return text


def _name_source(term):
    if isinstance(term, IRI):
        return term.value
    return str(term)


class _Context:
    """Per-conversion state shared by handler threads."""

    def __init__(self, store, config):
        self.store = store
        self.config = config
        self.names = NameRegistry(config.name_policy)
        self.stats = ConversionStats()
        self._lock = threading.Lock()

    def count_lang(self, n):
        if n:
            with self._lock:
                self.stats.lang_tags_dropped += n


def _collect_properties(ctx, query, iri, owner):
    if query is None:
        return {}
    values = {}
    lang = ConversionStats()
    for sol in evaluate(query, ctx.store, {"iri": iri}):
        name_term = sol.get("name")
        value_term = sol.get("value")
        if name_term is None or value_term is None:
            continue
        name = ctx.names.name("property", _name_source(name_term))
        if name == RESERVED_PROPERTY:
            raise MappingError(f"{owner} {iri.value}: property name '{name}' is reserved for identity")
        values.setdefault(name, []).append(literal_value(value_term, lang))
    ctx.count_lang(lang.lang_tags_dropped)
    return {k: normalize_value(v, iri.value, k) for k, v in sorted(values.items())}


# -- nodes -----------------------------------------------------------------


def list_node_iris(store, qs, deterministic=False):
    """Distinct IRIs selected by the node IRIs query."""
    seen = {}
    for sol in evaluate(qs.node_iris_query, store):
        term = sol.get("iri")
        if not isinstance(term, IRI):
            raise MappingError(
                f"query set '{qs.name}': node identity must be an IRI, got {term!r} in {sol}"
            )
        seen.setdefault(term, None)
    iris = list(seen)
    if deterministic:
        iris.sort(key=lambda t: t.value)
    return iris


def _build_node(ctx, qs, iri):
    labels = set()
    for sol in evaluate(qs.node_labels_query, ctx.store, {"iri": iri}):
        term = sol.get("label")
        if term is not None:
            labels.add(ctx.names.name("label", _name_source(term)))
    if ctx.config.default_label:
        labels.add(ctx.config.default_label)
    props = _collect_properties(ctx, qs.node_props_query, iri, "node")
    return PGNode(iri.value, frozenset(labels), props)


def build_node(store, qs, iri, config=None, names=None):
    """Build one node; ``names`` lets several calls share a collision registry."""
    config = config or MappingConfig(query_sets=[qs])
    ctx = _Context(store, config)
    if names is not None:
        ctx.names = names
    if isinstance(iri, str):
        iri = IRI(iri)
    return _build_node(ctx, qs, iri)


# -- relations -------------------------------------------------------------


def list_relations(store, qs, deterministic=False):
    """Distinct relation stubs (iri, type, endpoints) of one query set."""
    if qs.relations_query is None:
        return []
    stubs = {}
    for sol in evaluate(qs.relations_query, store):
        missing = [v for v in ("iri", "type", "fromIri", "toIri") if v not in sol]
        if missing:
            raise MappingError(
                f"query set '{qs.name}': relation solution lacks {', '.join('?' + m for m in missing)}: {sol}"
            )
        iri, rtype = sol["iri"], sol["type"]
        ends = []
        for var in ("fromIri", "toIri"):
            term = sol[var]
            if not isinstance(term, IRI):
                raise MappingError(
                    f"query set '{qs.name}': relation endpoint ?{var} must be an IRI, got {term!r} in {sol}"
                )
            ends.append(term.value)
        if not isinstance(iri, IRI):
            raise MappingError(f"query set '{qs.name}': relation identity must be an IRI, got {iri!r}")
        stub = RelationStub(iri, rtype, ends[0], ends[1])
        prev = stubs.get(iri)
        if prev is None:
            stubs[iri] = stub
        elif prev != stub:
            raise MappingError(
                f"query set '{qs.name}': relation {iri.value} listed with conflicting "
                f"type/endpoints: {tuple(prev[1:])} vs {tuple(stub[1:])}"
            )
    out = list(stubs.values())
    if deterministic:
        out.sort(key=lambda s: s.iri.value)
    return out


def _build_relation(ctx, qs, stub):
    rtype = ctx.names.name("type", _name_source(stub.type))
    props = _collect_properties(ctx, qs.relation_props_query, stub.iri, "relation")
    return PGRelation(stub.iri.value, rtype, stub.from_iri, stub.to_iri, props)


def build_relation(store, qs, stub, config=None, names=None):
    config = config or MappingConfig(query_sets=[qs])
    ctx = _Context(store, config)
    if names is not None:
        ctx.names = names
    return _build_relation(ctx, qs, stub)


# -- pipeline --------------------------------------------------------------

_DONE = object()


class _Failure:
    def __init__(self, exc):
        self.exc = exc


def run_batches(items, fn, batch_size, parallelism, consume):
    """Apply ``fn`` to every item on a pool of handlers; ``consume`` sees results in one thread.

    Results travel per batch over a bounded queue, so handlers block when the
    consumer falls behind. The first handler error cancels outstanding
    batches and is re-raised here.
    """
    batches = [items[i:i + batch_size] for i in range(0, len(items), batch_size)]
    if not batches:
        return
    if parallelism == 1:
        for batch in batches:
            results = [fn(item) for item in batch]
            for r in results:
                consume(r)
        return
    results_q = queue.Queue(maxsize=2 * parallelism)
    cancel = threading.Event()

    def handler(batch):
        try:
            if cancel.is_set():
                return
            results_q.put([fn(item) for item in batch])
        except BaseException as e:  # forwarded to the consumer
            cancel.set()
            results_q.put(_Failure(e))
        finally:
            results_q.put(_DONE)

    failure = None
    with ThreadPoolExecutor(max_workers=parallelism, thread_name_prefix="rdfpg-handler") as pool:
        for batch in batches:
            pool.submit(handler, batch)
        remaining = len(batches)
        while remaining:
            msg = results_q.get()
            if msg is _DONE:
                remaining -= 1
            elif isinstance(msg, _Failure):
                if failure is None:
                    failure = msg.exc
            elif failure is None:
                try:
                    for r in msg:
                        consume(r)
                except BaseException as e:
                    cancel.set()
                    failure = e
    if failure is not None:
        raise failure


def assemble(store, config, stats=None):
    """Run all query sets and return the validated :class:`PropertyGraph` and stats."""
    if not store.sealed:
        raise RuntimeError("the store must be sealed before conversion")
    ctx = _Context(store, config)
    if stats is not None:
        ctx.stats = stats
    stats = ctx.stats
    det = config.deterministic_output
    graph = PropertyGraph()

    t0 = time.perf_counter()
    node_lists = [(qs, list_node_iris(store, qs, det)) for qs in config.query_sets]
    stats.timings["listing"] += time.perf_counter() - t0

    t0 = time.perf_counter()
    for qs, iris in node_lists:
        run_batches(iris, lambda iri, qs=qs: _build_node(ctx, qs, iri),
                    config.batch_size, config.parallelism, graph.add_node)
    stats.node_merges = graph.merges
    stats.timings["node_build"] += time.perf_counter() - t0

    t0 = time.perf_counter()
    rel_lists = [(qs, list_relations(store, qs, det)) for qs in config.query_sets]
    stats.timings["listing"] += time.perf_counter() - t0

    t0 = time.perf_counter()
    for qs, stubs in rel_lists:
        run_batches(stubs, lambda stub, qs=qs: _build_relation(ctx, qs, stub),
                    config.batch_size, config.parallelism, graph.add_relation)
    report = validate_graph(graph, config.dangling_mode)
    stats.dangling_skipped = report.dangling_count
    graph = report.graph
    stats.timings["relation_build"] += time.perf_counter() - t0

    stats.provenance = {k: ctx.names.provenance(k) for k in NameRegistry.KINDS}
    if config.default_label:
        stats.provenance.setdefault("default_label", config.default_label)
    return graph, stats


def emit_graph(graph, emitter, deterministic=False):
    emitter.begin(graph)
    nodes = graph.sorted_nodes() if deterministic else list(graph.nodes.values())
    for n in nodes:
        emitter.node(n)
    rels = graph.sorted_relations() if deterministic else list(graph.relations.values())
    for r in rels:
        emitter.relation(r)
    emitter.end()


def convert(store, config, emitter):
    """Map the store through every query set and stream the result to ``emitter``.

    All nodes reach the emitter before any relation. On emitter failure the
    exception carries the partial stats as ``exc.stats``.
    """
    stats = ConversionStats()
    graph, stats = assemble(store, config, stats)
    t0 = time.perf_counter()
    try:
        emit_graph(graph, emitter, config.deterministic_output)
    except Exception as e:
        stats.timings["emission"] += time.perf_counter() - t0
        e.stats = stats
        raise
    stats.timings["emission"] += time.perf_counter() - t0
    stats.nodes_emitted = len(graph.nodes)
    stats.relations_emitted = len(graph.relations)
    stats.graph = graph
    return stats
