"""Synthetic data and timing runs for checking that conversion time scales linearly."""
import gc
import os
import random
import statistics
import tempfile
import time

from .mapping import MappingConfig, QuerySet, convert, parse_query_text
from .store import TripleStore
from .terms import IRI, Literal, RDF, RDF_TYPE, RDFS, XSD_DOUBLE, XSD_INTEGER

EX = "http://example.org/bench/"
N_CLASSES = 5

BENCH_PREFIXES = f"""PREFIX rdf: <{RDF}>
PREFIX rdfs: <{RDFS}>
PREFIX ex: <{EX}>"""

BENCH_QUERIES = {
    "node_iris_query": "SELECT ?iri { ?class rdfs:subClassOf* ex:Thing. ?iri a ?class. }",
    "node_labels_query": "SELECT ?label { ?iri a ?label. }",
    "node_props_query": "SELECT ?name ?value { ?iri ?name ?value. VALUES (?name) { (ex:name) (ex:score) (ex:rank) } }",
    "relations_query": (
        "SELECT ?iri ?type ?fromIri ?toIri { ?iri a rdf:Statement; rdf:predicate ?type; "
        "rdf:subject ?fromIri; rdf:object ?toIri. }"
    ),
    "relation_props_query": "SELECT ?name ?value { ?iri ?name ?value. VALUES (?name) { (ex:weight) } }",
}


def bench_query_set():
    return QuerySet(
        name="bench",
        **{role: parse_query_text(text, BENCH_PREFIXES, f"<bench:{role}>") for role, text in BENCH_QUERIES.items()},
    )


def generate_store(n_nodes, n_relations, seed=0):
    """A sealed store with typed resources carrying three properties, and reified relations.

    Equal arguments always produce equal stores.
    """
    rng = random.Random(seed)
    store = TripleStore()
    add = store.add
    rdf_type = IRI(RDF_TYPE)
    sub_class = IRI(RDFS + "subClassOf")
    thing = IRI(EX + "Thing")
    classes = [IRI(f"{EX}Type{k}") for k in range(N_CLASSES)]
    for c in classes:
        add(c, sub_class, thing)
    name_p, score_p, rank_p = IRI(EX + "name"), IRI(EX + "score"), IRI(EX + "rank")
    nodes = [IRI(f"{EX}n{i}") for i in range(n_nodes)]
    for i, node in enumerate(nodes):
        add(node, rdf_type, classes[rng.randrange(N_CLASSES)])
        add(node, name_p, Literal(f"node {i}"))
        add(node, score_p, Literal(repr(round(rng.random(), 6)), XSD_DOUBLE))
        add(node, rank_p, Literal(str(rng.randrange(1000)), XSD_INTEGER))
    if n_nodes:
        statement = IRI(RDF + "Statement")
        subj_p, pred_p, obj_p = IRI(RDF + "subject"), IRI(RDF + "predicate"), IRI(RDF + "object")
        weight_p = IRI(EX + "weight")
        types = [IRI(EX + "linksTo"), IRI(EX + "partOf")]
        for j in range(n_relations):
            rel = IRI(f"{EX}r{j}")
            add(rel, rdf_type, statement)
            add(rel, subj_p, nodes[rng.randrange(n_nodes)])
            add(rel, pred_p, types[rng.randrange(2)])
            add(rel, obj_p, nodes[rng.randrange(n_nodes)])
            add(rel, weight_p, Literal(repr(round(rng.random(), 4)), XSD_DOUBLE))
    return store.seal()


def make_emitter(target, out):
    from .emit.cypher import CypherEmitter, CypherScriptOptions
    from .emit.graphml import GraphMLEmitter

    if target == "cypher":
        return CypherEmitter(out, CypherScriptOptions())
    if target == "graphml":
        return GraphMLEmitter(out)
    raise ValueError(f"unknown target: {target}")


def timed_conversion(store, config, target):
    """Convert ``store`` into a scratch file; returns (wall seconds, stats)."""
    gc.collect()
    gc.freeze()
    try:
        with tempfile.TemporaryFile("w+", encoding="utf-8") as out:
            t0 = time.perf_counter()
            stats = convert(store, config, make_emitter(target, out))
            out.flush()
            elapsed = time.perf_counter() - t0
    finally:
        gc.unfreeze()
    return elapsed, stats


def run_bench(n_nodes, n_relations, target="graphml", seed=0, repeat=3, batch_size=2500, parallelism=1,
              factors=(1, 10)):
    """Time conversions at each size factor; the report holds medians and the largest/smallest ratio."""
    qs = bench_query_set()
    config = MappingConfig([qs], batch_size=batch_size, parallelism=parallelism, deterministic_output=True)
    sizes = []
    for f in factors:
        n, m = n_nodes * f, n_relations * f
        t0 = time.perf_counter()
        store = generate_store(n, m, seed)
        gen_time = time.perf_counter() - t0
        runs = []
        phases = []
        for _ in range(repeat):
            elapsed, stats = timed_conversion(store, config, target)
            runs.append(elapsed)
            phases.append(stats.timings)
        med = statistics.median(runs)
        mid = phases[runs.index(med)] if med in runs else phases[0]
        sizes.append({
            "factor": f,
            "nodes": n,
            "relations": m,
            "triples": len(store),
            "generate_seconds": round(gen_time, 4),
            "runs": [round(r, 4) for r in runs],
            "median_seconds": round(med, 4),
            "phases": {k: round(v, 4) for k, v in mid.items()},
            "nodes_emitted": stats.nodes_emitted,
            "relations_emitted": stats.relations_emitted,
        })
        del store
    report = {"seed": seed, "target": target, "repeat": repeat, "cpus": os.cpu_count(), "sizes": sizes}
    small, large = sizes[0], sizes[-1]
    if small["nodes"] + small["relations"] > 0 and small["median_seconds"] > 0:
        report["ratio"] = round(large["median_seconds"] / small["median_seconds"], 3)
    return report
