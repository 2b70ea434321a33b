"""Map RDF data onto labelled property graphs with SPARQL mapping queries.

The pipeline loads Turtle/N-Triples into an in-memory store, runs one or more
query sets (node IRIs, node labels, node properties, relations, relation
properties) to build an abstract property graph, and writes it out as a
Cypher load script or as GraphML for TinkerPop importers.
"""
__version__ = "0.1.0"
