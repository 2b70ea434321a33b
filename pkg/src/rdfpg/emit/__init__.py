from .base import CollectingEmitter, Emitter
from .cypher import CypherEmitter, CypherScriptOptions, emit_script
from .graphml import GraphMLEmitter, collect_keys, emit_graphml

__all__ = [
    "CollectingEmitter",
    "CypherEmitter",
    "CypherScriptOptions",
    "Emitter",
    "GraphMLEmitter",
    "collect_keys",
    "emit_graphml",
    "emit_script",
]
