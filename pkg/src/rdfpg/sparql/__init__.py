"""The SPARQL SELECT subset used by mapping queries."""
from .ast import Query, Var
from .evaluate import eval_path, evaluate
from .functions import eval_expression
from .parser import QuerySyntaxError, UnsupportedFeatureError, parse_select, to_sparql

__all__ = [
    "Query",
    "QuerySyntaxError",
    "UnsupportedFeatureError",
    "Var",
    "eval_expression",
    "eval_path",
    "evaluate",
    "parse_select",
    "to_sparql",
]
