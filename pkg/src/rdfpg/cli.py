"""Command-line entry point: ``rdfpg convert|check-queries|roundtrip-check|bench|push``."""
import argparse
import json
import logging
import os
import sys
import tempfile

from . import __version__
from .check import PreconditionError, check_type_reconstruction, read_label_map
from .mapping import ManifestError, MappingError, QueryFileError, assemble, convert, load_mapping, read_manifest
from .naming import NameCollisionError
from .pgmodel import GraphValidationError
from .sparql import QuerySyntaxError, UnsupportedFeatureError
from .store import TripleStore
from .turtle import RDFSyntaxError, load_file

log = logging.getLogger("rdfpg")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_MAPPING = 3
EXIT_GRAPH = 4
EXIT_IO = 5

PREFIXES = {
    EXIT_USAGE: "usage",
    EXIT_PARSE: "parse",
    EXIT_MAPPING: "mapping",
    EXIT_GRAPH: "graph",
    EXIT_IO: "io",
}

ENV_USER = "GF_DB_USER"
ENV_PASS = "GF_DB_PASS"
DEFAULT_MAX_NODES = 2_000_000


class CLIError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(EXIT_USAGE, f"{self.prog}: {message}")


def _positive(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _non_negative(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _add_mapping_args(p, need_rdf=True):
    if need_rdf:
        p.add_argument("--rdf", action="append", required=True, metavar="PATH",
                       help="RDF input file (.ttl or .nt); repeatable")
    p.add_argument("--mapping", required=True, metavar="MANIFEST", help="query-set manifest file")
    p.add_argument("--batch-size", type=_positive, default=2500)
    p.add_argument("--parallel", type=_positive, default=os.cpu_count() or 1, metavar="N",
                   help="handler threads (default: logical CPUs)")
    p.add_argument("--deterministic", action="store_true", help="sort output by IRI")
    p.add_argument("--default-label", default="Resource", metavar="L|none",
                   help="label added to every node; 'none' disables it")
    p.add_argument("--on-dangling", choices=("error", "skip"), default="error")


def build_parser():
    parser = _ArgumentParser(prog="rdfpg", description="Convert RDF data to labelled property graphs.")
    parser.add_argument("--version", action="version", version=f"rdfpg {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging on stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_ArgumentParser)

    p = sub.add_parser("convert", help="convert RDF files into a Cypher script or GraphML document")
    _add_mapping_args(p)
    p.add_argument("--target", choices=("cypher", "graphml"), required=True)
    p.add_argument("--out", required=True, metavar="PATH")
    p.add_argument("--tx-size", type=_positive, default=500, help="statements per Cypher commit block")
    p.add_argument("--no-index", action="store_true", help="omit CREATE INDEX statements")

    p = sub.add_parser("check-queries", help="parse a mapping and verify the query contracts")
    p.add_argument("--mapping", required=True, metavar="MANIFEST")

    p = sub.add_parser("roundtrip-check", help="verify rdf:type triples can be rebuilt from labels")
    _add_mapping_args(p)
    p.add_argument("--label-map", required=True, metavar="PATH", help="two columns: label, class IRI")

    p = sub.add_parser("bench", help="time conversion of synthetic data at n and 10n")
    p.add_argument("--nodes", type=_non_negative, required=True, metavar="N")
    p.add_argument("--relations", type=_non_negative, default=None, metavar="M", help="default: 2N")
    p.add_argument("--target", choices=("cypher", "graphml"), default="graphml")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=_positive, default=3)
    p.add_argument("--batch-size", type=_positive, default=2500)
    p.add_argument("--parallel", type=_positive, default=1, metavar="N")
    p.add_argument("--max-nodes", type=_non_negative, default=DEFAULT_MAX_NODES,
                   help="refuse runs whose 10n size exceeds this")

    p = sub.add_parser("push", help=f"send a Cypher script to an HTTP endpoint (credentials: ${ENV_USER}, ${ENV_PASS})")
    p.add_argument("--script", required=True, metavar="PATH")
    p.add_argument("--url", required=True, metavar="U")
    p.add_argument("--db", default="neo4j")
    p.add_argument("--timeout", type=float, default=30.0)
    return parser


def _emit_json(obj):
    sys.stdout.write(json.dumps(obj, separators=(",", ":"), sort_keys=False) + "\n")
    sys.stdout.flush()


def _default_label(text):
    return None if text.lower() == "none" else text


def _load_store(paths):
    store = TripleStore()
    for path in paths:
        if not os.path.isfile(path):
            raise CLIError(EXIT_USAGE, f"RDF input not found: {path}")
        n = load_file(path, store)
        log.info("loaded %d triples from %s", n, path)
    store.seal()
    log.info("store sealed with %d triples", len(store))
    return store


def _mapping(args):
    return load_mapping(
        args.mapping,
        batch_size=args.batch_size,
        parallelism=args.parallel,
        default_label=_default_label(args.default_label),
        dangling_mode=args.on_dangling,
        deterministic_output=args.deterministic,
    )


def _make_emitter(args, out):
    from .emit.cypher import CypherEmitter, CypherScriptOptions
    from .emit.graphml import GraphMLEmitter

    if args.target == "cypher":
        opts = CypherScriptOptions(
            transaction_size=args.tx_size,
            create_index=not args.no_index,
            default_label=_default_label(args.default_label),
        )
        return CypherEmitter(out, opts)
    return GraphMLEmitter(out)


def cmd_convert(args):
    config = _mapping(args)
    store = _load_store(args.rdf)
    out_path = os.path.abspath(args.out)
    out_dir = os.path.dirname(out_path)
    if not os.path.isdir(out_dir):
        raise CLIError(EXIT_IO, f"output directory does not exist: {out_dir}")
    fd, tmp = tempfile.mkstemp(prefix=".rdfpg-", suffix=".tmp", dir=out_dir)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as out:
            stats = convert(store, config, _make_emitter(args, out))
        os.replace(tmp, out_path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise
    log.info("wrote %s", out_path)
    _emit_json(stats.as_dict())
    return EXIT_OK


def cmd_check_queries(args):
    from .mapping import load_query_set

    dirs = read_manifest(args.mapping)
    failures = 0
    first_code = None
    for d in dirs:
        try:
            qs = load_query_set(d)
        except (QueryFileError, MappingError, ManifestError) as e:
            code = _classify(e)[0]
            first_code = first_code or code
            failures += 1
            print(f"FAIL {d}: {e}")
            continue
        roles = [r for r in ("node_iris_query", "node_labels_query", "node_props_query",
                             "relations_query", "relation_props_query") if getattr(qs, r) is not None]
        print(f"OK   {d} ({len(roles)} queries)")
    if failures:
        raise CLIError(first_code, f"{failures} of {len(dirs)} query sets failed the contract check")
    return EXIT_OK


def cmd_roundtrip_check(args):
    label_map = read_label_map(args.label_map)
    config = _mapping(args)
    store = _load_store(args.rdf)
    graph, _ = assemble(store, config)
    report = check_type_reconstruction(store, graph, label_map)
    for s, _, o in report.missing:
        print(f"missing <{s}> a <{o}>")
    for s, _, o in report.extra:
        print(f"extra   <{s}> a <{o}>")
    _emit_json({"ok": report.ok, "nodes": len(graph.nodes), "missing": len(report.missing),
                "extra": len(report.extra)})
    if not report.ok:
        raise CLIError(EXIT_GRAPH, f"type reconstruction is not exact: {len(report.missing)} missing, "
                                   f"{len(report.extra)} extra")
    return EXIT_OK


def cmd_bench(args):
    from .bench import run_bench

    m = 2 * args.nodes if args.relations is None else args.relations
    if args.nodes * 10 > args.max_nodes:
        raise CLIError(
            EXIT_USAGE,
            f"--nodes {args.nodes} needs a {10 * args.nodes}-node run, above the cap of {args.max_nodes}; "
            "expect several GB of memory per million nodes, raise --max-nodes only if the machine has it",
        )
    log.info("bench seed %d: n=%d m=%d target=%s", args.seed, args.nodes, m, args.target)
    report = run_bench(args.nodes, m, target=args.target, seed=args.seed, repeat=args.repeat,
                       batch_size=args.batch_size, parallelism=args.parallel)
    _emit_json(report)
    return EXIT_OK


def cmd_push(args):
    from .emit.cypher import script_blocks
    from .emit.push import push_script

    user, password = os.environ.get(ENV_USER), os.environ.get(ENV_PASS)
    missing = [v for v, val in ((ENV_USER, user), (ENV_PASS, password)) if val is None]
    if missing:
        raise CLIError(EXIT_USAGE, f"credentials missing: set {' and '.join(missing)}")
    if not os.path.isfile(args.script):
        raise CLIError(EXIT_USAGE, f"script not found: {args.script}")
    with open(args.script, encoding="utf-8") as fh:
        blocks = script_blocks(fh.read())
    report = push_script(blocks, args.url, (user, password), db=args.db, timeout=args.timeout)
    _emit_json(report.as_dict())
    if not report.ok:
        raise CLIError(EXIT_IO, report.error)
    return EXIT_OK


COMMANDS = {
    "convert": cmd_convert,
    "check-queries": cmd_check_queries,
    "roundtrip-check": cmd_roundtrip_check,
    "bench": cmd_bench,
    "push": cmd_push,
}


def _classify(exc):
    if isinstance(exc, CLIError):
        return exc.code, str(exc)
    if isinstance(exc, ManifestError):
        return EXIT_USAGE, str(exc)
    if isinstance(exc, (RDFSyntaxError, QueryFileError, QuerySyntaxError, UnsupportedFeatureError)):
        return EXIT_PARSE, str(exc)
    if isinstance(exc, (MappingError, NameCollisionError, PreconditionError)):
        return EXIT_MAPPING, str(exc)
    if isinstance(exc, GraphValidationError):
        return EXIT_GRAPH, str(exc)
    if isinstance(exc, OSError):
        return EXIT_IO, f"{exc.filename + ': ' if exc.filename else ''}{exc.strerror or exc}"
    return None, str(exc)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CLIError as e:
        print(f"error[usage]: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    if not args.command:
        parser.print_usage(sys.stderr)
        print("error[usage]: a command is required", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except Exception as e:
        code, message = _classify(e)
        if code is None:
            if isinstance(e, ValueError):
                code = EXIT_USAGE
            else:
                raise
        print(f"error[{PREFIXES[code]}]: {message.splitlines()[0] if message else type(e).__name__}",
              file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
