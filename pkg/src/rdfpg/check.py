"""Verifying that rdf:type statements can be recovered from node labels."""
from .pgmodel import CheckReport
from .terms import IRI, RDF_TYPE


class PreconditionError(ValueError):
    pass


def read_label_map(path):
    """Two whitespace-separated columns per line: label, class IRI. ``#`` starts a comment."""
    mapping = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip() if line.lstrip().startswith("#") else line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'label class-iri', got {line!r}")
            label, cls = parts
            if cls.startswith("<") and cls.endswith(">"):
                cls = cls[1:-1]
            if label in mapping and mapping[label] != cls:
                raise ValueError(f"{path}:{lineno}: label {label} mapped twice")
            mapping[label] = cls
    return mapping


def check_type_reconstruction(store, pg, label_to_class):
    """Rebuild ``(node, rdf:type, class)`` triples from labels and compare with the store.

    The comparison is restricted to converted node IRIs and to the classes in
    the mapping's range. The mapping must be injective, otherwise distinct
    classes collapse onto one label and the original typing cannot be told
    apart.
    """
    by_class = {}
    for label, cls in label_to_class.items():
        by_class.setdefault(cls, []).append(label)
    if len(by_class) != len(label_to_class):
        clashes = {cls: sorted(labels) for cls, labels in by_class.items() if len(labels) > 1}
        raise PreconditionError(
            "label to class mapping is not injective: "
            + "; ".join(f"{', '.join(ls)} -> {cls}" for cls, ls in sorted(clashes.items()))
        )
    rebuilt = set()
    for node in pg.nodes.values():
        for label in node.labels:
            cls = label_to_class.get(label)
            if cls is not None:
                rebuilt.add((node.iri, RDF_TYPE, cls))

    classes = {IRI(c) for c in label_to_class.values()}
    rdf_type = IRI(RDF_TYPE)
    original = set()
    for iri in pg.nodes:
        for obj in store.objects(IRI(iri), rdf_type):
            if obj in classes:
                original.add((iri, RDF_TYPE, obj.value))

    report = CheckReport()
    report.missing = sorted(original - rebuilt)
    report.extra = sorted(rebuilt - original)
    report.ok = not report.missing and not report.extra
    report.graph = pg
    return report
