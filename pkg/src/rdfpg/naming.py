"""Turning IRIs into label, relation type and property names."""
import re
import threading
from dataclasses import dataclass, field
from typing import Dict

_ILLEGAL = re.compile(r"[^A-Za-z0-9_]")
PLAIN_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class NameCollisionError(ValueError):
    def __init__(self, kind, name, first, second):
        self.kind = kind
        self.name = name
        self.sources = (first, second)
        super().__init__(f"{kind} name '{name}' is produced by both {first} and {second}")


@dataclass
class NamePolicy:
    """Explicit overrides from IRI (or literal text) to a name.

    Explicit names are used verbatim, so they may contain characters that
    emitters then have to quote.
    """

    explicit: Dict[str, str] = field(default_factory=dict)


def local_name(text):
    """Fragment of an IRI, else its last path segment, else the text itself."""
    if "#" in text:
        frag = text.rsplit("#", 1)[1]
        if frag:
            return frag
        text = text[:-1]
    stripped = text.rstrip("/")
    if "/" in stripped:
        return stripped.rsplit("/", 1)[1]
    if ":" in stripped:
        return stripped.rsplit(":", 1)[1]
    return stripped


def sanitize_name(iri_or_text, policy=None):
    if policy is not None and iri_or_text in policy.explicit:
        return policy.explicit[iri_or_text]
    name = _ILLEGAL.sub("_", local_name(iri_or_text))
    if not name:
        return "_"
    if name[0].isdigit():
        name = "_" + name
    return name


class NameRegistry:
    """Per-graph record of which source produced each name, per name kind.

    Shared by all handler threads; also serves as provenance for the
    produced labels, types and property names.
    """

    KINDS = ("label", "type", "property")

    def __init__(self, policy=None):
        self.policy = policy or NamePolicy()
        self._sources = {k: {} for k in self.KINDS}
        self._cache = {}
        self._lock = threading.Lock()

    def name(self, kind, source):
        key = (kind, source)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        name = sanitize_name(source, self.policy)
        with self._lock:
            seen = self._sources[kind]
            prev = seen.get(name)
            if prev is None:
                seen[name] = source
            elif prev != source:
                raise NameCollisionError(kind, name, prev, source)
            self._cache[key] = name
        return name

    def provenance(self, kind):
        """Mapping of produced name to the source text it came from."""
        return dict(self._sources[kind])
