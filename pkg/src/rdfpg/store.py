"""In-memory triple store with a term dictionary and SPO/POS/OSP indexes."""
from typing import NamedTuple, Optional

from .terms import IRI, Literal, Term


class StoreSealedError(RuntimeError):
    pass


class Triple(NamedTuple):
    subject: Term
    predicate: Term
    object: Term


def _add(index, a, b, c):
    level = index.get(a)
    if level is None:
        level = index[a] = {}
    leaf = level.get(b)
    if leaf is None:
        leaf = level[b] = set()
    leaf.add(c)


class TripleStore:
    """A set of triples, loaded once then sealed for concurrent reads.

    Terms are interned to integer ids; each index is a two-level dict ending
    in a set of ids, so any pattern with a bound leading position is one or
    two dict lookups away.
    """

    def __init__(self):
        self._ids = {}
        self._terms = []
        self._spo = {}
        self._pos = {}
        self._osp = {}
        self._size = 0
        self._sealed = False
        self.prefixes = {}

    # -- loading ---------------------------------------------------------

    @property
    def sealed(self):
        return self._sealed

    def seal(self):
        self._sealed = True
        return self

    def _intern(self, term):
        tid = self._ids.get(term)
        if tid is None:
            tid = len(self._terms)
            self._ids[term] = tid
            self._terms.append(term)
        return tid

    def add(self, s, p, o):
        """Add one triple; returns True if it was not already present."""
        if self._sealed:
            raise StoreSealedError("store is sealed; no more triples can be added")
        if not isinstance(p, IRI):
            raise ValueError(f"predicate must be an IRI, got {p!r}")
        if isinstance(s, Literal):
            raise ValueError(f"subject cannot be a literal: {s!r}")
        if not isinstance(o, Term):
            raise ValueError(f"object must be a term, got {o!r}")
        si, pi, oi = self._intern(s), self._intern(p), self._intern(o)
        level = self._spo.get(si)
        if level is not None:
            leaf = level.get(pi)
            if leaf is not None and oi in leaf:
                return False
        _add(self._spo, si, pi, oi)
        _add(self._pos, pi, oi, si)
        _add(self._osp, oi, si, pi)
        self._size += 1
        return True

    def add_triples(self, triples):
        return sum(1 for s, p, o in triples if self.add(s, p, o))

    # -- reading ---------------------------------------------------------

    def __len__(self):
        return self._size

    @property
    def size(self):
        return self._size

    def __contains__(self, triple):
        s, p, o = triple
        si, pi, oi = self._ids.get(s), self._ids.get(p), self._ids.get(o)
        if si is None or pi is None or oi is None:
            return False
        return oi in self._spo.get(si, {}).get(pi, ())

    def term_id(self, term) -> Optional[int]:
        return self._ids.get(term)

    def term(self, tid) -> Term:
        return self._terms[tid]

    def terms(self):
        """Every term occurring in some triple."""
        return list(self._terms)

    def nodes(self):
        """Terms occurring in subject or object position."""
        t = self._terms
        return frozenset(t[i] for i in self._spo.keys() | self._osp.keys())

    def predicate_count(self, p) -> int:
        """Number of triples using predicate ``p`` (0 when absent)."""
        pi = self._ids.get(p)
        if pi is None:
            return 0
        return sum(len(ss) for ss in self._pos.get(pi, {}).values())

    def match(self, s=None, p=None, o=None):
        """Triples matching the bound positions; ``None`` is a wildcard."""
        terms = self._terms
        return [
            Triple(terms[a], terms[b], terms[c])
            for a, b, c in self.match_ids(s, p, o)
        ]

    def match_ids(self, s=None, p=None, o=None):
        """Like :meth:`match` but yields ``(s, p, o)`` id triples."""
        ids = self._ids
        si = pi = oi = None
        if s is not None:
            si = ids.get(s)
            if si is None:
                return
        if p is not None:
            pi = ids.get(p)
            if pi is None:
                return
        if o is not None:
            oi = ids.get(o)
            if oi is None:
                return

        if si is not None:
            level = self._spo.get(si)
            if not level:
                return
            if pi is not None:
                leaf = level.get(pi, ())
                if oi is not None:
                    if oi in leaf:
                        yield si, pi, oi
                else:
                    for c in leaf:
                        yield si, pi, c
            elif oi is not None:
                # subject + object bound: OSP gives the predicates directly
                for b in self._osp.get(oi, {}).get(si, ()):
                    yield si, b, oi
            else:
                for b, leaf in level.items():
                    for c in leaf:
                        yield si, b, c
        elif pi is not None:
            level = self._pos.get(pi)
            if not level:
                return
            if oi is not None:
                for a in level.get(oi, ()):
                    yield a, pi, oi
            else:
                for c, leaf in level.items():
                    for a in leaf:
                        yield a, pi, c
        elif oi is not None:
            for a, leaf in self._osp.get(oi, {}).items():
                for b in leaf:
                    yield a, b, oi
        else:
            for a, level in self._spo.items():
                for b, leaf in level.items():
                    for c in leaf:
                        yield a, b, c

    def objects(self, s, p):
        """Objects of ``(s, p, ?)`` as terms."""
        si, pi = self._ids.get(s), self._ids.get(p)
        if si is None or pi is None:
            return []
        terms = self._terms
        return [terms[c] for c in self._spo.get(si, {}).get(pi, ())]

    def subjects(self, p, o):
        pi, oi = self._ids.get(p), self._ids.get(o)
        if pi is None or oi is None:
            return []
        terms = self._terms
        return [terms[a] for a in self._pos.get(pi, {}).get(oi, ())]

    def __iter__(self):
        return iter(self.match())

    def index_views(self):
        """The triple set as reconstructed from each of the three indexes."""
        t = self._terms
        spo = {(t[a], t[b], t[c]) for a, lv in self._spo.items() for b, lf in lv.items() for c in lf}
        pos = {(t[a], t[b], t[c]) for b, lv in self._pos.items() for c, lf in lv.items() for a in lf}
        osp = {(t[a], t[b], t[c]) for c, lv in self._osp.items() for a, lf in lv.items() for b in lf}
        return spo, pos, osp


def seal(store):
    return store.seal()
