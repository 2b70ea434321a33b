"""Evaluation of parsed SELECT queries over a sealed :class:`TripleStore`.

Groups are evaluated bottom-up following the SPARQL algebra (Join, LeftJoin,
Union, Extend, Filter). Runs of triple patterns, paths and inline VALUES
between two BINDs commute under join, so they are evaluated together as an
index nested-loop join in selectivity order. Results use set semantics.
"""
from collections import deque

from ..terms import Term
from .ast import (
    BasicPattern,
    Bind,
    Filter,
    Group,
    Optional_,
    PathPattern,
    Union_,
    Values,
    Var,
)
from .functions import effective_boolean, eval_expression


def eval_path(store, start, predicate, modifier="*", reverse=False):
    """Terms reachable from ``start`` over zero or more ``predicate`` edges.

    With ``reverse`` the edges are followed backwards. Cycles terminate via
    the visited set.
    """
    if modifier != "*":
        raise ValueError(f"unsupported path modifier: {modifier}")
    step = store.subjects if reverse else store.objects
    seen = {start}
    todo = deque([start])
    while todo:
        node = todo.popleft()
        for nxt in (step(predicate, node) if reverse else step(node, predicate)):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return seen


def _compatible(a, b):
    if len(a) > len(b):
        a, b = b, a
    for k, v in a.items():
        w = b.get(k)
        if w is not None and w != v:
            return False
    return True


def _join(left, right):
    if not left or not right:
        return []
    lkeys = set(left[0]).intersection(*left[1:]) if len(left) > 1 else set(left[0])
    rkeys = set(right[0]).intersection(*right[1:]) if len(right) > 1 else set(right[0])
    keys = sorted(lkeys & rkeys)
    out = []
    if keys:
        table = {}
        for r in right:
            table.setdefault(tuple(r[k] for k in keys), []).append(r)
        for mu in left:
            for r in table.get(tuple(mu[k] for k in keys), ()):
                if _compatible(mu, r):
                    merged = dict(mu)
                    merged.update(r)
                    out.append(merged)
    else:
        for mu in left:
            for r in right:
                if _compatible(mu, r):
                    merged = dict(mu)
                    merged.update(r)
                    out.append(merged)
    return out


def _passes(filters, mu):
    for f in filters:
        if effective_boolean(eval_expression(f, mu)) is not True:
            return False
    return True


class _Evaluation:
    def __init__(self, store, consts):
        self.store = store
        self.consts = consts
        self.size = len(store)
        self.terms = store._terms
        self._nodes = None
        self._cards = {}

    # -- planning --------------------------------------------------------

    def card(self, p):
        c = self._cards.get(p)
        if c is None:
            c = self._cards[p] = self.store.predicate_count(p)
        return c

    def score(self, item, bound):
        if isinstance(item, Values):
            if all(v in bound for v in item.variables):
                return (-3.5, 0)
            return (-1.5, len(item.rows))
        positions = (item.subject, item.object) if isinstance(item, PathPattern) else (
            item.subject, item.predicate, item.object)
        nb = sum(1 for t in positions if not isinstance(t, Var) or t.name in bound)
        if isinstance(item, PathPattern):
            return (-(nb + 1), self.card(item.predicate))
        if isinstance(item.predicate, Var):
            return (-nb, self.size)
        return (-nb, self.card(item.predicate))

    # -- blocks ----------------------------------------------------------

    def block(self, items, solutions):
        """Join a run of pure items (triple/path patterns, VALUES) into solutions."""
        if not items:
            return solutions
        out = []
        plans = {}
        n = len(items)
        full = tuple(range(n))

        def rec(mu, bound, remaining):
            if not remaining:
                out.append(mu)
                return
            key = (bound, remaining)
            choice = plans.get(key)
            if choice is None:
                choice = min(remaining, key=lambda i: (self.score(items[i], bound), i))
                plans[key] = choice
            rest = tuple(i for i in remaining if i != choice)
            item = items[choice]
            if isinstance(item, Values):
                for nu in self.match_values(item, mu):
                    rec(nu, frozenset(nu), rest)
                return
            nb = bound.union(item.variables())
            if isinstance(item, PathPattern):
                for nu in self.match_path(item, mu):
                    rec(nu, nb, rest)
            else:
                for nu in self.match_triple(item, mu):
                    rec(nu, nb, rest)

        for mu in solutions:
            rec(mu, frozenset(mu), full)
        return out

    def _resolve(self, t, mu):
        if isinstance(t, Var):
            return mu.get(t.name)
        return t

    def match_triple(self, tp, mu):
        s = self._resolve(tp.subject, mu)
        p = self._resolve(tp.predicate, mu)
        o = self._resolve(tp.object, mu)
        free = []
        if s is None:
            free.append((0, tp.subject.name))
        if p is None:
            free.append((1, tp.predicate.name))
        if o is None:
            free.append((2, tp.object.name))
        terms = self.terms
        if not free:
            for _ in self.store.match_ids(s, p, o):
                yield mu
            return
        if len(free) == 1:
            pos, name = free[0]
            for ids in self.store.match_ids(s, p, o):
                nu = dict(mu)
                nu[name] = terms[ids[pos]]
                yield nu
            return
        for ids in self.store.match_ids(s, p, o):
            nu = dict(mu)
            ok = True
            for pos, name in free:
                value = terms[ids[pos]]
                prev = nu.get(name)
                if prev is None:
                    nu[name] = value
                elif prev != value:
                    ok = False
                    break
            if ok:
                yield nu

    def graph_nodes(self):
        if self._nodes is None:
            self._nodes = self.store.nodes()
        return self._nodes

    def _is_constant(self, t):
        return not isinstance(t, Var) or t.name in self.consts

    def match_path(self, pp, mu):
        s = self._resolve(pp.subject, mu)
        o = self._resolve(pp.object, mu)
        pred = pp.predicate
        if not (self._is_constant(pp.subject) or self._is_constant(pp.object)):
            # with two variables the zero-length step ranges over graph nodes only
            nodes = self.graph_nodes()
            if (s is not None and s not in nodes) or (o is not None and o not in nodes):
                return
        if s is not None and o is not None:
            if o in eval_path(self.store, s, pred):
                yield mu
        elif s is not None:
            for y in eval_path(self.store, s, pred):
                nu = dict(mu)
                nu[pp.object.name] = y
                yield nu
        elif o is not None:
            for x in eval_path(self.store, o, pred, reverse=True):
                nu = dict(mu)
                nu[pp.subject.name] = x
                yield nu
        elif pp.subject.name == pp.object.name:
            for x in self.graph_nodes():
                nu = dict(mu)
                nu[pp.subject.name] = x
                yield nu
        else:
            for x in self.graph_nodes():
                for y in eval_path(self.store, x, pred):
                    nu = dict(mu)
                    nu[pp.subject.name] = x
                    nu[pp.object.name] = y
                    yield nu

    def match_values(self, values, mu):
        names = values.variables
        for row in values.rows:
            nu = None
            for name, value in zip(names, row):
                if value is None:
                    continue
                prev = mu.get(name)
                if prev is None:
                    if nu is None:
                        nu = dict(mu)
                    nu[name] = value
                elif prev != value:
                    break
            else:
                yield mu if nu is None else nu

    # -- groups ----------------------------------------------------------

    def group(self, group, with_filters=True):
        """Evaluate a group; with ``with_filters=False`` its filters are returned instead."""
        filters = [e.expr for e in group.elements if isinstance(e, Filter)]
        initial = [dict(self.consts)]
        cur = initial
        pending = []
        for e in group.elements:
            if isinstance(e, BasicPattern):
                pending.extend(e.triples)
                continue
            if isinstance(e, Values):
                pending.append(e)
                continue
            if isinstance(e, Filter):
                continue
            cur = self.block(pending, cur)
            pending = []
            if isinstance(e, Group):
                inner = self.group(e)
                cur = inner if cur is initial else _join(cur, inner)
            elif isinstance(e, Union_):
                inner = self.union(e)
                cur = inner if cur is initial else _join(cur, inner)
            elif isinstance(e, Optional_):
                inner, inner_filters = self.group(e.pattern, with_filters=False)
                cur = self.left_join(cur, inner, inner_filters)
            elif isinstance(e, Bind):
                cur = self.extend(cur, e)
            else:
                raise TypeError(f"unexpected group element {e!r}")
        cur = self.block(pending, cur)
        if not with_filters:
            return cur, filters
        if filters:
            cur = [mu for mu in cur if _passes(filters, mu)]
        return cur

    def union(self, node):
        out = []
        for side in (node.left, node.right):
            if isinstance(side, Union_):
                out.extend(self.union(side))
            else:
                out.extend(self.group(side))
        return out

    def left_join(self, left, right, filters):
        out = []
        for mu in left:
            matched = False
            for r in right:
                if _compatible(mu, r):
                    merged = dict(mu)
                    merged.update(r)
                    if _passes(filters, merged):
                        out.append(merged)
                        matched = True
            if not matched:
                out.append(mu)
        return out

    def extend(self, solutions, bind):
        out = []
        name = bind.var
        for mu in solutions:
            value = eval_expression(bind.expr, mu)
            prev = mu.get(name)
            if prev is not None:
                # only reachable for pre-bound names: acts as an equality constraint
                if value == prev:
                    out.append(mu)
                continue
            if value is None:
                out.append(mu)
            else:
                nu = dict(mu)
                nu[name] = value
                out.append(nu)
        return out


def _normalize_bindings(pre_bindings):
    consts = {}
    for k, v in (pre_bindings or {}).items():
        if not isinstance(v, Term):
            raise TypeError(f"pre-binding for {k} must be a Term, got {v!r}")
        consts[k.lstrip("?$")] = v
    return consts


def evaluate(query, store, pre_bindings=None):
    """Distinct solutions of ``query``, each a dict of projected variable → Term.

    ``pre_bindings`` maps variable names to terms that act as constants
    throughout the pattern. Unbound projected variables are absent from the
    solution dicts.
    """
    consts = _normalize_bindings(pre_bindings)
    solutions = _Evaluation(store, consts).group(query.pattern)
    projection = query.projection
    seen = set()
    out = []
    for mu in solutions:
        key = tuple(mu.get(v) for v in projection)
        if key in seen:
            continue
        seen.add(key)
        out.append({v: t for v, t in zip(projection, key) if t is not None})
    return out
