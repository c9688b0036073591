"""The merging order on a closure, computed as existence of homomorphisms."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .closure import ClosureResult, UnknownKey
from .homsearch import BudgetExceeded, has_homomorphism

QUERIES = ("maximal", "minimal", "sort", "above", "below")


@dataclass(frozen=True)
class Poset:
    """``leq[i, j]`` iff there is a homomorphism from element i to element j.

    Members mapping into each other are grouped into one class; ``hasse``
    holds the covering pairs between classes, named by their first member.
    """
    elements: tuple
    leq: np.ndarray
    layer: dict
    classes: tuple          # tuple of tuples of element keys
    hasse: tuple            # (lower class representative, upper class representative)

    def index(self, key) -> int:
        try:
            return self.elements.index(key)
        except ValueError:
            raise UnknownKey(key) from None

    def class_of(self, key) -> tuple:
        for c in self.classes:
            if key in c:
                return c
        raise UnknownKey(key)

    def less_equal(self, a, b) -> bool:
        return bool(self.leq[self.index(a), self.index(b)])


def transitive_reduction(strict: np.ndarray) -> np.ndarray:
    """Covering pairs of a strict order given as a transitively closed matrix."""
    s = strict.astype(np.int64)
    return strict & ~((s @ s) > 0)


def build_poset(closure: ClosureResult, hom_budget: int | None = None) -> Poset:
    if not closure.complete:
        raise ValueError("poset needs a complete closure")
    elems = tuple(sorted(closure.members, key=lambda k: (closure.layer[k], k)))
    n = len(elems)
    leq = np.zeros((n, n), dtype=bool)
    for i, a in enumerate(elems):
        for j, b in enumerate(elems):
            if i == j:
                leq[i, j] = True
                continue
            try:
                leq[i, j] = has_homomorphism(closure.members[a], closure.members[b], hom_budget)
            except BudgetExceeded as exc:
                exc.pair = (closure.names[a], closure.names[b])
                exc.args = (f"homomorphism search budget exhausted for {exc.pair[0]} -> {exc.pair[1]}",)
                raise
    classes, seen = [], set()
    for i in range(n):
        if i in seen:
            continue
        group = [j for j in range(n) if leq[i, j] and leq[j, i]]
        seen.update(group)
        classes.append(group)
    reps = [g[0] for g in classes]
    cls = leq[np.ix_(reps, reps)] & ~np.eye(len(reps), dtype=bool)
    cover = transitive_reduction(cls)
    hasse = tuple((elems[reps[i]], elems[reps[j]]) for i, j in zip(*np.nonzero(cover)))
    return Poset(elems, leq, {k: closure.layer[k] for k in elems},
                 tuple(tuple(elems[j] for j in g) for g in classes), hasse)


def _linear_extension(p: Poset) -> list:
    n = len(p.elements)
    strict = p.leq & ~p.leq.T
    indeg = strict.sum(axis=0).tolist()
    rank = {k: (p.layer[k], k) for k in p.elements}
    heap = [(rank[p.elements[j]], j) for j in range(n) if indeg[j] == 0]
    heapq.heapify(heap)
    out = []
    while heap:
        _, i = heapq.heappop(heap)
        out.append(p.elements[i])
        for j in np.nonzero(strict[i])[0]:
            indeg[j] -= 1
            if indeg[j] == 0:
                heapq.heappush(heap, (rank[p.elements[j]], int(j)))
    return out


def poset_query(p: Poset, query: str, key=None) -> list:
    """Members answering ``query``, in (layer, key) order except for ``sort``.

    ``sort`` is a linear extension of the order, breaking ties by layer and key.
    """
    if query not in QUERIES:
        raise ValueError(f"unknown query {query!r}")
    order = lambda ks: sorted(ks, key=lambda k: (p.layer[k], k))
    if query == "sort":
        return _linear_extension(p)
    if query in ("maximal", "minimal"):
        end = 0 if query == "maximal" else 1
        blocked = {edge[end] for edge in p.hasse}
        return order(k for c in p.classes if c[0] not in blocked for k in c)
    if key is None:
        raise ValueError(f"{query} needs a key")
    i = p.index(key)
    if query == "above":
        return order(p.elements[j] for j in np.nonzero(p.leq[i])[0])
    return order(p.elements[j] for j in np.nonzero(p.leq[:, i])[0])
