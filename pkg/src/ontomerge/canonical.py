"""Canonical forms for ontologies.

Colour refinement over concepts, individualisation when refinement stalls,
and orbit pruning with the automorphisms found along the way.  The key is the
smallest leaf certificate, so two ontologies get equal keys exactly when a
tag-preserving isomorphism exists.  Ids and labels never enter the key.
"""
from __future__ import annotations

import hashlib
import json
from collections import defaultdict

from .ontology import Homomorphism, Ontology

CanonicalKey = bytes


def _tagkey(tag):
    return "" if tag is None else "#" + tag


class _Graph:
    def __init__(self, o: Ontology):
        self.ids = o.concept_ids()
        pos = {c: i for i, c in enumerate(self.ids)}
        self.n = len(self.ids)
        self.tags = [_tagkey(o.concepts[c].tag) for c in self.ids]
        self.edges = [(pos[r.src], pos[r.dst], _tagkey(r.tag)) for r in o.relations.values()]
        self.adj = [[] for _ in range(self.n)]
        for s, d, t in self.edges:
            if s == d:
                self.adj[s].append(("l", t, s))
            else:
                self.adj[s].append(("o", t, d))
                self.adj[d].append(("i", t, s))


def _rank(sigs):
    table = {s: i for i, s in enumerate(sorted(set(sigs)))}
    return [table[s] for s in sigs]


def _refine(g: _Graph, colors: list[int]) -> list[int]:
    ncol = len(set(colors))
    while True:
        sigs = [(colors[v], tuple(sorted((d, t, colors[u]) for d, t, u in g.adj[v])))
                for v in range(g.n)]
        new = _rank(sigs)
        k = len(set(new))
        if k == ncol:
            return new
        colors, ncol = new, k


def _initial_colors(g: _Graph) -> list[int]:
    sigs = []
    for v in range(g.n):
        degs = defaultdict(int)
        for d, t, _ in g.adj[v]:
            degs[d, t] += 1
        sigs.append((g.tags[v], tuple(sorted(degs.items()))))
    return _rank(sigs)


def _certificate(g: _Graph, colors: list[int]):
    # colors are a permutation of range(n) at a leaf
    order = [0] * g.n
    for v, c in enumerate(colors):
        order[c] = v
    tags = tuple(g.tags[v] for v in order)
    edges = tuple(sorted((colors[s], colors[d], t) for s, d, t in g.edges))
    return (tags, edges)


class _Search:
    def __init__(self, g: _Graph):
        self.g = g
        self.best = None
        self.best_colors = None
        self.seen: dict = {}
        self.autos: list[list[int]] = []

    def _orbit_root(self, fixed, v, explored):
        # union-find over the group generated by automorphisms fixing ``fixed``
        parent = list(range(self.g.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a in self.autos:
            if all(a[f] == f for f in fixed):
                for x in range(self.g.n):
                    rx, ry = find(x), find(a[x])
                    if rx != ry:
                        parent[rx] = ry
        root = find(v)
        return any(find(u) == root for u in explored)

    def run(self, colors, fixed):
        cells = defaultdict(list)
        for v, c in enumerate(colors):
            cells[c].append(v)
        target = None
        for c in sorted(cells):
            if len(cells[c]) > 1 and (target is None or len(cells[c]) < len(target)):
                target = cells[c]
        if target is None:
            self._leaf(colors)
            return
        explored = []
        for v in target:
            if explored and self._orbit_root(fixed, v, explored):
                continue
            split = [2 * c for c in colors]
            split[v] -= 1
            self.run(_refine(self.g, _rank(split)), fixed + [v])
            explored.append(v)

    def _leaf(self, colors):
        cert = _certificate(self.g, colors)
        prev = self.seen.get(cert)
        if prev is not None:
            # prev and colors give the same certificate: their difference is an automorphism
            inv = [0] * self.g.n
            for v, c in enumerate(prev):
                inv[c] = v
            auto = [inv[colors[v]] for v in range(self.g.n)]
            if any(auto[v] != v for v in range(self.g.n)):
                self.autos.append(auto)
        else:
            self.seen[cert] = colors
        if self.best is None or cert < self.best:
            self.best, self.best_colors = cert, colors


def canonical_labeling(o: Ontology) -> tuple[CanonicalKey, list[str]]:
    """Canonical key plus the concept ids listed in canonical position order."""
    g = _Graph(o)
    if g.n == 0:
        cert = ((), ())
        order = []
    else:
        s = _Search(g)
        s.run(_refine(g, _initial_colors(g)), [])
        cert, colors = s.best, s.best_colors
        order = [None] * g.n
        for v, c in enumerate(colors):
            order[c] = g.ids[v]
    # relations without concepts are impossible, so the certificate is complete
    key = json.dumps([list(cert[0]), [list(e) for e in cert[1]]], separators=(",", ":"))
    return key.encode(), order


def canonical_form(o: Ontology) -> CanonicalKey:
    return canonical_labeling(o)[0]


def short_key(key: CanonicalKey, n: int = 12) -> str:
    return hashlib.sha256(key).hexdigest()[:n]


def find_isomorphism(a: Ontology, b: Ontology) -> Homomorphism | None:
    """An isomorphism ``a -> b`` if one exists (via canonical labelings)."""
    ka, oa = canonical_labeling(a)
    kb, ob = canonical_labeling(b)
    if ka != kb or len(a.relations) != len(b.relations):
        return None
    cm = dict(zip(oa, ob))
    groups = defaultdict(list)
    for r in b.relations.values():
        groups[r.src, r.dst, r.tag].append(r.id)
    taken = defaultdict(int)
    rm = {}
    for r in a.relations.values():
        k = (cm[r.src], cm[r.dst], r.tag)
        rm[r.id] = groups[k][taken[k]]
        taken[k] += 1
    return Homomorphism(a, b, cm, rm)


def isomorphic(a: Ontology, b: Ontology) -> bool:
    return canonical_form(a) == canonical_form(b)
