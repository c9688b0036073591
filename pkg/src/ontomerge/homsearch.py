"""Backtracking homomorphism search with forward checking."""
from __future__ import annotations

import itertools
from collections import defaultdict

from .ontology import Homomorphism, Ontology


class BudgetExceeded(Exception):
    def __init__(self, steps: int):
        self.steps = steps
        super().__init__(f"homomorphism search exceeded its budget after {steps} steps")


MODES = ("first", "count", "all")


class _Index:
    """Adjacency of the target, keyed by relation tag."""

    def __init__(self, target: Ontology):
        self.by_tag = defaultdict(list)
        for c in target.concepts.values():
            self.by_tag[c.tag].append(c.id)
        self.out = defaultdict(set)     # (src, tag) -> dsts
        self.inc = defaultdict(set)     # (dst, tag) -> srcs
        self.rel = defaultdict(list)    # (src, dst, tag) -> relation ids
        for r in target.relations.values():
            self.out[r.src, r.tag].add(r.dst)
            self.inc[r.dst, r.tag].add(r.src)
            self.rel[r.src, r.dst, r.tag].append(r.id)


def _search_order(source: Ontology) -> list[str]:
    nbrs = defaultdict(set)
    for r in source.relations.values():
        if r.src != r.dst:
            nbrs[r.src].add(r.dst)
            nbrs[r.dst].add(r.src)
    remaining = set(source.concepts)
    order: list[str] = []
    placed: set[str] = set()
    while remaining:
        best = min(remaining, key=lambda c: (-len(nbrs[c] & placed), -len(nbrs[c]), c))
        order.append(best)
        placed.add(best)
        remaining.discard(best)
    return order


def _concept_maps(source: Ontology, target: Ontology, budget: int | None):
    """Yield every incidence- and tag-compatible concept map (as dicts)."""
    idx = _Index(target)
    out_edges = defaultdict(list)   # concept -> [(other, tag)]
    in_edges = defaultdict(list)
    loops = defaultdict(list)
    for r in source.relations.values():
        if r.src == r.dst:
            loops[r.src].append(r.tag)
        else:
            out_edges[r.src].append((r.dst, r.tag))
            in_edges[r.dst].append((r.src, r.tag))

    domains = {}
    for cid, c in source.concepts.items():
        cands = []
        for x in idx.by_tag.get(c.tag, ()):
            if any(x not in idx.out[x, t] for t in loops[cid]):
                continue
            if any(not idx.out[x, t] for _, t in out_edges[cid]):
                continue
            if any(not idx.inc[x, t] for _, t in in_edges[cid]):
                continue
            cands.append(x)
        domains[cid] = frozenset(cands)

    order = _search_order(source)
    steps = 0
    assignment: dict[str, str] = {}

    def restrict(dom, c, x):
        """Prune neighbours of ``c`` after assigning ``c -> x``; None on wipe-out."""
        new = dict(dom)
        for other, t in out_edges[c]:
            if other not in assignment:
                d = new[other] & idx.out[x, t]
                if not d:
                    return None
                new[other] = d
        for other, t in in_edges[c]:
            if other not in assignment:
                d = new[other] & idx.inc[x, t]
                if not d:
                    return None
                new[other] = d
        return new

    def rec(i, dom):
        nonlocal steps
        if i == len(order):
            yield dict(assignment)
            return
        c = order[i]
        for x in sorted(dom[c]):
            steps += 1
            if budget is not None and steps > budget:
                raise BudgetExceeded(steps)
            assignment[c] = x
            nd = restrict(dom, c, x)
            if nd is not None:
                yield from rec(i + 1, nd)
            del assignment[c]

    if any(not d for d in domains.values()):
        return
    yield from rec(0, domains)


def find_homomorphisms(source: Ontology, target: Ontology, mode: str = "first",
                       budget: int | None = None):
    """Search homomorphisms ``source -> target``.

    ``mode='first'`` returns a list with at most one homomorphism, ``'all'``
    every homomorphism in a deterministic order, ``'count'`` just the number.
    ``budget`` caps the number of concept assignments tried.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    idx = _Index(target)
    rels = list(source.relations.values())
    found = [] if mode != "count" else 0
    for cm in _concept_maps(source, target, budget):
        choices = [idx.rel[cm[r.src], cm[r.dst], r.tag] for r in rels]
        if mode == "count":
            n = 1
            for ch in choices:
                n *= len(ch)
            found += n
            continue
        for combo in itertools.product(*choices):
            rm = {r.id: img for r, img in zip(rels, combo)}
            found.append(Homomorphism(source, target, cm, rm))
            if mode == "first":
                return found
    return found


def has_homomorphism(source: Ontology, target: Ontology, budget: int | None = None) -> bool:
    return bool(find_homomorphisms(source, target, "first", budget))
