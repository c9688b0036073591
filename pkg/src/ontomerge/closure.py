"""Merging closure of a repository of ontologies.

Members are isomorphism classes, keyed by canonical form.  Each member has a
representative ontology and every alignment known between two members is
kept as one correspondence between their representatives: the union of all
correspondences found for that ordered pair.  Merging two members is the
pushout over that union, so the merge is a function of the pair.

New alignments come from provenance: once ``x = a ⊔ b`` is known, anything
aligned with ``a`` (or ``b``) is aligned with ``x`` through the injection.
The pool is saturated under this rule before each round of merges.
"""
from __future__ import annotations

import json
import os
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .algebra import UNDEFINED, MergingSystem
from .canonical import CanonicalKey, canonical_form, find_isomorphism, short_key
from .category import (
    Correspondence,
    VAlignmentPair,
    identity_correspondence,
    pushout_of,
)
from .ontology import (
    Homomorphism,
    Ontology,
    check_hom_kind,
    compose_homs,
    identity_hom,
    inverse,
)


class UnknownKey(KeyError):
    pass


@dataclass(frozen=True)
class Limits:
    max_members: int = 10_000
    max_element_size: int = 512
    max_rounds: int = 64

    @classmethod
    def from_env(cls, var: str = "ONTOMERGE_LIMITS") -> "Limits":
        """Defaults overridden by ``var``: JSON object or ``name=value,...``."""
        raw = os.environ.get(var, "").strip()
        if not raw:
            return cls()
        if raw.startswith("{"):
            values = json.loads(raw)
        else:
            values = dict(part.split("=", 1) for part in raw.split(",") if part.strip())
        return cls(**{k.strip(): int(v) for k, v in values.items()})


class LimitExceeded(Exception):
    def __init__(self, which: str, partial: "ClosureResult"):
        super().__init__(f"closure limit exceeded: {which}")
        self.which = which
        self.partial = partial


@dataclass
class Repository:
    """Named ontologies plus the alignments given between them."""
    ontologies: dict[str, Ontology]
    alignments: list[VAlignmentPair] = field(default_factory=list)

    def __post_init__(self):
        if not self.ontologies:
            raise ValueError("a repository needs at least one ontology")
        self.ontologies = dict(self.ontologies)
        for p in self.alignments:
            for o in p.operands:
                if self.name_of(o) is None:
                    raise ValueError("alignment operand is not a repository member")

    def name_of(self, o: Ontology) -> str | None:
        for name, member in self.ontologies.items():
            if member == o:
                return name
        return None


@dataclass(frozen=True)
class ProvenanceEdge:
    left: CanonicalKey
    right: CanonicalKey
    result: CanonicalKey
    inject_left: Homomorphism       # representative of left -> representative of result
    inject_right: Homomorphism
    correspondence: Correspondence


@dataclass
class ClosureResult:
    members: dict[CanonicalKey, Ontology]
    names: dict[CanonicalKey, str]
    layer: dict[CanonicalKey, int]
    provenance: list[ProvenanceEdge]
    pool: dict[tuple[CanonicalKey, CanonicalKey], Correspondence]
    repository_keys: frozenset
    rounds: int = 0
    complete: bool = True

    def __len__(self):
        return len(self.members)

    def key_of(self, name_or_key) -> CanonicalKey:
        if isinstance(name_or_key, bytes) and name_or_key in self.members:
            return name_or_key
        for k, n in self.names.items():
            if n == name_or_key or short_key(k) == name_or_key:
                return k
        raise UnknownKey(name_or_key)

    def merge_key(self, a: CanonicalKey, b: CanonicalKey):
        edge = self._edges().get((a, b))
        return UNDEFINED if edge is None else edge.result

    def _edges(self) -> dict:
        cached = getattr(self, "_edge_index", None)
        if cached is None:
            cached = {(e.left, e.right): e for e in self.provenance}
            self._edge_index = cached
        return cached

    def system(self) -> "ClosureSystem":
        return ClosureSystem(self)

    def is_closed(self) -> bool:
        idx = self._edges()
        return all((a, b) in idx and idx[a, b].result in self.members for a, b in self.pool)


class ClosureSystem(MergingSystem):
    """The merging system on a computed closure; elements are member names."""

    def __init__(self, closure: ClosureResult):
        self.closure = closure
        order = sorted(closure.members, key=lambda k: (closure.layer[k], k))
        self._names = tuple(closure.names[k] for k in order)
        self._key = {closure.names[k]: k for k in order}

    @property
    def carrier(self):
        return self._names

    def aligns(self, a, b):
        return (self._key[a], self._key[b]) in self.closure.pool

    def merge(self, a, b):
        r = self.closure.merge_key(self._key[a], self._key[b])
        return UNDEFINED if r is UNDEFINED else self.closure.names[r]


class _State:
    def __init__(self, limits: Limits):
        self.limits = limits
        self.members: dict[CanonicalKey, Ontology] = {}
        self.names: dict[CanonicalKey, str] = {}
        self.pool: dict[tuple, Correspondence] = {}
        self.edges_from: dict[CanonicalKey, list[tuple[ProvenanceEdge, Homomorphism]]] = defaultdict(list)
        self.latest: dict[tuple, ProvenanceEdge] = {}
        self.processed: dict[tuple, Correspondence] = {}
        self.repo_keys: set = set()
        self.queue: deque = deque()
        self.rounds = 0

    def add_alignment(self, a, b, corr: Correspondence) -> None:
        for key, c in (((a, b), corr), ((b, a), corr.flipped())):
            old = self.pool.get(key)
            new = c if old is None else old | c
            if old is None or new != old:
                self.pool[key] = new
                self.queue.append(key)

    def add_edge(self, edge: ProvenanceEdge) -> None:
        for operand, inj in ((edge.left, edge.inject_left), (edge.right, edge.inject_right)):
            self.edges_from[operand].append((edge, inj))
            for (o, a), corr in list(self.pool.items()):
                if a == operand:
                    self.add_alignment(o, edge.result, corr.mapped(right=inj))

    def saturate(self) -> None:
        while self.queue:
            o, a = self.queue.popleft()
            corr = self.pool[o, a]
            for edge, inj in list(self.edges_from.get(a, ())):
                self.add_alignment(o, edge.result, corr.mapped(right=inj))

    def name_for(self, key) -> str:
        n = 12
        while True:
            name = "merge-" + short_key(key, n)
            if name not in self.names.values():
                return name
            n += 4

    def result(self, complete: bool, keep=None) -> ClosureResult:
        keep = set(self.members) if keep is None else keep
        edges = [e for e in self.latest.values() if e.left in keep and e.right in keep]
        pool = {k: v for k, v in self.pool.items() if k[0] in keep and k[1] in keep}
        layer = compute_layers(keep, self.repo_keys, edges)
        order = sorted(keep, key=lambda k: (layer.get(k, 0), k))
        edges.sort(key=lambda e: (e.left, e.right))
        return ClosureResult({k: self.members[k] for k in order}, {k: self.names[k] for k in order},
                             layer, edges, dict(sorted(pool.items())), frozenset(self.repo_keys),
                             self.rounds, complete)


def compute_layers(keys: Iterable, repo_keys: Iterable, edges: Iterable[ProvenanceEdge]) -> dict:
    """Least generation of each member: 1 for the repository, else min over decompositions."""
    keys = set(keys)
    layer = {k: 1 for k in repo_keys if k in keys}
    edges = list(edges)
    changed = True
    while changed:
        changed = False
        for e in edges:
            if e.left in layer and e.right in layer and e.result in keys:
                n = layer[e.left] + layer[e.right]
                if n < layer.get(e.result, n + 1):
                    layer[e.result] = n
                    changed = True
    return layer


def _transport(x: Ontology, kx, st: _State, ka, kb, po) -> Homomorphism:
    """An isomorphism from a fresh merge result onto the stored representative."""
    if kx not in st.members:
        return identity_hom(x)
    for k, inj in ((ka, po.inject_left), (kb, po.inject_right)):
        if k == kx and check_hom_kind(inj).iso:
            return inverse(inj)
    iso = find_isomorphism(x, st.members[kx])
    assert iso is not None
    return iso


def compute_closure(repo: Repository, limits: Limits | None = None, *, reverse: bool = False,
                    initial_alignments: bool = False) -> ClosureResult:
    """Merge aligned members until nothing new appears.

    ``reverse`` flips the processing order of each round (results must not
    depend on it).  ``initial_alignments`` aligns every pair of repository
    members over the empty base in addition to the given alignments.
    """
    limits = limits or Limits()
    st = _State(limits)
    to_rep: dict[str, Homomorphism] = {}
    for name, o in repo.ontologies.items():
        k = canonical_form(o)
        if k not in st.members:
            st.members[k] = o
            st.names[k] = name
        to_rep[name] = find_isomorphism(o, st.members[k]) if st.members[k] is not o else identity_hom(o)
        st.repo_keys.add(k)
    for k, o in st.members.items():
        st.add_alignment(k, k, identity_correspondence(o))
    key_of_name = {n: canonical_form(o) for n, o in repo.ontologies.items()}
    if initial_alignments:
        for a in st.repo_keys:
            for b in st.repo_keys:
                st.add_alignment(a, b, Correspondence())
    for p in repo.alignments:
        ln, rn = repo.name_of(p.left.target), repo.name_of(p.right.target)
        corr = p.correspondence().mapped(left=to_rep[ln], right=to_rep[rn])
        st.add_alignment(key_of_name[ln], key_of_name[rn], corr)

    while True:
        st.saturate()
        pending = [k for k, c in st.pool.items() if st.processed.get(k) != c]
        if not pending:
            break
        st.rounds += 1
        if st.rounds > limits.max_rounds:
            raise LimitExceeded("max_rounds", st.result(False))
        pending.sort(reverse=reverse)
        for ka, kb in pending:
            corr = st.pool[ka, kb]
            st.processed[ka, kb] = corr
            po = pushout_of(st.members[ka], st.members[kb], corr)
            x = po.merged
            if x.size > limits.max_element_size:
                raise LimitExceeded("max_element_size", st.result(False))
            kx = canonical_form(x)
            t = _transport(x, kx, st, ka, kb, po)
            if kx not in st.members:
                if len(st.members) >= limits.max_members:
                    raise LimitExceeded("max_members", st.result(False))
                st.members[kx] = x
                st.names[kx] = st.name_for(kx)
                st.add_alignment(kx, kx, identity_correspondence(x))
            edge = ProvenanceEdge(ka, kb, kx, compose_homs(po.inject_left, t),
                                  compose_homs(po.inject_right, t), corr)
            st.latest[ka, kb] = edge
            st.add_edge(edge)

    # members produced from correspondences that later grew are no longer
    # merges of anything; keep only what the final merge function reaches
    reach = set(st.repo_keys)
    changed = True
    while changed:
        changed = False
        for (a, b), e in st.latest.items():
            if a in reach and b in reach and e.result not in reach:
                reach.add(e.result)
                changed = True
    return st.result(True, reach)


def provenance_of(closure: ClosureResult, key) -> dict:
    """A least-generation merge tree for ``key`` with repository members at the leaves.

    Leaves are ``{"member": name}``; inner nodes add ``"left"`` and ``"right"``.
    """
    k = closure.key_of(key)
    by_result = defaultdict(list)
    for e in closure.provenance:
        by_result[e.result].append(e)

    def build(k):
        node = {"member": closure.names[k], "key": short_key(k), "layer": closure.layer[k]}
        if k in closure.repository_keys:
            return node
        best = min((e for e in by_result[k]
                    if closure.layer[e.left] + closure.layer[e.right] == closure.layer[k]),
                   key=lambda e: (closure.names[e.left], closure.names[e.right]))
        node["left"], node["right"] = build(best.left), build(best.right)
        return node

    return build(k)


def tree_leaves(tree: Mapping) -> list[str]:
    if "left" not in tree:
        return [tree["member"]]
    return tree_leaves(tree["left"]) + tree_leaves(tree["right"])


def non_minimal_members(closure: ClosureResult) -> list[CanonicalKey]:
    """Non-repository members whose removal keeps the set closed (should be none)."""
    out = []
    for m in closure.members:
        if m in closure.repository_keys:
            continue
        needed = any(e.result == m and m not in (e.left, e.right) for e in closure.provenance)
        if not needed:
            out.append(m)
    return out
