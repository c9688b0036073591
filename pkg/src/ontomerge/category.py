"""Alignment pairs, pushouts, pullbacks and the maps between them."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .canonical import canonical_form
from .ontology import (
    EMPTY,
    Concept,
    DomainMismatch,
    Homomorphism,
    InvalidHomomorphism,
    Ontology,
    Relation,
    compose_homs,
    empty_hom,
    identity_hom,
)


class CoconeDoesNotCommute(Exception):
    pass


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True


@dataclass(frozen=True)
class Correspondence:
    """The element pairs ``(r1(b), r2(b))`` an alignment identifies.

    A pushout depends on an alignment only through this set.
    """
    concepts: frozenset = frozenset()
    relations: frozenset = frozenset()

    def flipped(self) -> "Correspondence":
        return Correspondence(frozenset((b, a) for a, b in self.concepts),
                              frozenset((b, a) for a, b in self.relations))

    def __or__(self, other: "Correspondence") -> "Correspondence":
        return Correspondence(self.concepts | other.concepts, self.relations | other.relations)

    def __le__(self, other: "Correspondence") -> bool:
        return self.concepts <= other.concepts and self.relations <= other.relations

    def mapped(self, left: Homomorphism | None = None,
               right: Homomorphism | None = None) -> "Correspondence":
        """Push both sides forward along homomorphisms (``None`` = identity)."""
        lc = left.concept_map if left else None
        rc = right.concept_map if right else None
        lr = left.relation_map if left else None
        rr = right.relation_map if right else None
        return Correspondence(
            frozenset((lc[a] if lc else a, rc[b] if rc else b) for a, b in self.concepts),
            frozenset((lr[a] if lr else a, rr[b] if rr else b) for a, b in self.relations))

    def __len__(self):
        return len(self.concepts) + len(self.relations)


def identity_correspondence(o: Ontology) -> Correspondence:
    return Correspondence(frozenset((c, c) for c in o.concepts),
                          frozenset((r, r) for r in o.relations))


@dataclass(frozen=True, eq=False)
class VAlignmentPair:
    base: Ontology
    left: Homomorphism
    right: Homomorphism

    def __post_init__(self):
        if self.left.source != self.base or self.right.source != self.base:
            raise DomainMismatch("both legs of an alignment pair must start at the base")

    @classmethod
    def of(cls, left: Homomorphism, right: Homomorphism) -> "VAlignmentPair":
        return cls(left.source, left, right)

    def correspondence(self) -> Correspondence:
        return Correspondence(
            frozenset((self.left.concept_map[b], self.right.concept_map[b]) for b in self.base.concepts),
            frozenset((self.left.relation_map[b], self.right.relation_map[b]) for b in self.base.relations))

    def swapped(self) -> "VAlignmentPair":
        return VAlignmentPair(self.base, self.right, self.left)

    @property
    def operands(self) -> tuple[Ontology, Ontology]:
        return self.left.target, self.right.target


def _commutes(f1: Homomorphism, g1: Homomorphism, f2: Homomorphism, g2: Homomorphism) -> bool:
    """Does ``g1 ∘ f1 == g2 ∘ f2`` pointwise?"""
    a, b = compose_homs(f1, g1), compose_homs(f2, g2)
    return a.concept_map == b.concept_map and a.relation_map == b.relation_map


@dataclass(frozen=True, eq=False)
class AlignmentPairHom:
    """``(f, f1, f2)`` from ``(r1, r2)`` to ``(r1', r2')`` with both squares commuting."""
    source: VAlignmentPair
    target: VAlignmentPair
    base_map: Homomorphism
    left_map: Homomorphism
    right_map: Homomorphism

    def __post_init__(self):
        if not (_commutes(self.source.left, self.left_map, self.base_map, self.target.left)
                and _commutes(self.source.right, self.right_map, self.base_map, self.target.right)):
            raise InvalidHomomorphism("alignment-pair squares do not commute")


@dataclass(frozen=True, eq=False)
class PushoutResult:
    merged: Ontology
    inject_left: Homomorphism
    inject_right: Homomorphism
    correspondence: Correspondence

    @property
    def left(self) -> Ontology:
        return self.inject_left.source

    @property
    def right(self) -> Ontology:
        return self.inject_right.source


@dataclass(frozen=True, eq=False)
class PullbackResult:
    apex: Ontology
    proj_left: Homomorphism
    proj_right: Homomorphism


def _fresh_ids(classes: list[tuple[str, int]]) -> list[str]:
    """Give each class its least member id, disambiguating repeats by suffix."""
    order = sorted(range(len(classes)), key=lambda i: classes[i])
    used: set[str] = set()
    out = [""] * len(classes)
    for i in order:
        base = classes[i][0]
        name, k = base, 1
        while name in used:
            k += 1
            name = f"{base}~{k}"
        used.add(name)
        out[i] = name
    return out


def pushout_of(left: Ontology, right: Ontology, corr: Correspondence) -> PushoutResult:
    """Quotient of ``left ⊔ right`` by the equivalence generated by ``corr``."""
    lc, rc = left.concept_ids(), right.concept_ids()
    lr, rr = left.relation_ids(), right.relation_ids()
    cidx = {**{(0, c): i for i, c in enumerate(lc)}, **{(1, c): len(lc) + i for i, c in enumerate(rc)}}
    ridx = {**{(0, r): i for i, r in enumerate(lr)}, **{(1, r): len(lr) + i for i, r in enumerate(rr)}}
    celems = [(0, c) for c in lc] + [(1, c) for c in rc]
    relems = [(0, r) for r in lr] + [(1, r) for r in rr]
    cuf, ruf = UnionFind(len(celems)), UnionFind(len(relems))
    for a, b in sorted(corr.concepts):
        cuf.union(cidx[0, a], cidx[1, b])
    for a, b in sorted(corr.relations):
        ruf.union(ridx[0, a], ridx[1, b])

    onto = (left, right)

    def members(uf, elems):
        groups: dict[int, list] = {}
        for i, e in enumerate(elems):
            groups.setdefault(uf.find(i), []).append(e)
        roots = sorted(groups)
        return roots, [groups[r] for r in roots]

    croots, cgroups = members(cuf, celems)
    rroots, rgroups = members(ruf, relems)
    cnames = _fresh_ids([min((cid, side) for side, cid in g) for g in cgroups])
    rnames = _fresh_ids([min((rid, side) for side, rid in g) for g in rgroups])
    cname_of = {}
    concepts = []
    for name, group in zip(cnames, cgroups):
        tags = {onto[s].concepts[c].tag for s, c in group}
        if len(tags) != 1:
            raise InvalidHomomorphism(f"correspondence identifies concepts with tags {sorted(map(str, tags))}")
        labels = [onto[s].concepts[c].label for s, c in group if onto[s].concepts[c].label is not None]
        concepts.append(Concept(name, tags.pop(), min(labels) if labels else None))
        for m in group:
            cname_of[m] = name
    rname_of = {}
    relations = []
    for name, group in zip(rnames, rgroups):
        ends = {(cname_of[s, onto[s].relations[r].src], cname_of[s, onto[s].relations[r].dst])
                for s, r in group}
        tags = {onto[s].relations[r].tag for s, r in group}
        if len(ends) != 1 or len(tags) != 1:
            raise InvalidHomomorphism("correspondence identifies incompatible relations")
        labels = [onto[s].relations[r].label for s, r in group if onto[s].relations[r].label is not None]
        (src, dst), = ends
        relations.append(Relation(name, src, dst, tags.pop(), min(labels) if labels else None))
        for m in group:
            rname_of[m] = name
    merged = Ontology(concepts, relations)
    il = Homomorphism(left, merged, {c: cname_of[0, c] for c in lc}, {r: rname_of[0, r] for r in lr})
    ir = Homomorphism(right, merged, {c: cname_of[1, c] for c in rc}, {r: rname_of[1, r] for r in rr})
    return PushoutResult(merged, il, ir, corr)


def pushout(pair: VAlignmentPair) -> PushoutResult:
    left, right = pair.operands
    return pushout_of(left, right, pair.correspondence())


def coproduct(left: Ontology, right: Ontology) -> PushoutResult:
    return pushout(VAlignmentPair(EMPTY, empty_hom(left), empty_hom(right)))


def pullback(left: Homomorphism, right: Homomorphism) -> PullbackResult:
    """Matching pairs of ``left: P -> T`` and ``right: Q -> T``."""
    if left.target != right.target:
        raise DomainMismatch("pullback legs must share a target")
    cpairs = [(x, y) for x in left.source.concepts for y in right.source.concepts
              if left.concept_map[x] == right.concept_map[y]]
    rpairs = [(e, f) for e in left.source.relations for f in right.source.relations
              if left.relation_map[e] == right.relation_map[f]]
    cname = {p: f"({p[0]},{p[1]})" for p in cpairs}
    concepts = [Concept(cname[p], left.source.concepts[p[0]].tag) for p in cpairs]
    relations = []
    for e, f in rpairs:
        re_, rf = left.source.relations[e], right.source.relations[f]
        relations.append(Relation(f"({e},{f})", cname[re_.src, rf.src], cname[re_.dst, rf.dst], re_.tag))
    apex = Ontology(concepts, relations)
    p1 = Homomorphism(apex, left.source, {cname[p]: p[0] for p in cpairs},
                      {f"({e},{f})": e for e, f in rpairs})
    p2 = Homomorphism(apex, right.source, {cname[p]: p[1] for p in cpairs},
                      {f"({e},{f})": f for e, f in rpairs})
    return PullbackResult(apex, p1, p2)


def alignment_from_correspondence(left: Ontology, right: Ontology,
                                  corr: Correspondence) -> VAlignmentPair:
    """The alignment pair whose base is the correspondence itself.

    Fails with :class:`InvalidHomomorphism` if some relation pair has endpoints
    outside the concept pairs or tags disagree.
    """
    cname = {p: f"({p[0]},{p[1]})" for p in sorted(corr.concepts)}
    concepts = [Concept(cname[p], left.concepts[p[0]].tag) for p in sorted(corr.concepts)]
    relations = []
    for e, f in sorted(corr.relations):
        re_, rf = left.relations[e], right.relations[f]
        s, d = (re_.src, rf.src), (re_.dst, rf.dst)
        if s not in cname or d not in cname:
            raise InvalidHomomorphism(f"relation pair ({e},{f}) has unaligned endpoints")
        relations.append(Relation(f"({e},{f})", cname[s], cname[d], re_.tag))
    base = Ontology(concepts, relations)
    r1 = Homomorphism(base, left, {cname[p]: p[0] for p in cname},
                      {f"({e},{f})": e for e, f in corr.relations})
    r2 = Homomorphism(base, right, {cname[p]: p[1] for p in cname},
                      {f"({e},{f})": f for e, f in corr.relations})
    return VAlignmentPair(base, r1, r2)


def mediating_hom(square: PushoutResult, cocone_left: Homomorphism,
                  cocone_right: Homomorphism) -> Homomorphism:
    """The unique ``h`` with ``h ∘ ι1 = cocone_left`` and ``h ∘ ι2 = cocone_right``."""
    if cocone_left.source != square.left or cocone_right.source != square.right:
        raise DomainMismatch("cocone legs must start at the pushout operands")
    if cocone_left.target != cocone_right.target:
        raise DomainMismatch("cocone legs must share a target")
    corr = square.correspondence
    if any(cocone_left.concept_map[a] != cocone_right.concept_map[b] for a, b in corr.concepts) or \
            any(cocone_left.relation_map[a] != cocone_right.relation_map[b] for a, b in corr.relations):
        raise CoconeDoesNotCommute("cocone disagrees on aligned elements")
    cm, rm = {}, {}
    for inj, leg in ((square.inject_left, cocone_left), (square.inject_right, cocone_right)):
        for x, img in inj.concept_map.items():
            cm.setdefault(img, leg.concept_map[x])
        for x, img in inj.relation_map.items():
            rm.setdefault(img, leg.relation_map[x])
    return Homomorphism(square.merged, cocone_left.target, cm, rm)


def induced_merge_hom(pair_hom: AlignmentPairHom, src_pushout: PushoutResult,
                      dst_pushout: PushoutResult) -> Homomorphism:
    """``f*`` between the two merges induced by a map of alignment pairs."""
    return mediating_hom(src_pushout,
                         compose_homs(pair_hom.left_map, dst_pushout.inject_left),
                         compose_homs(pair_hom.right_map, dst_pushout.inject_right))


def _lift_rules(known: VAlignmentPair, operand: Ontology, base_leg: Homomorphism,
                inject: Homomorphism) -> list[VAlignmentPair]:
    out = []
    # known = (s1: B' -> O, s2: B' -> operand); also the mirrored orientation
    for s_other, s_op, flip in ((known.left, known.right, False), (known.right, known.left, True)):
        if s_op.target != operand:
            continue
        lifted = (s_other, compose_homs(s_op, inject))
        pb = pullback(s_op, base_leg)
        pb_form = (compose_homs(pb.proj_left, s_other),
                   compose_homs(compose_homs(pb.proj_right, base_leg), inject))
        for a, b in (lifted, pb_form):
            out.append(VAlignmentPair.of(b, a) if flip else VAlignmentPair.of(a, b))
    return out


def derive_alignments(known: Iterable[VAlignmentPair], new_merge: PushoutResult,
                      pair: VAlignmentPair) -> list[VAlignmentPair]:
    """Alignments that exist once ``pair`` has been merged into ``new_merge``.

    For every known pair touching an operand: the pair composed with the
    injection, and the pullback-based pair; plus the identity pair on the merge.
    Pairs inducing the same correspondence are kept once.
    """
    o1, o2 = pair.operands
    derived = []
    for k in known:
        derived += _lift_rules(k, o1, pair.left, new_merge.inject_left)
        derived += _lift_rules(k, o2, pair.right, new_merge.inject_right)
    x = new_merge.merged
    derived.append(VAlignmentPair(x, identity_hom(x), identity_hom(x)))
    unique: dict = {}
    for p in derived:
        sig = (p.left.target, p.right.target, p.correspondence())
        unique.setdefault(sig, p)
    return [unique[k] for k in sorted(unique, key=lambda s: (sorted(s[2].concepts), sorted(s[2].relations)))]


def leq_by_merging(a: Ontology, b: Ontology, candidates: Iterable[VAlignmentPair]) -> bool:
    """Is there a candidate alignment with ``a ⊔ b ≅ b ≅ b ⊔ a``?"""
    kb = canonical_form(b)
    for p in candidates:
        if p.left.target != a or p.right.target != b:
            continue
        if (canonical_form(pushout(p).merged) == kb
                and canonical_form(pushout(p.swapped()).merged) == kb):
            return True
    return False
