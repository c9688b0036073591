"""Small named ontologies, example merging systems and random generators.

The Person fixtures: PS (a student is a person), PE (an employee is a
person), their merge M over a shared Person concept, and Q (a person teaches
a course) which is not aligned with anything else.
"""
from __future__ import annotations

import itertools
import random

from .algebra import UNDEFINED, MergingSystem, closure_under_merge
from .canonical import canonical_form, short_key
from .category import (
    Correspondence,
    VAlignmentPair,
    coproduct,
    pushout,
    pushout_of,
)
from .closure import Repository
from .ontology import Concept, Homomorphism, Ontology, Relation

PS = Ontology([Concept("c1", "Person"), Concept("c2", "Student")],
              [Relation("e1", "c2", "c1", "isa")])
PE = Ontology([Concept("d1", "Person"), Concept("d2", "Employee")],
              [Relation("f1", "d2", "d1", "isa")])
Q = Ontology([Concept("q1", "Person"), Concept("q2", "Course")],
             [Relation("g1", "q1", "q2", "teaches")])
PERSON = Ontology([Concept("b", "Person")])


def person_alignment() -> VAlignmentPair:
    """PS and PE share their Person concept."""
    return VAlignmentPair(PERSON, Homomorphism(PERSON, PS, {"b": "c1"}, {}),
                          Homomorphism(PERSON, PE, {"b": "d1"}, {}))


def q_alignment() -> VAlignmentPair:
    """Q and PS share their Person concept."""
    return VAlignmentPair(PERSON, Homomorphism(PERSON, Q, {"b": "q1"}, {}),
                          Homomorphism(PERSON, PS, {"b": "c1"}, {}))


M = pushout(person_alignment()).merged


def person_repository(with_q: bool = False) -> Repository:
    onts = {"PS": PS, "PE": PE}
    if with_q:
        onts["Q"] = Q
    return Repository(onts, [person_alignment()])


def three_generator_repository() -> Repository:
    """Three ontologies, each pair sharing one concept that the third lacks."""
    a = Ontology([Concept("a_x", "X"), Concept("a_z", "Z"), Concept("a_1", "A")],
                 [Relation("a_r", "a_1", "a_x", "has"), Relation("a_s", "a_1", "a_z", "has")])
    b = Ontology([Concept("b_x", "X"), Concept("b_y", "Y"), Concept("b_1", "B")],
                 [Relation("b_r", "b_1", "b_x", "has"), Relation("b_s", "b_1", "b_y", "has")])
    c = Ontology([Concept("c_y", "Y"), Concept("c_z", "Z"), Concept("c_1", "C")],
                 [Relation("c_r", "c_1", "c_y", "has"), Relation("c_s", "c_1", "c_z", "has")])
    pairs = []
    for (l, lid), (r, rid), tag in (((a, "a_x"), (b, "b_x"), "X"), ((b, "b_y"), (c, "c_y"), "Y"),
                                    ((a, "a_z"), (c, "c_z"), "Z")):
        base = Ontology([Concept("s", tag)])
        pairs.append(VAlignmentPair(base, Homomorphism(base, l, {"s": lid}, {}),
                                    Homomorphism(base, r, {"s": rid}, {})))
    return Repository({"A": a, "B": b, "C": c}, pairs)


# ------------------------------------------------------------------ example systems

class DisjointUnionSystem(MergingSystem):
    """Everything aligns and merging is disjoint union.

    Elements are short canonical keys, so equality is isomorphism.  The
    carrier is a finite sample; merges leave it, so the system is open.
    """

    def __init__(self, seeds):
        self.registry: dict[str, Ontology] = {}
        self._carrier = tuple(dict.fromkeys(self.register(o) for o in seeds))

    def register(self, o: Ontology) -> str:
        k = short_key(canonical_form(o), 16)
        self.registry.setdefault(k, o)
        return k

    @property
    def carrier(self):
        return self._carrier

    def contains(self, x):
        return x in self.registry

    def aligns(self, a, b):
        return True

    def merge(self, a, b):
        if a is UNDEFINED or b is UNDEFINED:
            return UNDEFINED
        return self.register(coproduct(self.registry[a], self.registry[b]).merged)


def sub_ontology(host: Ontology, ids) -> Ontology:
    ids = set(ids)
    return Ontology([c for c in host.concepts.values() if c.id in ids],
                    [r for r in host.relations.values()
                     if r.id in ids and r.src in ids and r.dst in ids])


class GraphOverlapSystem(MergingSystem):
    """Subgraphs of one host, merged by gluing along their common part.

    An element is the frozenset of host ids it contains.  The registry of
    overlaps is the intersection; an empty overlap still aligns.  The carrier
    is the seeds closed under merging.
    """

    def __init__(self, host: Ontology, seeds):
        self.host = host
        start = [frozenset(sub_ontology(host, s).concepts) | frozenset(sub_ontology(host, s).relations)
                 for s in seeds]
        self._carrier = tuple(sorted(closure_under_merge(start, self.merge), key=lambda s: (len(s), sorted(s))))

    @property
    def carrier(self):
        return self._carrier

    def overlap(self, a, b) -> Correspondence:
        common = a & b
        return Correspondence(frozenset((c, c) for c in common if c in self.host.concepts),
                              frozenset((r, r) for r in common if r in self.host.relations))

    def aligns(self, a, b):
        return True

    def merge(self, a, b):
        po = pushout_of(sub_ontology(self.host, a), sub_ontology(self.host, b), self.overlap(a, b))
        return frozenset(po.merged.concepts) | frozenset(po.merged.relations)


class KeyedTableSystem(MergingSystem):
    """Tables keyed by entity pairs, merged by full outer join on the key.

    A table maps ``(e_i, e_j)`` to a set of relation names; joining two tables
    unions the relation sets key by key.
    """

    def __init__(self, seeds):
        start = [self.table_of(s) for s in seeds]
        self._carrier = tuple(sorted(closure_under_merge(start, self.merge),
                                     key=lambda t: (len(t), sorted((k, sorted(v)) for k, v in t))))

    @staticmethod
    def table_of(rows) -> frozenset:
        acc: dict = {}
        for key, rels in dict(rows).items():
            acc[tuple(key)] = frozenset(rels)
        return frozenset(acc.items())

    @property
    def carrier(self):
        return self._carrier

    def aligns(self, a, b):
        return True

    def merge(self, a, b):
        acc: dict = {}
        for t in (a, b):
            for key, rels in t:
                acc[key] = acc.get(key, frozenset()) | rels
        return frozenset(acc.items())


def disjoint_union_fixture() -> DisjointUnionSystem:
    return DisjointUnionSystem([PS, PE, Ontology([Concept("u")])])


def graph_overlap_fixture() -> GraphOverlapSystem:
    host = Ontology([Concept("h1", "A"), Concept("h2", "B"), Concept("h3", "C"), Concept("h4", "D")],
                    [Relation("k1", "h1", "h2", "r"), Relation("k2", "h2", "h3", "r"),
                     Relation("k3", "h3", "h4", "s")])
    return GraphOverlapSystem(host, [{"h1", "h2", "k1"}, {"h2", "h3", "k2"}, {"h3", "h4", "k3"}, {"h1"}])


def keyed_table_fixture() -> KeyedTableSystem:
    return KeyedTableSystem([
        {("river", "city"): {"flows_through"}},
        {("river", "city"): {"borders"}, ("city", "country"): {"in"}},
        {("lake", "river"): {"feeds"}},
    ])


# ------------------------------------------------------------------ random generators

CONCEPT_TAGS = ("A", "B", None)
RELATION_TAGS = ("r", None)


def random_ontology(rng: random.Random, max_concepts: int = 3, max_relations: int = 3,
                    prefix: str = "x", min_concepts: int = 0, concept_tags=CONCEPT_TAGS,
                    relation_tags=RELATION_TAGS) -> Ontology:
    n = rng.randint(min_concepts, max_concepts)
    concepts = [Concept(f"{prefix}{i}", rng.choice(concept_tags)) for i in range(n)]
    relations = []
    if n:
        for i in range(rng.randint(0, max_relations)):
            s, d = rng.choice(concepts), rng.choice(concepts)
            relations.append(Relation(f"{prefix}e{i}", s.id, d.id, rng.choice(relation_tags)))
    return Ontology(concepts, relations)


def random_base_into(rng: random.Random, o1: Ontology, o2: Ontology, max_base: int = 3) -> VAlignmentPair:
    """A random alignment pair ``B -> o1, B -> o2``; legs need not be injective."""
    cpairs = [(x, y) for x in o1.concepts for y in o2.concepts
              if o1.concepts[x].tag == o2.concepts[y].tag]
    rpairs = [(e, f) for e in o1.relations for f in o2.relations
              if o1.relations[e].tag == o2.relations[f].tag]
    concepts, cm1, cm2 = [], {}, {}
    relations, rm1, rm2 = [], {}, {}

    def base_concept(p):
        bid = f"b{len(concepts)}"
        concepts.append(Concept(bid, o1.concepts[p[0]].tag))
        cm1[bid], cm2[bid] = p
        return bid

    if cpairs:
        for _ in range(rng.randint(0, max_base)):
            base_concept(rng.choice(cpairs))
    for e, f in rng.sample(rpairs, k=min(len(rpairs), rng.randint(0, 2))):
        re_, rf = o1.relations[e], o2.relations[f]
        ends = []
        for p in ((re_.src, rf.src), (re_.dst, rf.dst)):
            if o1.concepts[p[0]].tag != o2.concepts[p[1]].tag:
                break
            have = [b for b in cm1 if (cm1[b], cm2[b]) == p]
            ends.append(have[0] if have and rng.random() < 0.7 else base_concept(p))
        if len(ends) < 2:
            continue
        rid = f"bb{len(relations)}"
        relations.append(Relation(rid, ends[0], ends[1], re_.tag))
        rm1[rid], rm2[rid] = e, f
    base = Ontology(concepts, relations)
    return VAlignmentPair(base, Homomorphism(base, o1, cm1, rm1), Homomorphism(base, o2, cm2, rm2))


def random_pair(rng: random.Random, max_total: int = 8) -> VAlignmentPair:
    """Random alignment pair whose two operands have at most ``max_total`` elements together."""
    while True:
        o1 = random_ontology(rng, 3, 2, "x")
        o2 = random_ontology(rng, 3, 2, "y")
        if o1.size + o2.size <= max_total:
            return random_base_into(rng, o1, o2)


def random_w_diagram(rng: random.Random) -> tuple[VAlignmentPair, VAlignmentPair]:
    """``B1 -> O1, O2`` and ``B2 -> O2, O3``."""
    o1 = random_ontology(rng, 3, 2, "x")
    o2 = random_ontology(rng, 3, 2, "y")
    o3 = random_ontology(rng, 3, 2, "z")
    return random_base_into(rng, o1, o2), random_base_into(rng, o2, o3)


def random_views_repository(rng: random.Random, generators: tuple[int, int] = (2, 4),
                            max_view: int = 6) -> Repository:
    """Views of one random universe whose tags are all distinct.

    Each generator is a connected-ish piece of the universe with at most
    ``max_view`` elements, under its own ids.  Every pair of generators is
    aligned over its common part (possibly empty).
    """
    n_concepts = rng.randint(3, 6)
    universe_c = [Concept(f"u{i}", f"T{i}") for i in range(n_concepts)]
    universe_r = []
    for i in range(rng.randint(2, 7)):
        s, d = rng.randrange(n_concepts), rng.randrange(n_concepts)
        universe_r.append(Relation(f"w{i}", f"u{s}", f"u{d}", f"R{i}"))
    universe = Ontology(universe_c, universe_r)
    k = rng.randint(*generators)
    views: list[set] = []
    while len(views) < k:
        cs = set(rng.sample(sorted(universe.concepts), rng.randint(1, min(4, n_concepts, max_view))))
        rs = [r.id for r in universe_r if r.src in cs and r.dst in cs]
        rng.shuffle(rs)
        ids = set(cs)
        for r in rs:
            if len(ids) < max_view:
                ids.add(r)
        if ids not in views:
            views.append(ids)
    onts = {}
    for g, ids in enumerate(views):
        sub = sub_ontology(universe, ids)
        ren = {i: f"g{g}.{i}" for i in ids}
        onts[f"G{g}"] = sub.renamed({c: ren[c] for c in sub.concepts}, {r: ren[r] for r in sub.relations})
    pairs = []
    for (i, a), (j, b) in itertools.combinations(enumerate(views), 2):
        common = sorted(a & b)
        base = sub_ontology(universe, common)
        la, lb = onts[f"G{i}"], onts[f"G{j}"]
        pairs.append(VAlignmentPair(
            base,
            Homomorphism(base, la, {c: f"g{i}.{c}" for c in base.concepts}, {r: f"g{i}.{r}" for r in base.relations}),
            Homomorphism(base, lb, {c: f"g{j}.{c}" for c in base.concepts}, {r: f"g{j}.{r}" for r in base.relations})))
    return Repository(onts, pairs)
