"""Finite ontology structures and the homomorphisms between them.

An ontology is a finite directed multigraph: concepts are nodes, relations
are edges between exactly two concepts.  Concepts and relations may carry a
``tag`` (a sort name that every homomorphism must preserve exactly) and a
``label`` (display text that no operation looks at).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple


class OntologyError(Exception):
    pass


class ValidationError(OntologyError):
    """Raised by :func:`validate`; ``violations`` lists every problem found."""

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidHomomorphism(OntologyError):
    pass


class DomainMismatch(OntologyError):
    pass


@dataclass(frozen=True, order=True)
class Concept:
    id: str
    tag: str | None = None
    label: str | None = None


@dataclass(frozen=True, order=True)
class Relation:
    id: str
    src: str
    dst: str
    tag: str | None = None
    label: str | None = None


class Ontology:
    """Immutable ontology.  Elements are kept sorted by id."""

    __slots__ = ("_concepts", "_relations", "_hash")

    def __init__(self, concepts: Iterable[Concept] = (), relations: Iterable[Relation] = ()):
        cs = sorted(concepts, key=lambda c: c.id)
        rs = sorted(relations, key=lambda r: r.id)
        problems = _violations(cs, rs)
        if problems:
            raise ValidationError(problems)
        self._concepts = {c.id: c for c in cs}
        self._relations = {r.id: r for r in rs}
        self._hash = None

    @property
    def concepts(self) -> Mapping[str, Concept]:
        return self._concepts

    @property
    def relations(self) -> Mapping[str, Relation]:
        return self._relations

    def concept_ids(self) -> list[str]:
        return list(self._concepts)

    def relation_ids(self) -> list[str]:
        return list(self._relations)

    @property
    def size(self) -> int:
        return len(self._concepts) + len(self._relations)

    def is_empty(self) -> bool:
        return not self._concepts and not self._relations

    def _key(self):
        return (tuple(self._concepts.values()), tuple(self._relations.values()))

    def __eq__(self, other):
        if not isinstance(other, Ontology):
            return NotImplemented
        return self is other or self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        return f"Ontology({len(self._concepts)} concepts, {len(self._relations)} relations)"

    def with_labels(self, labels: Mapping[str, str | None]) -> "Ontology":
        cs = [Concept(c.id, c.tag, labels.get(c.id, c.label)) for c in self._concepts.values()]
        rs = [Relation(r.id, r.src, r.dst, r.tag, labels.get(r.id, r.label))
              for r in self._relations.values()]
        return Ontology(cs, rs)

    def renamed(self, concept_ids: Mapping[str, str], relation_ids: Mapping[str, str]) -> "Ontology":
        """Copy with ids replaced; tags, labels and incidence are kept."""
        cs = [Concept(concept_ids[c.id], c.tag, c.label) for c in self._concepts.values()]
        rs = [Relation(relation_ids[r.id], concept_ids[r.src], concept_ids[r.dst], r.tag, r.label)
              for r in self._relations.values()]
        return Ontology(cs, rs)


def _violations(concepts: list[Concept], relations: list[Relation]) -> list[str]:
    out = []
    seen = set()
    for c in concepts:
        if c.id in seen:
            out.append(f"duplicate concept id {c.id!r}")
        seen.add(c.id)
    rseen = set()
    for r in relations:
        if r.id in rseen:
            out.append(f"duplicate relation id {r.id!r}")
        rseen.add(r.id)
        if r.src not in seen:
            out.append(f"dangling src {r.src!r} in relation {r.id!r}")
        if r.dst not in seen:
            out.append(f"dangling dst {r.dst!r} in relation {r.id!r}")
    return out


EMPTY = Ontology()


def validate(data: Mapping | None) -> Ontology:
    """Build an :class:`Ontology` from plain data (the JSON document shape).

    Collects every violation before raising, so a user fixing a file sees all
    of them at once.
    """
    if not data:
        return EMPTY
    problems = []
    concepts, relations = [], []
    for i, raw in enumerate(data.get("concepts", [])):
        if not isinstance(raw, Mapping) or "id" not in raw:
            problems.append(f"concept #{i} has no id")
            continue
        concepts.append(Concept(str(raw["id"]), raw.get("tag"), raw.get("label")))
    for i, raw in enumerate(data.get("relations", [])):
        if not isinstance(raw, Mapping) or "id" not in raw:
            problems.append(f"relation #{i} has no id")
            continue
        missing = [k for k in ("src", "dst") if k not in raw]
        if missing:
            problems.append(f"relation {raw['id']!r} missing {', '.join(missing)}")
            continue
        relations.append(Relation(str(raw["id"]), str(raw["src"]), str(raw["dst"]),
                                  raw.get("tag"), raw.get("label")))
    problems.extend(_violations(concepts, relations))
    if problems:
        raise ValidationError(problems)
    return Ontology(concepts, relations)


class Homomorphism:
    """Structure-preserving pair of maps ``source -> target``.

    Checked on construction: both maps total, images exist, incidence and tags
    preserved.  Labels are never compared.
    """

    __slots__ = ("source", "target", "concept_map", "relation_map")

    def __init__(self, source: Ontology, target: Ontology,
                 concept_map: Mapping[str, str], relation_map: Mapping[str, str]):
        self.source = source
        self.target = target
        self.concept_map = dict(concept_map)
        self.relation_map = dict(relation_map)
        problem = hom_violation(source, target, self.concept_map, self.relation_map)
        if problem:
            raise InvalidHomomorphism(problem)

    def __call__(self, element_id: str) -> str:
        if element_id in self.concept_map:
            return self.concept_map[element_id]
        return self.relation_map[element_id]

    def __eq__(self, other):
        if not isinstance(other, Homomorphism):
            return NotImplemented
        return (self.concept_map == other.concept_map and self.relation_map == other.relation_map
                and self.source == other.source and self.target == other.target)

    def __hash__(self):
        return hash((tuple(sorted(self.concept_map.items())),
                     tuple(sorted(self.relation_map.items()))))

    def __repr__(self):
        return f"Homomorphism({self.concept_map}, {self.relation_map})"


def hom_violation(source: Ontology, target: Ontology,
                  concept_map: Mapping[str, str], relation_map: Mapping[str, str]) -> str | None:
    """First reason the maps fail to be a homomorphism, or ``None``."""
    tc, tr = target.concepts, target.relations
    for cid, c in source.concepts.items():
        if cid not in concept_map:
            return f"not total: concept {cid!r} unmapped"
        img = tc.get(concept_map[cid])
        if img is None:
            return f"unknown target concept {concept_map[cid]!r}"
        if img.tag != c.tag:
            return f"tag mismatch: concept {cid!r} ({c.tag}) -> {img.id!r} ({img.tag})"
    for rid, r in source.relations.items():
        if rid not in relation_map:
            return f"not total: relation {rid!r} unmapped"
        img = tr.get(relation_map[rid])
        if img is None:
            return f"unknown target relation {relation_map[rid]!r}"
        if img.tag != r.tag:
            return f"tag mismatch: relation {rid!r} ({r.tag}) -> {img.id!r} ({img.tag})"
        if concept_map[r.src] != img.src or concept_map[r.dst] != img.dst:
            return f"incidence not preserved by relation {rid!r}"
    extra = set(concept_map) - set(source.concepts)
    extra |= set(relation_map) - set(source.relations)
    if extra:
        return f"map mentions unknown source elements {sorted(extra)}"
    return None


def identity_hom(o: Ontology) -> Homomorphism:
    return Homomorphism(o, o, {c: c for c in o.concepts}, {r: r for r in o.relations})


def empty_hom(target: Ontology) -> Homomorphism:
    """The unique map out of the empty ontology."""
    return Homomorphism(EMPTY, target, {}, {})


def compose_homs(first: Homomorphism, second: Homomorphism) -> Homomorphism:
    """``second ∘ first``: apply ``first``, then ``second``."""
    if first.target != second.source:
        raise DomainMismatch("first.target differs from second.source")
    cm = {k: second.concept_map[v] for k, v in first.concept_map.items()}
    rm = {k: second.relation_map[v] for k, v in first.relation_map.items()}
    return Homomorphism(first.source, second.target, cm, rm)


class HomKind(NamedTuple):
    injective: bool
    surjective: bool
    epic: bool
    iso: bool


def check_hom_kind(h: Homomorphism) -> HomKind:
    # epic is taken to be componentwise surjective
    cvals, rvals = list(h.concept_map.values()), list(h.relation_map.values())
    injective = len(set(cvals)) == len(cvals) and len(set(rvals)) == len(rvals)
    surjective = (set(cvals) == set(h.target.concepts)
                  and set(rvals) == set(h.target.relations))
    iso = False
    if injective and surjective:
        try:
            inverse(h)
            iso = True
        except InvalidHomomorphism:
            iso = False
    return HomKind(injective, surjective, surjective, iso)


def inverse(h: Homomorphism) -> Homomorphism:
    cm = {v: k for k, v in h.concept_map.items()}
    rm = {v: k for k, v in h.relation_map.items()}
    if len(cm) != len(h.target.concepts) or len(rm) != len(h.target.relations):
        raise InvalidHomomorphism("not bijective")
    return Homomorphism(h.target, h.source, cm, rm)
