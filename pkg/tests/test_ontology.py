import random

import pytest

from ontomerge import fixtures as fx
from ontomerge.category import pullback, pushout
from ontomerge.ontology import (
    EMPTY,
    Concept,
    DomainMismatch,
    Homomorphism,
    InvalidHomomorphism,
    Ontology,
    Relation,
    ValidationError,
    check_hom_kind,
    compose_homs,
    empty_hom,
    identity_hom,
    inverse,
    validate,
)
from oracles import all_homs


def test_validate_dangling_src():
    with pytest.raises(ValidationError) as exc:
        validate({"concepts": [{"id": "a"}], "relations": [{"id": "r", "src": "zz", "dst": "a"}]})
    assert any("dangling src" in v for v in exc.value.violations)


def test_validate_collects_every_violation():
    with pytest.raises(ValidationError) as exc:
        validate({"concepts": [{"id": "a"}, {"id": "a"}],
                  "relations": [{"id": "r", "src": "x", "dst": "y"}]})
    assert len(exc.value.violations) == 3


def test_validate_empty_is_initial():
    o = validate({})
    assert o.is_empty() and o == EMPTY
    assert validate(None) == EMPTY


def test_validate_ps():
    o = validate({"concepts": [{"id": "c1", "tag": "Person"}, {"id": "c2", "tag": "Student"}],
                  "relations": [{"id": "e1", "tag": "isa", "src": "c2", "dst": "c1"}]})
    assert o == fx.PS
    assert len(o.concepts) == 2 and len(o.relations) == 1
    for r in o.relations.values():
        assert r.src in o.concepts and r.dst in o.concepts


def test_constructor_rejects_duplicates():
    with pytest.raises(ValidationError):
        Ontology([Concept("a"), Concept("a")])


def test_labels_do_not_constrain_maps():
    labelled = fx.PS.with_labels({"c1": "human"})
    h = Homomorphism(labelled, fx.PS, {"c1": "c1", "c2": "c2"}, {"e1": "e1"})
    assert check_hom_kind(h).iso


@pytest.mark.parametrize("cm,rm,why", [
    ({"c1": "c1"}, {"e1": "e1"}, "not total"),
    ({"c1": "c2", "c2": "c2"}, {"e1": "e1"}, "tag mismatch"),
    ({"c1": "c1", "c2": "c2"}, {"e1": "nope"}, "unknown target"),
])
def test_invalid_homomorphisms(cm, rm, why):
    with pytest.raises(InvalidHomomorphism, match=why):
        Homomorphism(fx.PS, fx.PS, cm, rm)


def test_incidence_must_be_preserved():
    o = Ontology([Concept("a"), Concept("b")], [Relation("r", "a", "b")])
    with pytest.raises(InvalidHomomorphism, match="incidence"):
        Homomorphism(o, o, {"a": "b", "b": "a"}, {"r": "r"})


def test_compose_identity_laws():
    h = pushout(fx.person_alignment()).inject_left
    assert compose_homs(identity_hom(h.source), h) == h
    assert compose_homs(h, identity_hom(h.target)) == h


def test_compose_domain_mismatch():
    with pytest.raises(DomainMismatch):
        compose_homs(identity_hom(fx.PS), identity_hom(fx.PE))


def test_composite_pullback_leg_to_merged_person():
    pair = fx.person_alignment()
    po = pushout(pair)
    b2 = Ontology([Concept("b'", "Person")])
    pb = pullback(Homomorphism(b2, fx.PS, {"b'": "c1"}, {}), pair.left)
    direct = compose_homs(compose_homs(pb.proj_right, pair.left), po.inject_left)
    (only,) = pb.apex.concepts
    assert direct.concept_map == {only: po.inject_left.concept_map["c1"]}
    assert po.merged.concepts[direct.concept_map[only]].tag == "Person"


def _random_hom(rng, source, target):
    homs = all_homs(source, target)
    if not homs:
        return None
    cm, rm = rng.choice(homs)
    return Homomorphism(source, target, cm, rm)


def test_compose_associative_on_random_triples():
    rng = random.Random(5)
    checked = 0
    while checked < 60:
        os = [fx.random_ontology(rng, 3, 2, p, min_concepts=1) for p in "pqrs"]
        hs = [_random_hom(rng, os[i], os[i + 1]) for i in range(3)]
        if None in hs:
            continue
        f, g, h = hs
        assert compose_homs(compose_homs(f, g), h) == compose_homs(f, compose_homs(g, h))
        checked += 1


def test_hom_kind_examples():
    assert check_hom_kind(identity_hom(fx.PS)) == (True, True, True, True)
    inc = fx.person_alignment().left
    assert check_hom_kind(inc) == (True, False, False, False)


def test_epic_square_is_pushout():
    # a surjective e against two identities: the merge is the target itself
    from ontomerge.category import VAlignmentPair
    from oracles import brute_isomorphic
    o = Ontology([Concept("a", "T"), Concept("b", "T")], [Relation("r", "a", "b")])
    o2 = Ontology([Concept("x", "T")], [Relation("s", "x", "x")])
    e = Homomorphism(o, o2, {"a": "x", "b": "x"}, {"r": "s"})
    assert check_hom_kind(e).epic
    po = pushout(VAlignmentPair(o, e, e))
    assert brute_isomorphic(po.merged, o2)


def test_iso_inverse_and_keys():
    from ontomerge.canonical import canonical_form
    from ontomerge.homsearch import find_homomorphisms
    ren = fx.PS.renamed({"c1": "p", "c2": "s"}, {"e1": "i"})
    h = Homomorphism(fx.PS, ren, {"c1": "p", "c2": "s"}, {"e1": "i"})
    assert check_hom_kind(h).iso
    inv = inverse(h)
    assert inv in find_homomorphisms(ren, fx.PS, "all")
    assert canonical_form(fx.PS) == canonical_form(ren)


def test_empty_hom_is_unique_map_from_initial():
    assert empty_hom(fx.PS).source == EMPTY
    assert len(all_homs(EMPTY, fx.PS)) == 1
