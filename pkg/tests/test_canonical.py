import random

from hypothesis import given, settings
from hypothesis import strategies as st

from ontomerge import fixtures as fx
from ontomerge.canonical import canonical_form, canonical_labeling, find_isomorphism, isomorphic, short_key
from ontomerge.ontology import Concept, Ontology, Relation, check_hom_kind
from oracles import brute_isomorphic


def _shuffle_ids(rng, o):
    cids, rids = o.concept_ids(), o.relation_ids()
    cn = [f"n{i}" for i in range(len(cids))]
    rn = [f"m{i}" for i in range(len(rids))]
    rng.shuffle(cn)
    rng.shuffle(rn)
    return o.renamed(dict(zip(cids, cn)), dict(zip(rids, rn)))


def test_renaming_invariance():
    rng = random.Random(1)
    for _ in range(100):
        o = fx.random_ontology(rng, 5, 5)
        r = _shuffle_ids(rng, o).with_labels({"n0": "label"})
        assert canonical_form(o) == canonical_form(r)


def test_ps_pe_differ():
    assert canonical_form(fx.PS) != canonical_form(fx.PE)
    assert not brute_isomorphic(fx.PS, fx.PE)


def test_two_cycles():
    a = Ontology([Concept("a"), Concept("b")], [Relation("x", "a", "b"), Relation("y", "b", "a")])
    b = Ontology([Concept("p"), Concept("q")], [Relation("u", "q", "p"), Relation("v", "p", "q")])
    assert canonical_form(a) == canonical_form(b)
    assert brute_isomorphic(a, b)


def test_empty():
    assert canonical_form(Ontology()) == canonical_form(Ontology())
    assert canonical_labeling(Ontology())[1] == []


def test_regular_graphs_need_individualisation():
    # a 6-cycle and two 3-cycles refine to the same colours
    six = Ontology([Concept(f"a{i}") for i in range(6)],
                   [Relation(f"r{i}", f"a{i}", f"a{(i + 1) % 6}") for i in range(6)])
    two = Ontology([Concept(f"b{i}") for i in range(6)],
                   [Relation(f"s{i}", f"b{i}", f"b{3 * (i // 3) + (i + 1) % 3}") for i in range(6)])
    assert canonical_form(six) != canonical_form(two)
    assert canonical_form(six) == canonical_form(_shuffle_ids(random.Random(3), six))


def test_find_isomorphism_is_iso():
    rng = random.Random(2)
    for _ in range(50):
        o = fx.random_ontology(rng, 5, 5)
        r = _shuffle_ids(rng, o)
        h = find_isomorphism(o, r)
        assert h is not None and check_hom_kind(h).iso
    assert find_isomorphism(fx.PS, fx.PE) is None


def test_short_key_stable():
    k = canonical_form(fx.PS)
    assert short_key(k) == short_key(k) and len(short_key(k)) == 12


@st.composite
def small(draw):
    n = draw(st.integers(0, 4))
    concepts = [Concept(f"c{i}", draw(st.sampled_from(["A", None]))) for i in range(n)]
    rels = []
    if n:
        for i in range(draw(st.integers(0, 6 - n if n < 6 else 0))):
            rels.append(Relation(f"r{i}", f"c{draw(st.integers(0, n - 1))}",
                                 f"c{draw(st.integers(0, n - 1))}", draw(st.sampled_from(["x", None]))))
    return Ontology(concepts, rels)


@settings(max_examples=400, deadline=None)
@given(small(), small())
def test_keys_decide_isomorphism(a, b):
    assert (canonical_form(a) == canonical_form(b)) == brute_isomorphic(a, b)
    assert isomorphic(a, b) == brute_isomorphic(a, b)


def test_keys_decide_isomorphism_on_shuffled_pairs():
    rng = random.Random(4)
    for _ in range(300):
        a = fx.random_ontology(rng, 4, 2)
        b = _shuffle_ids(rng, a) if rng.random() < 0.5 else fx.random_ontology(rng, 4, 2)
        assert (canonical_form(a) == canonical_form(b)) == brute_isomorphic(a, b)
