import json
import random

import pytest

from ontomerge import fixtures as fx
from ontomerge.canonical import canonical_form
from ontomerge.category import coproduct
from ontomerge.closure import (
    LimitExceeded,
    Limits,
    Repository,
    UnknownKey,
    compute_closure,
    non_minimal_members,
    provenance_of,
    tree_leaves,
)
from ontomerge.ontology import Concept, Ontology
from oracles import brute_isomorphic, iso_classes, subset_merges


def test_person_closure():
    c = compute_closure(fx.person_repository())
    assert len(c) == 3 and c.complete
    mkey = canonical_form(fx.M)
    assert c.layer == {canonical_form(fx.PS): 1, canonical_form(fx.PE): 1, mkey: 2}
    assert c.is_closed()


def test_single_ontology_reflexive_only():
    c = compute_closure(Repository({"O": fx.PS}))
    assert list(c.names.values()) == ["O"]
    assert c.merge_key(canonical_form(fx.PS), canonical_form(fx.PS)) == canonical_form(fx.PS)


def test_three_generators_match_subset_oracle():
    repo = fx.three_generator_repository()
    c = compute_closure(repo)
    named = [(repo.name_of(p.left.target), repo.name_of(p.right.target), p) for p in repo.alignments]
    oracle = iso_classes(subset_merges(list(repo.ontologies), repo.ontologies, named))
    assert len(c) == len(oracle) <= 7
    for m in c.members.values():
        assert sum(brute_isomorphic(m, o) for o in oracle) == 1
    assert sorted(c.layer.values()) == [1, 1, 1, 2, 2, 2, 3]


def test_provenance_trees():
    c = compute_closure(fx.person_repository())
    assert provenance_of(c, "PS") == {"member": "PS", "key": provenance_of(c, "PS")["key"], "layer": 1}
    tree = provenance_of(c, canonical_form(fx.M))
    assert sorted(tree_leaves(tree)) == ["PE", "PS"]
    c3 = compute_closure(fx.three_generator_repository())
    top = max(c3.members, key=lambda k: c3.layer[k])
    assert c3.layer[top] == 3
    assert sorted(tree_leaves(provenance_of(c3, top))) == ["A", "B", "C"]
    with pytest.raises(UnknownKey):
        provenance_of(c, "nothing")


def test_layers_obey_recursion():
    for seed in range(10):
        c = compute_closure(fx.random_views_repository(random.Random(seed)))
        for k in c.members:
            if k in c.repository_keys:
                assert c.layer[k] == 1
                continue
            sums = [c.layer[e.left] + c.layer[e.right] for e in c.provenance if e.result == k]
            assert c.layer[k] == min(sums)


def test_minimality():
    for repo in (fx.person_repository(), fx.three_generator_repository(),
                 *(fx.random_views_repository(random.Random(s)) for s in range(10))):
        c = compute_closure(repo)
        assert non_minimal_members(c) == []
        assert c.is_closed()


def test_determinism_under_reversed_worklist():
    for repo in (fx.three_generator_repository(),
                 *(fx.random_views_repository(random.Random(s)) for s in range(10))):
        a, b = compute_closure(repo), compute_closure(repo, reverse=True)
        assert list(a.members) == list(b.members)
        assert a.layer == b.layer
        assert a.names == b.names


@pytest.mark.parametrize("limits,which", [
    (Limits(max_members=4), "max_members"),
    (Limits(max_element_size=7), "max_element_size"),
    (Limits(max_rounds=1), "max_rounds"),
])
def test_limits_carry_partial_result(limits, which):
    with pytest.raises(LimitExceeded) as exc:
        compute_closure(fx.three_generator_repository(), limits)
    assert exc.value.which == which
    assert not exc.value.partial.complete
    assert 3 <= len(exc.value.partial) < 7


def test_limits_from_env(monkeypatch):
    monkeypatch.delenv("ONTOMERGE_LIMITS", raising=False)
    assert Limits.from_env() == Limits(10_000, 512, 64)
    monkeypatch.setenv("ONTOMERGE_LIMITS", "max_members=5, max_rounds=2")
    assert Limits.from_env() == Limits(5, 512, 2)
    monkeypatch.setenv("ONTOMERGE_LIMITS", json.dumps({"max_element_size": 9}))
    assert Limits.from_env() == Limits(10_000, 9, 64)


def test_initial_alignments_option():
    repo = Repository({"PS": fx.PS, "PE": fx.PE})
    assert len(compute_closure(repo)) == 2
    c = compute_closure(repo, initial_alignments=True)
    assert canonical_form(coproduct(fx.PS, fx.PE).merged) in c.members


def test_repository_validation():
    with pytest.raises(ValueError):
        Repository({})
    with pytest.raises(ValueError):
        Repository({"PS": fx.PS}, [fx.person_alignment()])


def test_isomorphic_members_collapse():
    ren = fx.PS.renamed({"c1": "p", "c2": "s"}, {"e1": "i"})
    c = compute_closure(Repository({"PS": fx.PS, "again": ren, "PE": fx.PE}, [fx.person_alignment()]))
    assert len(c) == 3
    assert canonical_form(ren) in c.repository_keys


def test_unaligned_member_stays_alone():
    c = compute_closure(fx.person_repository(with_q=True))
    s = c.system()
    assert [x for x in s.carrier if s.aligns("Q", x)] == ["Q"]
    assert len(c) == 4


def test_key_lookup():
    c = compute_closure(fx.person_repository())
    k = canonical_form(fx.M)
    assert c.key_of(c.names[k]) == k == c.key_of(k)
    from ontomerge.canonical import short_key
    assert c.key_of(short_key(k)) == k
