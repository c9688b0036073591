import json

import pytest

from ontomerge import fixtures as fx
from ontomerge import io
from ontomerge.closure import Limits
from ontomerge.ontology import Concept, InvalidHomomorphism, Ontology, ValidationError
from files import write_person


def test_round_trip_is_byte_identical():
    labelled = fx.PS.with_labels({"c1": "a person", "e1": "is a"})
    for o in (fx.PS, fx.M, labelled, Ontology(), Ontology([Concept("x")])):
        text = io.serialize_ontology(o)
        back = io.parse_ontology_text(text)
        assert back == o
        assert io.serialize_ontology(back) == text
        assert text.endswith("\n")


def test_duplicate_id_is_parse_error():
    doc = {"concepts": [{"id": "a"}, {"id": "a"}], "relations": []}
    with pytest.raises(io.ParseError) as exc:
        io.parse_ontology_text(json.dumps(doc), "dup.json")
    assert "duplicate concept id 'a'" in str(exc.value)
    assert isinstance(exc.value, ValidationError)


def test_dangling_relation():
    doc = {"concepts": [{"id": "a"}], "relations": [{"id": "r", "src": "a", "dst": "zz"}]}
    with pytest.raises(io.ParseError, match="dangling dst"):
        io.parse_ontology_text(json.dumps(doc))


def test_bad_json_reports_position():
    with pytest.raises(io.ParseError) as exc:
        io.parse_ontology_text('{\n  "concepts": [\n  oops\n]}', "bad.json")
    assert exc.value.where.startswith("bad.json:3:")


@pytest.mark.parametrize("doc", [[], {"concepts": {}}, {"relations": 3}])
def test_wrong_shapes(doc):
    with pytest.raises(io.ParseError):
        io.parse_ontology_text(json.dumps(doc))


def _resolver(name):
    return {"PS": fx.PS, "PE": fx.PE}[name]


def test_alignment_round_trip(tmp_path):
    p = tmp_path / "a.json"
    p.write_text(io.dumps(io.alignment_to_dict("PS", "PE", fx.person_alignment())))
    left, right, pair = io.parse_alignment(p, _resolver)
    assert (left, right) == ("PS", "PE")
    assert pair.correspondence() == fx.person_alignment().correspondence()


@pytest.mark.parametrize("r2,msg", [
    ({"concepts": {"b": "d2"}}, "tag mismatch"),
    ({"concepts": {}}, "not total"),
])
def test_alignment_bad_leg(tmp_path, r2, msg):
    doc = io.alignment_to_dict("PS", "PE", fx.person_alignment())
    doc["r2"] = r2
    p = tmp_path / "a.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(InvalidHomomorphism, match=msg):
        io.parse_alignment(p, _resolver)


def test_alignment_unknown_operand(tmp_path):
    doc = io.alignment_to_dict("PS", "nobody", fx.person_alignment())
    p = tmp_path / "a.json"
    p.write_text(json.dumps(doc))
    with pytest.raises(io.ParseError, match="unknown ontology 'nobody'"):
        io.parse_alignment(p, _resolver)


def test_base_given_by_path(tmp_path):
    (tmp_path / "base.json").write_text(io.serialize_ontology(fx.PERSON))
    doc = io.alignment_to_dict("PS", "PE", fx.person_alignment())
    doc["base"] = "base.json"
    p = tmp_path / "a.json"
    p.write_text(json.dumps(doc))
    assert io.parse_alignment(p, _resolver)[2].base == fx.PERSON


def test_manifest_load(tmp_path):
    m = io.parse_manifest(write_person(tmp_path, limits={"max_rounds": 7}))
    repo = m.load()
    assert set(repo.ontologies) == {"PS", "PE"} and len(repo.alignments) == 1
    assert m.limits == Limits(max_rounds=7)
    assert m.output is None


def test_manifest_limits_override_env(tmp_path):
    path = write_person(tmp_path, limits={"max_members": 3})
    m = io.parse_manifest(path, Limits(max_members=50, max_rounds=2))
    assert m.limits == Limits(max_members=3, max_rounds=2)


def test_manifest_errors(tmp_path):
    path = write_person(tmp_path)
    (tmp_path / "PE.json").unlink()
    with pytest.raises(io.ParseError, match="missing files"):
        io.parse_manifest(path)
    path.write_text(json.dumps({"ontologies": {}}))
    with pytest.raises(io.ParseError):
        io.parse_manifest(path)
    write_person(tmp_path, limits={"max_nonsense": 1})
    with pytest.raises(io.ParseError):
        io.parse_manifest(path)


def test_dot_output():
    dot = io.ontology_to_dot(fx.PS, "PS")
    assert dot.startswith('digraph "PS" {')
    assert '"c2" -> "c1" [label="isa"];' in dot
    assert dot.count("\n") == 5


def test_hasse_dot():
    from ontomerge.closure import compute_closure
    from ontomerge.poset import build_poset
    c = compute_closure(fx.person_repository())
    dot = io.hasse_to_dot(build_poset(c), c.names)
    assert "rankdir=BT" in dot
    assert '"PS" -> "merge-' in dot and '"PE" -> "merge-' in dot
    assert dot.count("rank=same") == 2
