"""Write the Person fixtures to a directory as a manifest plus documents."""
import json

from ontomerge import fixtures as fx
from ontomerge import io


def write_person(tmp, with_q=False, limits=None):
    (tmp / "PS.json").write_text(io.serialize_ontology(fx.PS))
    (tmp / "PE.json").write_text(io.serialize_ontology(fx.PE))
    (tmp / "align.json").write_text(io.dumps(io.alignment_to_dict("PS", "PE", fx.person_alignment())))
    onts = {"PS": "PS.json", "PE": "PE.json"}
    if with_q:
        (tmp / "Q.json").write_text(io.serialize_ontology(fx.Q))
        onts["Q"] = "Q.json"
    doc = {"ontologies": onts, "alignments": ["align.json"]}
    if limits:
        doc["limits"] = limits
    (tmp / "manifest.json").write_text(json.dumps(doc))
    return tmp / "manifest.json"
