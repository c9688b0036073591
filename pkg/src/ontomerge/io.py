"""JSON reading and writing, manifests, and DOT export.

Ontology documents::

    {"concepts": [{"id": ..., "tag": ..., "label": ...}, ...],
     "relations": [{"id": ..., "tag": ..., "label": ..., "src": ..., "dst": ...}, ...]}

Alignment documents name their two operands and give both legs::

    {"base": <ontology or path>, "left": name, "right": name,
     "r1": {"concepts": {...}, "relations": {...}}, "r2": {...}}

Output is deterministic: elements sorted by id, fixed key order, two-space
indent, trailing newline.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping

from .category import PushoutResult, VAlignmentPair
from .closure import Limits, Repository
from .ontology import Homomorphism, Ontology, ValidationError, validate


class ParseError(ValidationError):
    """Malformed input; ``where`` names the file and line or field."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__([f"{where}: {message}" if where else message])


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _load_json(text: str, where: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{where}:{exc.lineno}:{exc.colno}") from None


def ontology_to_dict(o: Ontology) -> dict:
    concepts = []
    for c in o.concepts.values():
        d = {"id": c.id}
        if c.tag is not None:
            d["tag"] = c.tag
        if c.label is not None:
            d["label"] = c.label
        concepts.append(d)
    relations = []
    for r in o.relations.values():
        d = {"id": r.id}
        if r.tag is not None:
            d["tag"] = r.tag
        if r.label is not None:
            d["label"] = r.label
        d["src"], d["dst"] = r.src, r.dst
        relations.append(d)
    return {"concepts": concepts, "relations": relations}


def ontology_from_dict(data, where: str = "<ontology>") -> Ontology:
    if not isinstance(data, dict):
        raise ParseError("ontology must be a JSON object", where)
    for kind in ("concepts", "relations"):
        if not isinstance(data.get(kind, []), list):
            raise ParseError(f"{kind!r} must be a list", where)
    try:
        return validate(data)
    except ValidationError as exc:
        raise ParseError("; ".join(exc.violations), where) from None


def serialize_ontology(o: Ontology) -> str:
    return dumps(ontology_to_dict(o))


def parse_ontology_text(text: str, where: str = "<string>") -> Ontology:
    return ontology_from_dict(_load_json(text, where), where)


def parse_ontology(path) -> Ontology:
    path = Path(path)
    return parse_ontology_text(path.read_text(encoding="utf-8"), str(path))


def hom_to_dict(h: Homomorphism) -> dict:
    return {"concepts": dict(sorted(h.concept_map.items())),
            "relations": dict(sorted(h.relation_map.items()))}


def _leg(data, key, where):
    leg = data.get(key)
    if not isinstance(leg, dict):
        raise ParseError(f"missing map {key!r}", where)
    cm, rm = leg.get("concepts", {}), leg.get("relations", {})
    if not isinstance(cm, dict) or not isinstance(rm, dict):
        raise ParseError(f"{key!r} maps must be objects", where)
    return {str(k): str(v) for k, v in cm.items()}, {str(k): str(v) for k, v in rm.items()}


def alignment_from_dict(data, resolver: Callable[[str], Ontology], where: str = "<alignment>",
                        base_dir: Path | None = None) -> tuple[str, str, VAlignmentPair]:
    """Build ``(left name, right name, pair)``; bad maps raise :class:`InvalidHomomorphism`."""
    if not isinstance(data, dict):
        raise ParseError("alignment must be a JSON object", where)
    for k in ("left", "right"):
        if not isinstance(data.get(k), str):
            raise ParseError(f"missing operand name {k!r}", where)
    raw_base = data.get("base", {})
    if isinstance(raw_base, str):
        base = parse_ontology((base_dir or Path(".")) / raw_base)
    else:
        base = ontology_from_dict(raw_base, f"{where}:base")
    left, right = _resolve(resolver, data["left"], where), _resolve(resolver, data["right"], where)
    r1 = Homomorphism(base, left, *_leg(data, "r1", where))
    r2 = Homomorphism(base, right, *_leg(data, "r2", where))
    return data["left"], data["right"], VAlignmentPair(base, r1, r2)


def _resolve(resolver, name, where):
    try:
        return resolver(name)
    except KeyError:
        raise ParseError(f"unknown ontology {name!r}", where) from None


def alignment_to_dict(left: str, right: str, pair: VAlignmentPair) -> dict:
    return {"base": ontology_to_dict(pair.base), "left": left, "right": right,
            "r1": hom_to_dict(pair.left), "r2": hom_to_dict(pair.right)}


def parse_alignment(path, resolver: Callable[[str], Ontology]) -> tuple[str, str, VAlignmentPair]:
    path = Path(path)
    data = _load_json(path.read_text(encoding="utf-8"), str(path))
    return alignment_from_dict(data, resolver, str(path), path.parent)


def pushout_to_dict(po: PushoutResult) -> dict:
    return {"merged": ontology_to_dict(po.merged),
            "inject_left": hom_to_dict(po.inject_left),
            "inject_right": hom_to_dict(po.inject_right)}


@dataclass
class Manifest:
    """``{"ontologies": {name: path}, "alignments": [path], "limits": {...}, "output": dir}``."""
    ontologies: dict[str, Path]
    alignments: list[Path] = field(default_factory=list)
    limits: Limits = field(default_factory=Limits)
    output: Path | None = None

    def load(self) -> Repository:
        onts = {name: parse_ontology(p) for name, p in self.ontologies.items()}

        def resolver(name):
            return onts[name]

        pairs = [parse_alignment(p, resolver)[2] for p in self.alignments]
        return Repository(onts, pairs)


def parse_manifest(path, env_limits: Limits | None = None) -> Manifest:
    path = Path(path)
    where = str(path)
    data = _load_json(path.read_text(encoding="utf-8"), where)
    if not isinstance(data, dict) or not isinstance(data.get("ontologies"), dict) or not data["ontologies"]:
        raise ParseError("manifest needs a non-empty 'ontologies' object", where)
    root = path.parent
    onts = {str(k): root / v for k, v in data["ontologies"].items()}
    aligns = data.get("alignments", [])
    if not isinstance(aligns, list):
        raise ParseError("'alignments' must be a list", where)
    missing = [str(p) for p in list(onts.values()) + [root / a for a in aligns] if not Path(p).is_file()]
    if missing:
        raise ParseError(f"missing files: {', '.join(missing)}", where)
    base = env_limits or Limits()
    raw = data.get("limits", {}) or {}
    try:
        limits = replace(base, **{k: int(v) for k, v in raw.items()})
    except TypeError as exc:
        raise ParseError(str(exc), f"{where}:limits") from None
    out = data.get("output")
    return Manifest(onts, [root / a for a in aligns], limits, root / out if out else None)


# ------------------------------------------------------------------ DOT

def _q(s: str) -> str:
    return '"' + str(s).replace("\\", "\\\\").replace('"', '\\"') + '"'


def _shown(x) -> str:
    for v in (x.label, x.tag, x.id):
        if v is not None:
            return v
    return ""


def ontology_to_dot(o: Ontology, name: str = "ontology") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for c in o.concepts.values():
        lines.append(f"  {_q(c.id)} [label={_q(_shown(c))}];")
    for r in o.relations.values():
        lines.append(f"  {_q(r.src)} -> {_q(r.dst)} [label={_q(_shown(r))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def hasse_to_dot(poset, names: Mapping, name: str = "hasse") -> str:
    """Hasse diagram of a poset, one rank per closure layer, smaller elements lower."""
    lines = [f"digraph {_q(name)} {{", "  rankdir=BT;"]
    by_layer: dict[int, list] = {}
    for c in poset.classes:
        by_layer.setdefault(poset.layer[c[0]], []).append(c)
    for layer in sorted(by_layer):
        ids = []
        for c in by_layer[layer]:
            label = " ~ ".join(names[k] for k in c)
            lines.append(f"  {_q(names[c[0]])} [label={_q(label)}];")
            ids.append(_q(names[c[0]]))
        lines.append(f"  {{ rank=same; {' '.join(ids)} }}")
    for lo, hi in poset.hasse:
        lines.append(f"  {_q(names[lo])} -> {_q(names[hi])};")
    lines.append("}")
    return "\n".join(lines) + "\n"
