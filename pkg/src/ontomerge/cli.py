"""Command-line front end.

Exit codes: 0 success, 1 usage, 2 parse, validation or precondition error, 3 a property
check found a violation, 4 a closure or search limit was hit.
"""
from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import io
from .canonical import canonical_form, find_isomorphism, short_key
from .category import pushout
from .closure import ClosureResult, Limits, LimitExceeded, UnknownKey, compute_closure, provenance_of
from .homsearch import BudgetExceeded, find_homomorphisms
from .ontology import InvalidHomomorphism, OntologyError, ValidationError
from .poset import build_poset, poset_query
from .properties import (
    PROPERTIES,
    PreconditionFailed,
    check_property,
    check_order_theorem,
    implication_violations,
    null_extension_associative,
    random_table_system,
    verify_report,
)

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_VIOLATION, EXIT_LIMIT = 0, 1, 2, 3, 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


class _Usage(Exception):
    pass


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _closure(args) -> tuple[io.Manifest, ClosureResult]:
    manifest = io.parse_manifest(args.manifest, Limits.from_env())
    return manifest, compute_closure(manifest.load(), manifest.limits)


def _closure_doc(c: ClosureResult) -> dict:
    return {
        "members": [{"name": c.names[k], "key": short_key(k), "layer": c.layer[k],
                     "repository": k in c.repository_keys} for k in c.members],
        "provenance": [{"left": c.names[e.left], "right": c.names[e.right], "result": c.names[e.result]}
                       for e in c.provenance],
        "rounds": c.rounds,
    }


def cmd_validate(args) -> int:
    for p in args.files:
        o = io.parse_ontology(p)
        print(f"ok {p}: {len(o.concepts)} concepts, {len(o.relations)} relations")
    return EXIT_OK


def cmd_merge(args) -> int:
    apath = Path(args.alignment)
    if args.manifest:
        manifest = io.parse_manifest(args.manifest)
        table = {n: io.parse_ontology(p) for n, p in manifest.ontologies.items()}

        def resolver(name):
            return table[name]
    else:
        def resolver(name):
            for cand in (apath.parent / name, apath.parent / f"{name}.json", Path(name)):
                if cand.is_file():
                    return io.parse_ontology(cand)
            raise KeyError(name)
    _, _, pair = io.parse_alignment(apath, resolver)
    po = pushout(pair)
    _emit(io.dumps(io.pushout_to_dict(po)), Path(args.output) if args.output else None)
    if args.dot:
        Path(args.dot).write_text(io.ontology_to_dot(po.merged, "merged"), encoding="utf-8")
    return EXIT_OK


def cmd_closure(args) -> int:
    manifest, c = _closure(args)
    out = Path(args.output) if args.output else manifest.output
    doc = _closure_doc(c)
    if out is not None:
        for k, o in c.members.items():
            _emit(io.serialize_ontology(o), out / "members" / f"{c.names[k]}.json")
        for m in doc["members"]:
            m["file"] = f"members/{m['name']}.json"
        _emit(io.dumps(doc), out / "closure.json")
    else:
        _emit(io.dumps(doc), None)
    return EXIT_OK


def _poset_doc(p, c: ClosureResult) -> dict:
    n = c.names
    return {
        "elements": [n[k] for k in p.elements],
        "classes": [[n[k] for k in cl] for cl in p.classes],
        "leq": [[n[a], n[b]] for i, a in enumerate(p.elements) for j, b in enumerate(p.elements)
                if p.leq[i, j] and i != j],
        "hasse": [[n[a], n[b]] for a, b in p.hasse],
    }


def cmd_order(args) -> int:
    manifest, c = _closure(args)
    p = build_poset(c, args.budget)
    out = Path(args.output) if args.output else manifest.output
    if out is not None:
        _emit(io.dumps(_poset_doc(p, c)), out / "poset.json")
        _emit(io.hasse_to_dot(p, c.names), out / "hasse.dot")
    else:
        _emit(io.dumps(_poset_doc(p, c)), None)
    return EXIT_OK


def cmd_query(args) -> int:
    _, c = _closure(args)
    p = build_poset(c, args.budget)
    if args.above is not None:
        keys = poset_query(p, "above", c.key_of(args.above))
    elif args.below is not None:
        keys = poset_query(p, "below", c.key_of(args.below))
    else:
        keys = poset_query(p, args.which)
    for k in keys:
        print(c.names[k])
    return EXIT_OK


def _audit(seed: int, samples: int) -> int:
    rng = random.Random(seed)
    bad = 0
    for i in range(samples):
        s = random_table_system(rng)
        rep = verify_report(s)
        problems = list(rep.violations)
        if rep.holds("SA") and not null_extension_associative(s).holds:
            problems.append("SA holds but the null extension is not associative")
        for v in problems:
            bad += 1
            print(f"sample {i}: {v}", file=sys.stderr)
    print(io.dumps({"seed": seed, "samples": samples, "implication_violations": bad}), end="")
    return EXIT_VIOLATION if bad else EXIT_OK


def cmd_check(args) -> int:
    if args.seed is not None:
        return _audit(args.seed, args.samples)
    if args.manifest is None:
        raise _Usage("check needs a manifest unless --seed is given")
    _, c = _closure(args)
    system = c.system()
    props = [args.property] if args.property else ["I", "C", "A", "CA", "SA", "R"]
    order = None
    if args.property in ("LU", "CPl", "CPr", "CP") or args.theorem:
        p = build_poset(c, args.budget)
        idx = {c.names[k]: i for i, k in enumerate(p.elements)}
        order = lambda a, b: bool(p.leq[idx[a], idx[b]])
    reports = [check_property(system, prop, order) for prop in props]
    doc = {"reports": [{"property": r.property, "holds": r.holds,
                        "counterexample": list(r.counterexample) if r.counterexample else None,
                        "detail": r.detail} for r in reports]}
    failed = [r for r in reports if not r.holds]
    if args.theorem:
        t = check_order_theorem(system, order)
        doc["order_theorem"] = {"holds": t.holds, "lhs": t.lhs, "rhs": t.rhs, "diagnosis": t.diagnosis}
        if not t.holds:
            failed.append(t)
    if not args.property:
        doc["implication_violations"] = implication_violations({r.property: r for r in reports})
    _emit(io.dumps(doc), Path(args.output) if args.output else None)
    for r in reports:
        if not r.holds:
            print(r.line(), file=sys.stderr)
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_hom(args) -> int:
    src, dst = io.parse_ontology(args.source), io.parse_ontology(args.target)
    mode = "count" if args.count else "all" if args.all else "first"
    res = find_homomorphisms(src, dst, mode, args.budget)
    if mode == "count":
        print(res)
    else:
        print(io.dumps([io.hom_to_dict(h) for h in res]), end="")
    return EXIT_OK


def cmd_iso(args) -> int:
    a, b = io.parse_ontology(args.a), io.parse_ontology(args.b)
    h = find_isomorphism(a, b)
    print(io.dumps({"isomorphic": h is not None,
                    "key_a": short_key(canonical_form(a)), "key_b": short_key(canonical_form(b)),
                    "map": io.hom_to_dict(h) if h else None}), end="")
    return EXIT_OK


def cmd_provenance(args) -> int:
    _, c = _closure(args)
    print(io.dumps(provenance_of(c, args.key)), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="ontomerge", description="Merge ontologies along alignments.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check ontology files")
    p.add_argument("files", nargs="+")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("merge", help="pushout of one alignment")
    p.add_argument("alignment")
    p.add_argument("--manifest", help="resolve operand names through this manifest")
    p.add_argument("-o", "--output")
    p.add_argument("--dot", help="also write the merged ontology as DOT")
    p.set_defaults(fn=cmd_merge)

    for name, fn, text in (("closure", cmd_closure, "merging closure of a repository"),
                           ("order", cmd_order, "merging order and Hasse diagram")):
        p = sub.add_parser(name, help=text)
        p.add_argument("manifest")
        p.add_argument("-o", "--output", help="output directory")
        p.add_argument("--budget", type=int, default=None)
        p.set_defaults(fn=fn)

    p = sub.add_parser("query", help="maximal, minimal, sorted, up- or down-set")
    p.add_argument("manifest")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--maximal", dest="which", action="store_const", const="maximal")
    g.add_argument("--minimal", dest="which", action="store_const", const="minimal")
    g.add_argument("--sort", dest="which", action="store_const", const="sort")
    g.add_argument("--above", metavar="KEY")
    g.add_argument("--below", metavar="KEY")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("check", help="verify merging properties")
    p.add_argument("manifest", nargs="?")
    p.add_argument("--property", choices=PROPERTIES)
    p.add_argument("--theorem", action="store_true", help="also check the order theorem")
    p.add_argument("--seed", type=int, help="audit the checker on random finite systems instead")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("hom", help="homomorphisms between two ontologies")
    p.add_argument("source")
    p.add_argument("target")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--count", action="store_true")
    g.add_argument("--all", action="store_true")
    p.add_argument("--budget", type=int, default=None)
    p.set_defaults(fn=cmd_hom)

    p = sub.add_parser("iso", help="are two ontologies isomorphic")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=cmd_iso)

    p = sub.add_parser("provenance", help="merge tree of a closure member")
    p.add_argument("manifest")
    p.add_argument("key", help="member name or short key")
    p.set_defaults(fn=cmd_provenance)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except _Usage as exc:
        print(f"ontomerge: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValidationError, InvalidHomomorphism, OSError) as exc:
        print(f"ontomerge: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except LimitExceeded as exc:
        print(f"ontomerge: {exc} ({len(exc.partial)} members so far)", file=sys.stderr)
        return EXIT_LIMIT
    except BudgetExceeded as exc:
        print(f"ontomerge: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except PreconditionFailed as exc:
        print(f"ontomerge: precondition failed: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UnknownKey as exc:
        print(f"ontomerge: unknown member {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OntologyError as exc:
        print(f"ontomerge: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
