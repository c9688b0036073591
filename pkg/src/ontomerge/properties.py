"""Exhaustive certification of merging-system properties on finite carriers.

Closed systems are checked through their merge table by the kernels in
:mod:`ontomerge._kernels`; open systems (whose merges may leave the carrier)
go through a plain Python scan that evaluates merges directly.  Both scan in
the same lexicographic order, so they report the same first counterexample.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .algebra import (
    UNDEFINED,
    MergingSystem,
    TableSystem,
    natural_leq,
    natural_order_matrix,
    null_extend,
    order_matrix,
)

PROPERTIES = ("I", "C", "A", "CA", "SA", "Rl", "Rr", "R", "LU", "CPl", "CPr", "CP")
ORDER_PROPERTIES = ("LU", "CPl", "CPr", "CP")
MAX_DEFAULT_CARRIER = 200


class OrderRequired(ValueError):
    pass


class CarrierTooLarge(ValueError):
    pass


class PreconditionFailed(ValueError):
    pass


@dataclass(frozen=True)
class PropertyReport:
    property: str
    holds: bool
    counterexample: tuple | None = None
    detail: str = ""

    def __post_init__(self):
        if self.holds != (self.counterexample is None):
            raise ValueError("counterexample must be present exactly when the property fails")

    def line(self) -> str:
        if self.holds:
            return f"{self.property}: holds"
        return f"{self.property}: FAILS at {self.counterexample}: {self.detail}"


def _m(system, a, b):
    return system.merge(a, b) if a is not UNDEFINED and b is not UNDEFINED else UNDEFINED


def _m2(system, a, b, c, left_first):
    if left_first:
        return _m(system, _m(system, a, b), c)
    return _m(system, a, _m(system, b, c))


# ------------------------------------------------------------------ generic scans

def _generic(system: MergingSystem, prop: str, leq):
    E = list(system.carrier)
    if prop == "I":
        for o in E:
            if not system.aligns(o, o) or system.merge(o, o) != o:
                return (o,), f"{o!r} ⋎ {o!r} = {_m(system, o, o)!r}"
    elif prop == "C":
        for a in E:
            for b in E:
                if system.merge(a, b) != system.merge(b, a):
                    return (a, b), f"{a!r} ⋎ {b!r} = {system.merge(a, b)!r} but reversed gives {system.merge(b, a)!r}"
    elif prop in ("A", "CA", "SA"):
        for a in E:
            for b in E:
                ab = system.merge(a, b)
                for c in E:
                    bc = system.merge(b, c)
                    left = _m(system, ab, c)
                    right = _m(system, a, bc)
                    if prop == "A":
                        bad = left is not UNDEFINED and right is not UNDEFINED and left != right
                    elif prop == "CA":
                        bad = (ab is not UNDEFINED and bc is not UNDEFINED
                               and (left is UNDEFINED or right is UNDEFINED or left != right))
                    else:
                        bad = left != right
                    if bad:
                        return (a, b, c), f"(a⋎b)⋎c = {left!r}, a⋎(b⋎c) = {right!r}"
    elif prop in ("Rl", "Rr"):
        for a in E:
            for b in E:
                m = system.merge(a, b)
                if m is UNDEFINED:
                    continue
                for o in E:
                    if prop == "Rl" and system.aligns(o, a) and not system.aligns(o, m):
                        return (a, b, o), f"{o!r} aligns with {a!r} but not with {a!r} ⋎ {b!r}"
                    if prop == "Rr" and system.aligns(a, o) and not system.aligns(m, o):
                        return (a, b, o), f"{a!r} aligns with {o!r} but {a!r} ⋎ {b!r} does not"
    elif prop == "LU":
        for a in E:
            for b in E:
                m = system.merge(a, b)
                if m is UNDEFINED:
                    continue
                if not (leq(a, m) and leq(b, m)):
                    return (a, b, m), "merge is not an upper bound"
                for c in E:
                    if leq(a, c) and leq(b, c) and not leq(m, c):
                        return (a, b, c), "merge is not below this upper bound"
    elif prop in ("CPl", "CPr"):
        for a in E:
            for b in E:
                if not leq(a, b):
                    continue
                for o in E:
                    x, y = (system.merge(o, a), system.merge(o, b)) if prop == "CPl" else \
                        (system.merge(a, o), system.merge(b, o))
                    if x is UNDEFINED:
                        continue
                    if y is UNDEFINED or not leq(x, y):
                        return (a, b, o), f"{a!r} ≤ {b!r} but merging with {o!r} gives {x!r}, {y!r}"
    return None


# ------------------------------------------------------------------ table scans

_KERNEL_OF = {"I": "idempotent", "C": "commutative", "A": "assoc_a", "CA": "assoc_ca",
              "SA": "assoc_sa", "Rl": "repr_left", "Rr": "repr_right", "LU": "lub",
              "CPl": "compat_left", "CPr": "compat_right"}
_ARITY = {"I": 1, "C": 2, "A": 3, "CA": 3, "SA": 3, "Rl": 3, "Rr": 3, "LU": 3, "CPl": 3, "CPr": 3}


def _table_scan(system, prop, P, backend):
    T = system.table()
    res = _kernels.run(_KERNEL_OF[prop], T, P if prop in ORDER_PROPERTIES else None, backend)
    if not res[0]:
        return None
    E = list(system.carrier)
    idx = [int(v) for v in res[1:1 + _ARITY[prop]]]
    elems = tuple(E[i] for i in idx)
    if prop == "LU":
        detail = "merge is not an upper bound" if res[4] == 1 else "merge is not below this upper bound"
        return elems, detail
    # reuse the generic wording by re-deriving it for this one tuple
    return elems, _describe(system, prop, elems)


def _describe(system, prop, t):
    if prop == "I":
        return f"{t[0]!r} ⋎ {t[0]!r} = {_m(system, t[0], t[0])!r}"
    if prop == "C":
        a, b = t
        return f"{a!r} ⋎ {b!r} = {system.merge(a, b)!r} but reversed gives {system.merge(b, a)!r}"
    if prop in ("A", "CA", "SA"):
        a, b, c = t
        return f"(a⋎b)⋎c = {_m2(system, a, b, c, True)!r}, a⋎(b⋎c) = {_m2(system, a, b, c, False)!r}"
    if prop == "Rl":
        a, b, o = t
        return f"{o!r} aligns with {a!r} but not with {a!r} ⋎ {b!r}"
    if prop == "Rr":
        a, b, o = t
        return f"{a!r} aligns with {o!r} but {a!r} ⋎ {b!r} does not"
    a, b, o = t
    return f"{a!r} ≤ {b!r} but merging with {o!r} breaks compatibility"


def _use_table(system) -> bool:
    try:
        system.table()
        return True
    except ValueError:
        return False


def check_property(system: MergingSystem, prop: str, order=None, *, allow_large: bool = False,
                   backend: str | None = None, use_table: bool | None = None) -> PropertyReport:
    """Scan the whole carrier for a violation of ``prop``.

    ``order`` (callable, set of pairs, or boolean matrix over the carrier) is
    required for LU and the CP variants.  ``use_table`` forces or forbids the
    kernel path; by default it is used whenever the system is closed.
    """
    if prop not in PROPERTIES:
        raise ValueError(f"unknown property {prop!r}; expected one of {PROPERTIES}")
    if prop in ORDER_PROPERTIES and order is None:
        raise OrderRequired(f"{prop} needs an order")
    if len(system.carrier) > MAX_DEFAULT_CARRIER and not allow_large:
        raise CarrierTooLarge(f"carrier has {len(system.carrier)} elements; pass allow_large=True")
    if prop in ("R", "CP"):
        parts = ("Rl", "Rr") if prop == "R" else ("CPl", "CPr")
        for p in parts:
            rep = check_property(system, p, order, allow_large=allow_large, backend=backend,
                                 use_table=use_table)
            if not rep.holds:
                return PropertyReport(prop, False, rep.counterexample, f"{p}: {rep.detail}")
        return PropertyReport(prop, True)
    tabled = _use_table(system) if use_table is None else use_table
    if tabled:
        P = order_matrix(system, order) if prop in ORDER_PROPERTIES else None
        found = _table_scan(system, prop, P, backend)
    else:
        leq = _leq_fn(system, order) if prop in ORDER_PROPERTIES else None
        found = _generic(system, prop, leq)
    if found is None:
        return PropertyReport(prop, True)
    return PropertyReport(prop, False, found[0], found[1])


def recheck(system: MergingSystem, report: PropertyReport, order=None) -> bool:
    """Independently confirm a counterexample from ``report``; True if it is genuine."""
    if report.holds:
        return False
    prop = report.property
    t = report.counterexample
    if prop == "R":
        return (_generic_one(system, "Rl", t, order) or _generic_one(system, "Rr", t, order))
    if prop == "CP":
        return (_generic_one(system, "CPl", t, order) or _generic_one(system, "CPr", t, order))
    return _generic_one(system, prop, t, order)


def _leq_fn(system, order):
    """Turn any accepted order form into a predicate on elements."""
    if order is None or callable(order):
        return order
    if isinstance(order, np.ndarray):
        index = {x: i for i, x in enumerate(system.carrier)}
        return lambda a, b: bool(order[index[a], index[b]])
    pairs = set(order)
    return lambda a, b: (a, b) in pairs


def _generic_one(system, prop, t, order):
    leq = _leq_fn(system, order)
    if prop == "I":
        (o,) = t
        return not system.aligns(o, o) or system.merge(o, o) != o
    if prop == "C":
        a, b = t
        return system.merge(a, b) != system.merge(b, a)
    if prop in ("A", "CA", "SA"):
        a, b, c = t
        ab, bc = system.merge(a, b), system.merge(b, c)
        left, right = _m(system, ab, c), _m(system, a, bc)
        if prop == "A":
            return left is not UNDEFINED and right is not UNDEFINED and left != right
        if prop == "CA":
            return ab is not UNDEFINED and bc is not UNDEFINED and (
                left is UNDEFINED or right is UNDEFINED or left != right)
        return left != right
    if prop in ("Rl", "Rr"):
        a, b, o = t
        m = system.merge(a, b)
        if m is UNDEFINED:
            return False
        if prop == "Rl":
            return system.aligns(o, a) and not system.aligns(o, m)
        return system.aligns(a, o) and not system.aligns(m, o)
    if prop == "LU":
        a, b, c = t
        m = system.merge(a, b)
        if m is UNDEFINED:
            return False
        return not (leq(a, m) and leq(b, m)) or (leq(a, c) and leq(b, c) and not leq(m, c))
    if prop in ("CPl", "CPr"):
        a, b, o = t
        if not leq(a, b):
            return False
        x, y = (system.merge(o, a), system.merge(o, b)) if prop == "CPl" else \
            (system.merge(a, o), system.merge(b, o))
        return x is not UNDEFINED and (y is UNDEFINED or not leq(x, y))
    raise ValueError(prop)


@dataclass
class FullReport:
    reports: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)

    def holds(self, prop: str) -> bool:
        return self.reports[prop].holds

    def lines(self) -> list[str]:
        out = [self.reports[p].line() for p in PROPERTIES if p in self.reports]
        out += [f"IMPLICATION VIOLATED: {v}" for v in self.violations]
        return out


def implication_violations(reports: dict) -> list[str]:
    """Audit a report set against the implications that must hold between properties."""
    h = {p: r.holds for p, r in reports.items()}
    out = []
    if h["SA"] and not h["A"]:
        out.append("SA holds but A fails")
    if h["CA"] and not h["A"]:
        out.append("CA holds but A fails")
    if h["C"] and h["CA"] != (h["A"] and h["R"]):
        out.append("under C, CA differs from (A and R)")
    return out


def verify_report(system: MergingSystem, order=None, **kw) -> FullReport:
    """Run every property (the order-based ones only when ``order`` is given)."""
    rep = FullReport()
    for p in PROPERTIES:
        if p in ORDER_PROPERTIES and order is None:
            continue
        rep.reports[p] = check_property(system, p, order, **kw)
    rep.violations = implication_violations(rep.reports)
    return rep


def null_extension_associative(system: MergingSystem, backend: str | None = None) -> PropertyReport:
    """Is the null extension a semigroup (associative on all extended triples)?"""
    ext = null_extend(system)
    if _use_table(system):
        T = ext.table()
        res = _kernels.run("assoc_sa", T, None, backend)
        if not res[0]:
            return PropertyReport("SA", True)
        E = list(ext.carrier)
        t = tuple(E[int(i)] for i in res[1:4])
        return PropertyReport("SA", False, t, "null extension is not associative")
    found = _generic(ext, "SA", None)
    if found is None:
        return PropertyReport("SA", True)
    return PropertyReport("SA", False, found[0], found[1])


@dataclass(frozen=True)
class OrderTheoremResult:
    holds: bool          # the biconditional itself
    lhs: bool            # LU and CP
    rhs: bool            # I, C, A, R and order == natural order
    diagnosis: list

    @property
    def verdict(self) -> bool:
        return self.lhs and self.rhs


def _is_partial_order(P: np.ndarray) -> str | None:
    n = P.shape[0]
    if not P[np.arange(n), np.arange(n)].all():
        return "order is not reflexive"
    if (P & P.T & ~np.eye(n, dtype=bool)).any():
        return "order is not antisymmetric"
    Pi = P.astype(np.int64)
    if ((Pi @ Pi > 0) & ~P).any():
        return "order is not transitive"
    return None


def check_order_theorem(system: MergingSystem, order, **kw) -> OrderTheoremResult:
    """Evaluate both sides of: (LU and CP) iff (I, C, A, R and order is the natural order).

    The system's alignment must be reflexive and symmetric and ``order`` a
    partial order on the carrier; otherwise :class:`PreconditionFailed`.
    """
    E = list(system.carrier)
    for a in E:
        if not system.aligns(a, a):
            raise PreconditionFailed(f"alignment is not reflexive at {a!r}")
        for b in E:
            if system.aligns(a, b) != system.aligns(b, a):
                raise PreconditionFailed(f"alignment is not symmetric at ({a!r}, {b!r})")
    P = order_matrix(system, order)
    problem = _is_partial_order(P)
    if problem:
        raise PreconditionFailed(problem)
    diagnosis = []
    reps = {p: check_property(system, p, P, **kw) for p in ("LU", "CP", "I", "C", "A", "R")}
    for r in reps.values():
        if not r.holds:
            diagnosis.append(r.line())
    if _use_table(system):
        N = natural_order_matrix(system)
    else:
        N = np.array([[natural_leq(system, a, b) for b in E] for a in E], dtype=bool).reshape(P.shape)
    same = bool((N == P).all())
    if not same:
        i, j = np.argwhere(N != P)[0]
        diagnosis.append(f"order differs from the natural order at ({E[i]!r}, {E[j]!r}): "
                         f"order says {bool(P[i, j])}, natural order says {bool(N[i, j])}")
    lhs = reps["LU"].holds and reps["CP"].holds
    rhs = all(reps[p].holds for p in ("I", "C", "A", "R")) and same
    return OrderTheoremResult(lhs == rhs, lhs, rhs, diagnosis)


def random_table_system(rng: random.Random, size: int | None = None,
                        density: float | None = None) -> TableSystem:
    """A random finite system for auditing the checker itself (no claim about ontologies)."""
    n = size if size is not None else rng.randint(3, 8)
    p = density if density is not None else rng.random()
    T = np.full((n, n), -1, dtype=np.int64)
    for i in range(n):
        for j in range(n):
            if rng.random() < p:
                T[i, j] = rng.randrange(n)
    return TableSystem(list(range(n)), T)
