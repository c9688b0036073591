import itertools
import random

import numpy as np
import pytest

from ontomerge import _kernels
from ontomerge import fixtures as fx
from ontomerge.algebra import TableSystem, natural_order_matrix
from ontomerge.closure import compute_closure
from ontomerge.properties import (
    PROPERTIES,
    CarrierTooLarge,
    OrderRequired,
    PreconditionFailed,
    PropertyReport,
    check_order_theorem,
    check_property,
    implication_violations,
    null_extension_associative,
    random_table_system,
    recheck,
    verify_report,
)

SIX = ("I", "C", "A", "CA", "SA", "R")


def semilattice(rng, universe=4, seeds=3):
    """Random union-closed family of subsets with union as the merge."""
    start = [frozenset(rng.sample(range(universe), rng.randint(0, universe))) for _ in range(seeds)]
    elems = sorted(set(start), key=sorted)
    grew = True
    while grew:
        grew = False
        for a, b in itertools.product(list(elems), repeat=2):
            if a | b not in elems:
                elems.append(a | b)
                grew = True
    idx = {e: i for i, e in enumerate(elems)}
    T = np.array([[idx[a | b] for b in elems] for a in elems], dtype=np.int64)
    return TableSystem(list(range(len(elems))), T)


def test_disjoint_union_fails_idempotence_only():
    du = fx.disjoint_union_fixture()
    rep = check_property(du, "I")
    assert not rep.holds
    (o,) = rep.counterexample
    assert du.merge(o, o) != o and recheck(du, rep)
    for p in ("C", "A", "CA", "SA", "R"):
        assert check_property(du, p).holds, p


@pytest.mark.parametrize("make", [fx.graph_overlap_fixture, fx.keyed_table_fixture])
def test_union_like_fixtures_satisfy_everything(make):
    s = make()
    assert s.is_closed()
    nat = natural_order_matrix(s)
    for p in PROPERTIES:
        assert check_property(s, p, nat).holds, p
    t = check_order_theorem(s, nat)
    assert t.holds and t.lhs and t.rhs


def test_person_closure_satisfies_six():
    s = compute_closure(fx.person_repository(with_q=True)).system()
    for p in SIX:
        assert check_property(s, p).holds, p


def test_report_invariant():
    with pytest.raises(ValueError):
        PropertyReport("I", True, ("x",))
    with pytest.raises(ValueError):
        PropertyReport("I", False)


def test_order_required_and_size_guard():
    s = fx.keyed_table_fixture()
    with pytest.raises(OrderRequired):
        check_property(s, "LU")
    with pytest.raises(ValueError):
        check_property(s, "Z")
    big = TableSystem(list(range(201)), np.full((201, 201), -1, dtype=np.int64))
    with pytest.raises(CarrierTooLarge):
        check_property(big, "C")
    assert check_property(big, "C", allow_large=True).holds


def test_implications_on_fixtures():
    for s in (fx.graph_overlap_fixture(), fx.keyed_table_fixture(), fx.disjoint_union_fixture()):
        rep = verify_report(s)
        assert not rep.violations
        if rep.holds("SA"):
            assert rep.holds("A")
        if rep.holds("C") and rep.holds("CA"):
            assert rep.holds("A") and rep.holds("R")


def test_random_systems_never_violate_implications():
    rng = random.Random(21)
    for _ in range(300):
        s = random_table_system(rng)
        rep = verify_report(s)
        assert not rep.violations, rep.lines()


def test_implication_audit_flags_inconsistent_reports():
    fake = {p: PropertyReport(p, True) for p in SIX}
    fake["A"] = PropertyReport("A", False, (0, 0, 0), "forced")
    assert len(implication_violations(fake)) == 3


def test_null_extension_associative_when_sa():
    rng = random.Random(22)
    seen = 0
    for i in range(300):
        s = semilattice(rng) if i % 2 else random_table_system(rng)
        if check_property(s, "SA").holds:
            seen += 1
            assert null_extension_associative(s).holds
        else:
            assert not null_extension_associative(s).holds
    assert seen > 50


def _random_order(rng, n):
    P = np.eye(n, dtype=bool) | (rng.random((n, n)) < 0.3)
    return P


@pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba missing")
def test_backends_and_generic_scan_agree():
    rng = random.Random(23)
    nrng = np.random.default_rng(23)
    for _ in range(200):
        s = random_table_system(rng)
        P = _random_order(nrng, len(s.carrier))
        for p in PROPERTIES:
            a = check_property(s, p, P, backend="numba")
            b = check_property(s, p, P, backend="numpy")
            c = check_property(s, p, P, use_table=False)
            assert (a.holds, a.counterexample) == (b.holds, b.counterexample) == (c.holds, c.counterexample), p


def test_every_counterexample_rechecks():
    rng = random.Random(24)
    nrng = np.random.default_rng(24)
    for _ in range(200):
        s = random_table_system(rng)
        P = _random_order(nrng, len(s.carrier))
        for p in PROPERTIES:
            rep = check_property(s, p, P)
            if not rep.holds:
                assert recheck(s, rep, P), (p, rep)


def test_env_flag_selects_numpy(monkeypatch):
    monkeypatch.setenv("ONTOMERGE_DISABLE_NUMBA", "1")
    assert not _kernels.numba_enabled()
    assert _kernels.get_kernel("assoc_a") is _kernels.np_assoc_a
    monkeypatch.delenv("ONTOMERGE_DISABLE_NUMBA")
    assert _kernels.numba_enabled() == _kernels.HAVE_NUMBA
    with pytest.raises(ValueError):
        _kernels.get_kernel("assoc_a", "fortran")


def test_discrete_order_breaks_lub():
    s = fx.keyed_table_fixture()
    n = len(s.carrier)
    t = check_order_theorem(s, np.eye(n, dtype=bool))
    assert t.holds and not t.lhs and not t.rhs
    assert not check_property(s, "LU", np.eye(n, dtype=bool)).holds
    assert any("natural order" in d for d in t.diagnosis)


def test_order_theorem_preconditions():
    # alignment not reflexive
    s = TableSystem([0, 1], np.array([[-1, 1], [1, 1]]))
    with pytest.raises(PreconditionFailed, match="reflexive"):
        check_order_theorem(s, np.eye(2, dtype=bool))
    s = TableSystem([0, 1], np.array([[0, 1], [-1, 1]]))
    with pytest.raises(PreconditionFailed, match="symmetric"):
        check_order_theorem(s, np.eye(2, dtype=bool))
    s = TableSystem([0, 1], np.array([[0, 1], [1, 1]]))
    with pytest.raises(PreconditionFailed, match="antisymmetric"):
        check_order_theorem(s, np.ones((2, 2), dtype=bool))
    s3 = TableSystem([0, 1, 2], np.array([[0, 1, 2], [1, 1, 2], [2, 2, 2]]))
    bad = np.eye(3, dtype=bool)
    bad[0, 1] = bad[1, 2] = True
    with pytest.raises(PreconditionFailed, match="transitive"):
        check_order_theorem(s3, bad)


def test_order_theorem_on_semilattices():
    rng = random.Random(25)
    for _ in range(100):
        s = semilattice(rng)
        nat = natural_order_matrix(s)
        t = check_order_theorem(s, nat)
        assert t.holds and t.verdict
