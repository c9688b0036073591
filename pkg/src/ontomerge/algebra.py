"""Abstract merging systems, the undefined value and the natural order."""
from __future__ import annotations

import abc
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np


class _Undefined:
    """The value of a merge between elements that do not align."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "↑"

    def __reduce__(self):
        return (_Undefined, ())


UNDEFINED = _Undefined()


def is_defined(value) -> bool:
    return value is not UNDEFINED


class UnknownElement(KeyError):
    pass


class MergingSystem(abc.ABC):
    """A finite carrier with an alignment predicate and a partial merge.

    ``merge(a, b)`` must return an element exactly when ``aligns(a, b)``
    holds and :data:`UNDEFINED` otherwise.  Subclasses decide what element
    equality means by the ids they hand out.

    A system is *closed* when every defined merge of carrier elements lands
    back in the carrier.  Open systems (the disjoint-union fixture) may return
    elements outside the carrier; those still must be accepted by
    :meth:`aligns` and :meth:`merge`.
    """

    @property
    @abc.abstractmethod
    def carrier(self) -> Sequence[Hashable]:
        ...

    @abc.abstractmethod
    def aligns(self, a, b) -> bool:
        ...

    @abc.abstractmethod
    def merge(self, a, b):
        ...

    def contains(self, x) -> bool:
        return x in self._carrier_set()

    def _carrier_set(self):
        cached = getattr(self, "_cset", None)
        if cached is None:
            cached = frozenset(self.carrier)
            self._cset = cached
        return cached

    def is_closed(self) -> bool:
        cs = self._carrier_set()
        for a in self.carrier:
            for b in self.carrier:
                m = self.merge(a, b)
                if m is not UNDEFINED and m not in cs:
                    return False
        return True

    def table(self) -> np.ndarray:
        """Merge table over carrier indices, -1 for undefined.

        Raises ``ValueError`` if the system is not closed.
        """
        cached = getattr(self, "_table", None)
        if cached is not None:
            return cached
        index = {x: i for i, x in enumerate(self.carrier)}
        n = len(index)
        t = np.full((n, n), -1, dtype=np.int64)
        for a, i in index.items():
            for b, j in index.items():
                m = self.merge(a, b)
                if m is UNDEFINED:
                    continue
                if m not in index:
                    raise ValueError(f"merge of {a!r} and {b!r} leaves the carrier")
                t[i, j] = index[m]
        self._table = t
        return t


class TableSystem(MergingSystem):
    """A merging system given by an explicit merge table."""

    def __init__(self, elements: Sequence[Hashable], table: Mapping | np.ndarray):
        self._elements = tuple(elements)
        index = {x: i for i, x in enumerate(self._elements)}
        n = len(self._elements)
        if isinstance(table, np.ndarray):
            t = np.asarray(table, dtype=np.int64)
            if t.shape != (n, n) or (t >= n).any() or (t < -1).any():
                raise ValueError("table must be n x n with entries in [-1, n)")
        else:
            t = np.full((n, n), -1, dtype=np.int64)
            for (a, b), m in table.items():
                if m is not UNDEFINED:
                    t[index[a], index[b]] = index[m]
        self._t = t
        self._table = t
        self._index = index

    @property
    def carrier(self):
        return self._elements

    def aligns(self, a, b):
        return bool(self._t[self._index[a], self._index[b]] >= 0)

    def merge(self, a, b):
        m = self._t[self._index[a], self._index[b]]
        return UNDEFINED if m < 0 else self._elements[m]


class NullExtendedSystem(MergingSystem):
    """The total system obtained by adjoining an absorbing :data:`UNDEFINED`."""

    def __init__(self, base: MergingSystem):
        self.base = base

    @property
    def carrier(self):
        return tuple(self.base.carrier) + (UNDEFINED,)

    def contains(self, x):
        return x is UNDEFINED or self.base.contains(x)

    def aligns(self, a, b):
        if a is UNDEFINED or b is UNDEFINED:
            return a is UNDEFINED and b is UNDEFINED
        return self.base.aligns(a, b)

    def merge(self, a, b):
        # total: the undefined value is just another element here
        if a is UNDEFINED or b is UNDEFINED:
            return UNDEFINED
        return self.base.merge(a, b)

    def table(self) -> np.ndarray:
        t = self.base.table()
        n = t.shape[0]
        ext = np.full((n + 1, n + 1), n, dtype=np.int64)
        ext[:n, :n] = np.where(t < 0, n, t)
        return ext


def evaluate_merge(system: MergingSystem, a, b):
    """``a ⋎ b`` or :data:`UNDEFINED`; unknown operands raise :class:`UnknownElement`."""
    for x in (a, b):
        if not system.contains(x):
            raise UnknownElement(x)
    return system.merge(a, b)


def null_extend(system: MergingSystem) -> NullExtendedSystem:
    return NullExtendedSystem(system)


def natural_leq(system: MergingSystem, a, b) -> bool:
    """``a ≤ b`` iff both merge orders are defined and give ``b``."""
    for x in (a, b):
        if not system.contains(x):
            raise UnknownElement(x)
    return (system.aligns(a, b) and system.aligns(b, a)
            and system.merge(a, b) == b and system.merge(b, a) == b)


def natural_order_matrix(system: MergingSystem) -> np.ndarray:
    t = system.table()
    n = t.shape[0]
    idx = np.arange(n)
    return (t == idx[None, :]) & (t.T == idx[None, :])


def order_matrix(system: MergingSystem, order) -> np.ndarray:
    """Normalise an order (callable, set of pairs, or boolean matrix) to a matrix."""
    elems = list(system.carrier)
    n = len(elems)
    if isinstance(order, np.ndarray):
        m = np.asarray(order, dtype=bool)
        if m.shape != (n, n):
            raise ValueError("order matrix has the wrong shape")
        return m
    if callable(order):
        return np.array([[bool(order(a, b)) for b in elems] for a in elems], dtype=bool).reshape(n, n)
    pairs = set(order)
    return np.array([[(a, b) in pairs for b in elems] for a in elems], dtype=bool).reshape(n, n)


def pairs_of(system: MergingSystem, matrix: np.ndarray) -> set:
    elems = list(system.carrier)
    return {(elems[i], elems[j]) for i, j in zip(*np.nonzero(matrix))}


def closure_under_merge(seeds: Iterable, merge, limit: int = 10_000) -> list:
    """Every value reachable from ``seeds`` by repeated ``merge`` (order of discovery)."""
    found = list(dict.fromkeys(seeds))
    seen = set(found)
    i = 0
    while i < len(found):
        for j in range(i + 1):
            for a, b in ((found[i], found[j]), (found[j], found[i])):
                m = merge(a, b)
                if m is not UNDEFINED and m not in seen:
                    seen.add(m)
                    found.append(m)
                    if len(found) > limit:
                        raise ValueError("closure exceeded limit")
        i += 1
    return found
