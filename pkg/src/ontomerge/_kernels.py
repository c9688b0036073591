"""Exhaustive scans over merge tables.

Every kernel takes a merge table ``T`` (``T[i, j]`` is the index of
``i ⋎ j``, or -1 when undefined) and, for the order-based checks, a boolean
order matrix ``P``.  Each returns an int64 vector whose first entry is 1 when
a violation was found, followed by the indices of the first violating tuple
in lexicographic loop order (and, for LU, a reason code).

Two implementations with identical results: numba-compiled loops that stop at
the first violation, and vectorised numpy.  ``ONTOMERGE_DISABLE_NUMBA=1``
forces the numpy path; so does a missing numba.
"""
from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

KERNELS = ("idempotent", "commutative", "assoc_a", "assoc_ca", "assoc_sa",
           "repr_left", "repr_right", "lub", "compat_left", "compat_right")


def _none(width):
    return np.zeros(width, dtype=np.int64)


def _hit(width, *idx):
    out = np.zeros(width, dtype=np.int64)
    out[0] = 1
    out[1:1 + len(idx)] = idx
    return out


# ---------------------------------------------------------------- numpy path

def np_idempotent(T):
    n = T.shape[0]
    bad = np.nonzero(np.diagonal(T) != np.arange(n))[0]
    return _hit(2, bad[0]) if len(bad) else _none(2)


def np_commutative(T):
    bad = np.argwhere(T != T.T)
    return _hit(3, *bad[0]) if len(bad) else _none(3)


def _sides(T):
    n = T.shape[0]
    ij = T[:, :, None]                       # (i, j, -)
    jk = T[None, :, :]                       # (-, j, k)
    k = np.arange(n)[None, None, :]
    i = np.arange(n)[:, None, None]
    left = np.where(ij >= 0, T[np.maximum(ij, 0), k], -1)
    right = np.where(jk >= 0, T[i, np.maximum(jk, 0)], -1)
    return ij >= 0, jk >= 0, left, right


def np_assoc_a(T):
    _, _, left, right = _sides(T)
    bad = np.argwhere((left >= 0) & (right >= 0) & (left != right))
    return _hit(4, *bad[0]) if len(bad) else _none(4)


def np_assoc_ca(T):
    dij, djk, left, right = _sides(T)
    bad = np.argwhere(dij & djk & ((left < 0) | (right < 0) | (left != right)))
    return _hit(4, *bad[0]) if len(bad) else _none(4)


def np_assoc_sa(T):
    _, _, left, right = _sides(T)
    bad = np.argwhere(left != right)
    return _hit(4, *bad[0]) if len(bad) else _none(4)


def _repr(T, left_side):
    # mask[i, j, o]: i ⋎ j defined, o aligned with i, but not with i ⋎ j
    n = T.shape[0]
    m = np.maximum(T, 0)
    o = np.arange(n)[None, None, :]
    if left_side:
        aligned = (T.T >= 0)[:, None, :]                 # T[o, i] >= 0
        lost = T[o, m[:, :, None]] < 0                   # T[o, i⋎j] < 0
    else:
        aligned = (T >= 0)[:, None, :]                   # T[i, o] >= 0
        lost = T[m[:, :, None], o] < 0                   # T[i⋎j, o] < 0
    bad = np.argwhere((T >= 0)[:, :, None] & aligned & lost)
    return _hit(4, *bad[0]) if len(bad) else _none(4)


def np_repr_left(T):
    return _repr(T, True)


def np_repr_right(T):
    return _repr(T, False)


def np_lub(T, P):
    n = T.shape[0]
    valid = T >= 0
    m = np.maximum(T, 0)
    i = np.arange(n)[:, None]
    j = np.arange(n)[None, :]
    not_ub = valid & ~(P[i, m] & P[j, m])
    not_least = valid[:, :, None] & P[:, None, :] & P[None, :, :] & ~P[m, :]
    pair = np.argwhere(not_ub | not_least.any(axis=2))
    if not len(pair):
        return _none(5)
    a, b = pair[0]
    if not_ub[a, b]:
        return _hit(5, a, b, T[a, b], 1)
    c = np.nonzero(not_least[a, b])[0][0]
    return _hit(5, a, b, c, 2)


def _compat(T, P, left_side):
    n = T.shape[0]
    o = np.arange(n)[None, None, :]
    i = np.arange(n)[:, None, None]
    j = np.arange(n)[None, :, None]
    if left_side:
        a, b = T[o, i], T[o, j]          # o ⋎ O1, o ⋎ O2
    else:
        a, b = T[i, o], T[j, o]          # O1 ⋎ o, O2 ⋎ o
    ok = (b >= 0) & P[np.maximum(a, 0), np.maximum(b, 0)]
    bad = np.argwhere(P[:, :, None] & (a >= 0) & ~ok)
    return _hit(4, *bad[0]) if len(bad) else _none(4)


def np_compat_left(T, P):
    return _compat(T, P, True)


def np_compat_right(T, P):
    return _compat(T, P, False)


# ---------------------------------------------------------------- numba path

if HAVE_NUMBA:

    @njit(cache=False)
    def nb_idempotent(T):
        out = np.zeros(2, dtype=np.int64)
        for i in range(T.shape[0]):
            if T[i, i] != i:
                out[0], out[1] = 1, i
                return out
        return out

    @njit(cache=False)
    def nb_commutative(T):
        out = np.zeros(3, dtype=np.int64)
        n = T.shape[0]
        for i in range(n):
            for j in range(n):
                if T[i, j] != T[j, i]:
                    out[0], out[1], out[2] = 1, i, j
                    return out
        return out

    @njit(cache=False)
    def _assoc(T, mode):
        # mode 0: A, 1: CA, 2: SA
        out = np.zeros(4, dtype=np.int64)
        n = T.shape[0]
        for i in range(n):
            for j in range(n):
                ij = T[i, j]
                for k in range(n):
                    jk = T[j, k]
                    left = T[ij, k] if ij >= 0 else -1
                    right = T[i, jk] if jk >= 0 else -1
                    if mode == 0:
                        bad = left >= 0 and right >= 0 and left != right
                    elif mode == 1:
                        bad = ij >= 0 and jk >= 0 and (left < 0 or right < 0 or left != right)
                    else:
                        bad = left != right
                    if bad:
                        out[0], out[1], out[2], out[3] = 1, i, j, k
                        return out
        return out

    def nb_assoc_a(T):
        return _assoc(T, 0)

    def nb_assoc_ca(T):
        return _assoc(T, 1)

    def nb_assoc_sa(T):
        return _assoc(T, 2)

    @njit(cache=False)
    def _repr_nb(T, left_side):
        out = np.zeros(4, dtype=np.int64)
        n = T.shape[0]
        for i in range(n):
            for j in range(n):
                m = T[i, j]
                if m < 0:
                    continue
                for o in range(n):
                    if left_side:
                        if T[o, i] >= 0 and T[o, m] < 0:
                            out[0], out[1], out[2], out[3] = 1, i, j, o
                            return out
                    else:
                        if T[i, o] >= 0 and T[m, o] < 0:
                            out[0], out[1], out[2], out[3] = 1, i, j, o
                            return out
        return out

    def nb_repr_left(T):
        return _repr_nb(T, True)

    def nb_repr_right(T):
        return _repr_nb(T, False)

    @njit(cache=False)
    def nb_lub(T, P):
        out = np.zeros(5, dtype=np.int64)
        n = T.shape[0]
        for i in range(n):
            for j in range(n):
                m = T[i, j]
                if m < 0:
                    continue
                if not (P[i, m] and P[j, m]):
                    out[0], out[1], out[2], out[3], out[4] = 1, i, j, m, 1
                    return out
                for c in range(n):
                    if P[i, c] and P[j, c] and not P[m, c]:
                        out[0], out[1], out[2], out[3], out[4] = 1, i, j, c, 2
                        return out
        return out

    @njit(cache=False)
    def _compat_nb(T, P, left_side):
        out = np.zeros(4, dtype=np.int64)
        n = T.shape[0]
        for i in range(n):
            for j in range(n):
                if not P[i, j]:
                    continue
                for o in range(n):
                    if left_side:
                        a, b = T[o, i], T[o, j]
                    else:
                        a, b = T[i, o], T[j, o]
                    if a < 0:
                        continue
                    if b < 0 or not P[a, b]:
                        out[0], out[1], out[2], out[3] = 1, i, j, o
                        return out
        return out

    def nb_compat_left(T, P):
        return _compat_nb(T, P, True)

    def nb_compat_right(T, P):
        return _compat_nb(T, P, False)


def numba_enabled() -> bool:
    return HAVE_NUMBA and os.environ.get("ONTOMERGE_DISABLE_NUMBA", "") not in ("1", "true", "yes")


def get_kernel(name: str, backend: str | None = None):
    """Look up a kernel; ``backend`` is 'numba', 'numpy', or None for the env default."""
    if name not in KERNELS:
        raise KeyError(name)
    if backend is None:
        backend = "numba" if numba_enabled() else "numpy"
    if backend == "numba":
        if not HAVE_NUMBA:
            raise RuntimeError("numba is not installed")
        return globals()["nb_" + name]
    if backend != "numpy":
        raise ValueError(f"unknown backend {backend!r}")
    return globals()["np_" + name]


def run(name: str, T: np.ndarray, P: np.ndarray | None = None, backend: str | None = None):
    fn = get_kernel(name, backend)
    T = np.ascontiguousarray(T, dtype=np.int64)
    if P is None:
        return fn(T)
    return fn(T, np.ascontiguousarray(P, dtype=np.bool_))
