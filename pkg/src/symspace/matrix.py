"""Matrices over Q_p and its quadratic extensions as numpy object arrays.

Entries only need ring operations plus ``valuation``, ``inverse`` and
``indistinguishable_from_zero``; both :class:`~symspace.padic.PAdicNumber`
and :class:`~symspace.galois.ExtElement` qualify.
"""

from __future__ import annotations

import numpy as np

from .padic import INF, PrecisionError


class SingularMatrixError(ValueError):
    pass


def from_entries(rows, field) -> np.ndarray:
    """Build a matrix by coercing every entry with ``field``."""
    rows = [[field(x) for x in row] for row in rows]
    m = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        if len(row) != m.shape[1]:
            raise ValueError("ragged matrix literal")
        for j, x in enumerate(row):
            m[i, j] = x
    return m


def identity(n: int, field) -> np.ndarray:
    m = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            m[i, j] = field.one if i == j else field.zero
    return m


def zeros(n: int, field) -> np.ndarray:
    m = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            m[i, j] = field.zero
    return m


def diag(entries, field=None) -> np.ndarray:
    entries = list(entries)
    field = field or entries[0].field
    m = zeros(len(entries), field)
    for i, x in enumerate(entries):
        m[i, i] = x
    return m


def permutation_matrix(perm, field) -> np.ndarray:
    """Matrix sending basis vector ``e_j`` to ``e_{perm[j]}``."""
    n = len(perm)
    m = zeros(n, field)
    for j, i in enumerate(perm):
        m[i, j] = field.one
    return m


def min_valuation(m: np.ndarray):
    """Least valuation over entries that are not zero to precision."""
    vals = [x.valuation for x in m.flat if not x.indistinguishable_from_zero()]
    return min(vals) if vals else INF


def min_absprec(m: np.ndarray):
    return min(_absprec(x) for x in m.flat)


def _absprec(x):
    return x.absprec


def inverse(m: np.ndarray) -> np.ndarray:
    """Gauss-Jordan inverse pivoting on least valuation."""
    n = m.shape[0]
    a = m.copy()
    field = _field_of(m)
    inv = identity(n, field)
    for j in range(n):
        piv, best = None, INF
        for i in range(j, n):
            x = a[i, j]
            if x.indistinguishable_from_zero():
                continue
            v = x.valuation
            if v < best:
                piv, best = i, v
        if piv is None:
            if all(a[i, j].is_exact_zero() for i in range(j, n)):
                raise SingularMatrixError("matrix is not invertible")
            raise PrecisionError("matrix is singular to working precision")
        if piv != j:
            a[[j, piv]] = a[[piv, j]]
            inv[[j, piv]] = inv[[piv, j]]
        pinv = a[j, j].inverse()
        a[j] = [x * pinv for x in a[j]]
        inv[j] = [x * pinv for x in inv[j]]
        for i in range(n):
            if i != j and not a[i, j].is_exact_zero():
                f = a[i, j]
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
                inv[i] = [x - f * y for x, y in zip(inv[i], inv[j])]
    return inv


def det(m: np.ndarray):
    n = m.shape[0]
    a = m.copy()
    field = _field_of(m)
    d = field.one
    for j in range(n):
        piv, best = None, INF
        for i in range(j, n):
            x = a[i, j]
            if x.indistinguishable_from_zero():
                continue
            v = x.valuation
            if v < best:
                piv, best = i, v
        if piv is None:
            if all(a[i, j].is_exact_zero() for i in range(j, n)):
                return field.zero
            lb = min(a[i, j].lower_bound() for i in range(j, n))
            return d * field.inexact_zero(lb)
        if piv != j:
            a[[j, piv]] = a[[piv, j]]
            d = -d
        d = d * a[j, j]
        pinv = a[j, j].inverse()
        for i in range(j + 1, n):
            if not a[i, j].is_exact_zero():
                f = a[i, j] * pinv
                a[i] = [x - f * y for x, y in zip(a[i], a[j])]
    return d


def _field_of(m: np.ndarray):
    return m.flat[0].field


def agree(a: np.ndarray, b: np.ndarray, absprec) -> bool:
    """Entrywise agreement of ``a`` and ``b`` modulo ``p^absprec`` (known)."""
    return all(x.agrees(y, absprec) for x, y in zip(a.flat, b.flat))


def is_diagonal(m: np.ndarray, absprec) -> bool:
    n = m.shape[0]
    return all(
        m[i, j].indistinguishable_from_zero() and m[i, j].lower_bound() >= absprec
        for i in range(n)
        for j in range(n)
        if i != j
    )


def is_monomial(m: np.ndarray) -> bool:
    n = m.shape[0]
    nz = [[not m[i, j].indistinguishable_from_zero() for j in range(n)] for i in range(n)]
    return all(sum(r) == 1 for r in nz) and all(sum(c) == 1 for c in zip(*nz))


def monomial_permutation(m: np.ndarray) -> list[int]:
    """``perm`` with ``m[perm[j], j]`` the nonzero entry of column ``j``."""
    n = m.shape[0]
    if not is_monomial(m):
        raise ValueError("matrix is not monomial")
    return [next(i for i in range(n) if not m[i, j].indistinguishable_from_zero()) for j in range(n)]


def to_strings(m: np.ndarray) -> list[list[str]]:
    return [[str(x) for x in row] for row in m]
