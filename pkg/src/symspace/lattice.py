"""Full-rank o-lattices in Q_p^n given by bases (columns of an invertible matrix)."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import matrix as mx
from .padic import INF, PrecisionError, PrimeConfig


@dataclass(frozen=True)
class LatticeHNF:
    """Upper-triangular column basis with diagonal ``p^d_i``.

    Entry ``(i, j)`` above the diagonal is the truncation of its p-adic
    expansion below ``p^d_i``, so the whole form is an exact rational matrix.
    """

    pivots: tuple[int, ...]
    entries: tuple[tuple[Fraction, ...], ...]

    def matrix(self, cfg: PrimeConfig) -> np.ndarray:
        return mx.from_entries(self.entries, cfg)


def hnf(b: np.ndarray) -> LatticeHNF:
    n = b.shape[0]
    cfg = b.flat[0].cfg
    a = b.copy()
    pivots = [0] * n
    for i in range(n - 1, -1, -1):
        best, piv = INF, None
        for j in range(i + 1):
            x = a[i, j]
            if x.indistinguishable_from_zero():
                continue
            if x.valuation < best:
                best, piv = x.valuation, j
        if piv is None:
            if all(a[i, j].is_exact_zero() for j in range(i + 1)):
                raise mx.SingularMatrixError("basis is not invertible")
            raise PrecisionError("basis is singular to working precision")
        for j in range(i + 1):
            if j != piv and a[i, j].lower_bound() < best:
                raise PrecisionError("pivot valuation not certified")
        if piv != i:
            a[:, [i, piv]] = a[:, [piv, i]]
        uinv = a[i, i].unit_part().inverse()
        a[:, i] = [x * uinv for x in a[:, i]]
        a[i, i] = cfg.uniformizer_power(best)
        pivots[i] = best
        for j in range(i):
            if a[i, j].is_exact_zero():
                continue
            t = a[i, j] / a[i, i]
            a[:, j] = [x - t * y for x, y in zip(a[:, j], a[:, i])]
            a[i, j] = cfg.zero
    out = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        out[j][j] = Fraction(cfg.p) ** pivots[j]
        for i in range(j - 1, -1, -1):
            r = a[i, j].residue(pivots[i])
            t = (a[i, j] - cfg(r)) / a[i, i]
            if not t.is_exact_zero():
                a[:, j] = [x - t * y for x, y in zip(a[:, j], a[:, i])]
            a[i, j] = cfg(r)
            out[i][j] = r
    return LatticeHNF(tuple(pivots), tuple(tuple(row) for row in out))


def in_K(g: np.ndarray) -> bool:
    """Membership in GL_n(o)."""
    for x in g.flat:
        if x.indistinguishable_from_zero():
            if x.lower_bound() < 0:
                raise PrecisionError("cannot decide integrality of an entry")
        elif x.valuation < 0:
            return False
    return mx.det(g).valuation == 0


def bilinear(B: np.ndarray, x: np.ndarray, y: np.ndarray):
    return x.dot(B.dot(y))


def _orthogonal_basis(B, basis, lattice_pivot: bool, floor=INF):
    """Shared engine for :func:`orthogonalize_lattice` and :func:`diagonalize`.

    Returns ``(new_basis, U, U_inv)`` with ``new_basis = basis @ U``.
    Gram entries of valuation ``>= floor`` count as zero.
    """
    n = basis.shape[1]
    cfg = basis.flat[0].field
    vecs = basis.copy()
    U = mx.identity(n, cfg)
    Uinv = mx.identity(n, cfg)
    active = list(range(n))
    while len(active) > 1:
        Bv = {j: B.dot(vecs[:, j]) for j in active}
        G = {(i, j): vecs[:, i].dot(Bv[j]) for i in active for j in active if i <= j}
        live = [
            x for x in G.values() if not x.indistinguishable_from_zero() and x.valuation < floor
        ]
        if not live:
            break
        if lattice_pivot:
            m = min(x.valuation for x in live)
            if any(x.indistinguishable_from_zero() and x.lower_bound() < m for x in G.values()):
                raise PrecisionError("form valuation on the lattice is not certified")
            pivot = next((i for i in active if _has_val(G[i, i], m)), None)
        else:
            diag_live = [i for i in active if not G[i, i].indistinguishable_from_zero()]
            pivot = None
            if diag_live:
                m = min(G[i, i].valuation for i in diag_live)
                pivot = next(i for i in diag_live if G[i, i].valuation == m)
        if pivot is None:
            pair = None
            for i in active:
                for j in active:
                    if j <= i:
                        continue
                    s = G[i, i] + 2 * G[i, j] + G[j, j]
                    ok = _has_val(s, m) if lattice_pivot else not s.indistinguishable_from_zero()
                    if ok:
                        pair = (i, j)
                        break
                if pair:
                    break
            if pair is None:
                raise PrecisionError("no anisotropic pivot found at working precision")
            i, j = pair
            # v_i <- v_i + v_j
            vecs[:, i] = vecs[:, i] + vecs[:, j]
            U[:, i] = U[:, i] + U[:, j]
            Uinv[j, :] = Uinv[j, :] - Uinv[i, :]
            pivot = i
            Bv[i] = B.dot(vecs[:, i])
        e = vecs[:, pivot]
        Bee = e.dot(Bv[pivot])
        inv_Bee = Bee.inverse()
        for j in active:
            if j == pivot:
                continue
            t = e.dot(Bv[j]) * inv_Bee
            if t.is_exact_zero():
                continue
            vecs[:, j] = vecs[:, j] - t * e
            U[:, j] = U[:, j] - t * U[:, pivot]
            Uinv[pivot, :] = Uinv[pivot, :] + t * Uinv[j, :]
        active.remove(pivot)
    return vecs, U, Uinv


def _has_val(x, m) -> bool:
    return not x.indistinguishable_from_zero() and x.valuation == m


def _spread(m: np.ndarray) -> int:
    vals = [x.valuation for x in m.flat if not x.indistinguishable_from_zero()]
    return max(vals) - min(vals) if vals else 0


def orthogonalize_lattice(B: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """A basis of the lattice spanned by ``basis`` that is orthogonal for ``B``.

    Works by peeling off a vector whose norm has the least valuation the form
    takes on the lattice, then recursing in its orthogonal complement.  The
    elimination runs with guard digits (unknown input digits read as zero)
    and the result is rounded back to the field of ``basis``.
    """
    cfg = basis.flat[0].cfg
    wide = PrimeConfig(cfg.p, 2 * cfg.precision + 2 * (_spread(B) + _spread(basis)))

    def lift(m):
        return mx.from_entries([[x.lift(balanced=True) for x in row] for row in m], wide)

    # Gram digits the input does not determine must not become pivots
    floor = mx.min_absprec(gram(B, basis))
    out = _orthogonal_basis(lift(B), lift(basis), lattice_pivot=True, floor=floor)[0]
    return mx.from_entries([[x.lift(balanced=True) for x in row] for row in out], cfg)


def orthogonalize_with_transform(B: np.ndarray, basis: np.ndarray):
    """Like :func:`orthogonalize_lattice`, also returning ``U`` and ``U^-1``."""
    return _orthogonal_basis(B, basis, lattice_pivot=True)


def ek_factor(g: np.ndarray):
    """``g = e @ kappa`` with ``kappa`` in GL_n(o) and ``e.T @ e`` diagonal."""
    n = g.shape[0]
    cfg = g.flat[0].cfg
    e, _, kappa = orthogonalize_with_transform(mx.identity(n, cfg), g)
    return e, kappa


def diagonalize(M: np.ndarray):
    """``(C, D)`` with ``C.T @ M @ C = D`` diagonal and ``C`` invertible."""
    n = M.shape[0]
    cfg = M.flat[0].cfg
    C, _, _ = _orthogonal_basis(M, mx.identity(n, cfg), lattice_pivot=False)
    D = C.T.dot(M).dot(C)
    for i in range(n):
        for j in range(n):
            if i != j:
                D[i, j] = cfg.zero
    return C, D


def gram(B: np.ndarray, basis: np.ndarray) -> np.ndarray:
    return basis.T.dot(B).dot(basis)


def gram_is_diagonal(G: np.ndarray, slack: int = 5) -> bool:
    """Off-diagonal entries vanish below ``p^(minval + N - slack)``."""
    cfg = G.flat[0].cfg
    m = mx.min_valuation(G)
    if m == INF:
        return True
    return mx.is_diagonal(G, m + cfg.precision - slack)
