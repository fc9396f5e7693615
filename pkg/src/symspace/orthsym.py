"""GL_n(Q_p) with the involution g -> tg^{-1}: double cosets H\\G/K and the
factorization g = h y s kappa with h orthogonal, y a class witness, s diagonal
and kappa in GL_n(o).
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from . import matrix as mx
from .lattice import diagonalize, ek_factor, in_K
from .padic import INF, PrecisionError, PrimeConfig, SquareClass, class_of, hensel_sqrt, legendre, square_class
from .qforms import (
    DiagonalForm,
    in_image_iota,
    invariants,
    represent_witness,
)

CosetClass = tuple  # sorted tuple of SquareClass


@dataclass
class CartanFactorization:
    h: np.ndarray
    y: np.ndarray
    s: np.ndarray
    kappa: np.ndarray
    cls: CosetClass

    def product(self) -> np.ndarray:
        return self.h.dot(self.y).dot(self.s).dot(self.kappa)

    def valuation_vector(self) -> tuple[int, ...]:
        return tuple(self.s[i, i].valuation for i in range(self.s.shape[0]))


def column_norms(e: np.ndarray) -> list:
    return [e[:, j].dot(e[:, j]) for j in range(e.shape[1])]


def _unit_pair_solution(ui, uj, cfg):
    """``(a, b)`` integral with ``ui a^2 + uj b^2 = 1``; ``ui``, ``uj`` non-square units."""
    for a in range(cfg.p):
        r = (1 - ui * a * a) / uj
        if r.indistinguishable_from_zero() or r.valuation % 2 or r.valuation < 0:
            continue
        b = hensel_sqrt(r)
        if b is not None:
            return cfg(a), b
    raise RuntimeError("binary unimodular form failed to represent 1")  # impossible for odd p


def guard_field(cfg: PrimeConfig, g: np.ndarray | None = None) -> PrimeConfig:
    """Working field for factoring ``g``: the input precision plus guard digits.

    Orthogonalizing a basis with large entries cancels many leading digits;
    the guard is sized from the valuation spread of ``g`` so the cancellation
    never reaches the digits that the input actually determines.
    """
    spread = valuation_spread(g) if g is not None else 0
    return PrimeConfig(cfg.p, 2 * cfg.precision + 4 * spread)


def lift_matrix(g: np.ndarray, cfg: PrimeConfig) -> np.ndarray:
    """Re-express ``g`` in ``cfg``, extending its balanced digits by zeros."""
    return mx.from_entries([[x.lift(balanced=True) for x in row] for row in g], cfg)


def gram_absprec(g: np.ndarray):
    """Absolute precision to which ``g.T @ g`` is determined by ``g``."""
    return mx.min_absprec(g) + min(mx.min_valuation(g), 0) if g.size else INF


def _certify(g: np.ndarray, norms) -> None:
    # p odd: if p^s A^-1 is integral, every B = A mod p^(s+1) is o-congruent
    # to A, so the Jordan data read off the lift is that of every completion.
    s = max(d.valuation for d in norms)
    have = gram_absprec(g)
    if have < s + 1:
        raise PrecisionError(
            f"input determines t(g)g only mod p^{have}; its Jordan type needs p^{s + 1}"
        )


def jordan_normal_basis(g: np.ndarray):
    """``g = e @ kappa`` with ``e`` orthogonal and in Jordan normal position.

    Columns of ``e`` sharing a norm valuation span a unimodular block (after
    scaling); inside each block all but at most one column norm are made
    squares times the block scale.  The resulting square classes depend only
    on the double coset ``H g K``.
    """
    cfg = g.flat[0].cfg
    e, kappa = ek_factor(g)
    norms = column_norms(e)
    blocks = {}
    for i, d in enumerate(norms):
        blocks.setdefault(d.valuation, []).append(i)
    for v, idx in sorted(blocks.items()):
        bad = [i for i in idx if legendre(norms[i].unit, cfg.p) == -1]
        while len(bad) >= 2:
            i, j = bad.pop(0), bad.pop(0)
            ui, uj = norms[i].unit_part(), norms[j].unit_part()
            a, b = _unit_pair_solution(ui, uj, cfg)
            ei, ej = e[:, i].copy(), e[:, j].copy()
            e[:, i] = a * ei + b * ej
            e[:, j] = (-b * uj) * ei + (a * ui) * ej
            ki, kj = kappa[i, :].copy(), kappa[j, :].copy()
            kappa[i, :] = (a * ui) * ki + (b * uj) * kj
            kappa[j, :] = (-b) * ki + a * kj
            norms[i] = e[:, i].dot(e[:, i])
            norms[j] = e[:, j].dot(e[:, j])
    return e, kappa, norms


def classify(g: np.ndarray) -> CosetClass:
    """The (H, K) double coset of ``g`` as a sorted tuple of square classes.

    Raises :class:`PrecisionError` when the known digits of ``g`` do not pin
    the double coset down.
    """
    cfg = g.flat[0].cfg
    _, _, norms = jordan_normal_basis(lift_matrix(g, guard_field(cfg, g)))
    _certify(g, norms)
    return tuple(sorted(class_of(d) for d in norms))


def jordan_canonical(cls: CosetClass) -> CosetClass:
    """Canonical form of a class tuple whose entries come from one unit and one
    p-scaled Jordan block (e.g. the class of a witness): inside each block a
    pair of xi's equals a pair of 1's, so only the parity of xi's survives."""
    out = []
    for plain, twisted in ((SquareClass.One, SquareClass.Xi), (SquareClass.Pi, SquareClass.XiPi)):
        k = sum(1 for c in cls if c in (plain, twisted))
        odd = sum(1 for c in cls if c == twisted) % 2
        out += [plain] * (k - odd) + [twisted] * odd
    return tuple(sorted(out))


def _leading_sign_normalize(v: np.ndarray) -> np.ndarray:
    p = v[0].cfg.p
    for x in v:
        if not x.indistinguishable_from_zero():
            if x.unit_residue() > (p - 1) // 2:
                return np.array([-t for t in v], dtype=object)
            return v
    return v


def witness(cls: CosetClass, cfg: PrimeConfig) -> np.ndarray:
    """``y`` with ``y.T @ y = diag(rep(c_1), ..., rep(c_n))``."""
    return _witness(tuple(cls), cfg).copy()


@functools.lru_cache(maxsize=256)
def _witness(cls, cfg):
    n = len(cls)
    target = DiagonalForm.from_classes(cfg, cls)
    if not in_image_iota(target):
        want = invariants(DiagonalForm.of(cfg, [1] * n))
        got = invariants(target)
        failing = "discriminant" if got.disc != want.disc else "Hasse invariant"
        raise ValueError(
            f"class {[c.name for c in cls]} is not realizable: {failing} differs from "
            f"the sum of {n} squares"
        )
    W = mx.identity(n, cfg)
    norms = [cfg.one] * n
    cols = []
    for i, c in enumerate(cls):
        z = represent_witness(DiagonalForm(tuple(norms)), c.rep(cfg))
        y = _leading_sign_normalize(W.dot(np.array(z, dtype=object)))
        cols.append(y)
        if i == n - 1:
            break
        yy = y.dot(y)
        drop = next(k for k, zk in enumerate(z) if not zk.indistinguishable_from_zero())
        keep = [k for k in range(W.shape[1]) if k != drop]
        P = np.empty((n, len(keep)), dtype=object)
        for col, k in enumerate(keep):
            w = W[:, k]
            P[:, col] = w - (y.dot(w) / yy) * y
        C, D = diagonalize(P.T.dot(P))
        W = P.dot(C)
        norms = [D[k, k] for k in range(D.shape[0])]
    out = np.empty((n, n), dtype=object)
    for j, col in enumerate(cols):
        out[:, j] = col
    return out


def cartan_factor(g: np.ndarray) -> CartanFactorization:
    """Factor ``g = h @ y @ s @ kappa``.

    ``g = e kappa0`` with ``e`` an orthogonal basis in Jordan normal
    position (see :func:`jordan_normal_basis`); each column norm is
    ``rep(c_i) * s_i^2``.  Columns are sorted by class (permutations are both
    orthogonal and integral) and the orthogonal part is ``h = e s^-1 w y^-1``.

    The factors live in :func:`guard_field` of the input field.
    """
    n = g.shape[0]
    cfg = guard_field(g.flat[0].cfg, g)
    e, kappa0, norms = jordan_normal_basis(lift_matrix(g, cfg))
    _certify(g, norms)
    split = [square_class(d) for d in norms]
    order = sorted(range(n), key=lambda i: split[i][0].value)
    cls = tuple(split[i][0] for i in order)
    f = np.empty((n, n), dtype=object)
    for k, i in enumerate(order):
        cinv = split[i][1].inverse()
        f[:, k] = [x * cinv for x in e[:, i]]
    s = mx.diag([split[i][1] for i in order], cfg)
    kappa = kappa0[order, :]
    y = witness(cls, cfg)
    yinv = mx.diag([c.rep(cfg).inverse() for c in cls], cfg).dot(y.T)
    h = f.dot(yinv)
    return CartanFactorization(h, y, s, kappa, cls)


def valuation_spread(g: np.ndarray) -> int:
    vals = [x.valuation for x in g.flat if not x.indistinguishable_from_zero()]
    return max(vals) - min(vals)


def is_orthogonal(h: np.ndarray, slack: int = 5, input_loss: int = 0) -> bool:
    """``h.T @ h = 1`` modulo ``p^(N - input_loss - slack)``, scaled by h's entries.

    ``input_loss`` is the number of digits the data ``h`` was derived from
    could not determine (e.g. the valuation spread of a factored matrix).
    """
    cfg = h.flat[0].cfg
    n = h.shape[0]
    bound = cfg.precision + 2 * min(mx.min_valuation(h), 0) - input_loss - slack
    return mx.agree(h.T.dot(h), mx.identity(n, cfg), bound)


def verify(fac: CartanFactorization, g: np.ndarray, slack: int = 5) -> dict:
    """Re-check every property of a factorization of ``g``.

    Recomposition is checked in every digit ``g`` carries, less ``slack``.
    """
    bound = mx.min_absprec(g) - slack
    s = fac.s
    n = s.shape[0]
    wide = lift_matrix(g, s.flat[0].cfg)
    return {
        "recomposes": mx.agree(fac.product(), wide, bound),
        "h_orthogonal": is_orthogonal(fac.h, slack, valuation_spread(g)),
        "kappa_in_K": in_K(fac.kappa),
        "s_diagonal": all(s[i, j].is_exact_zero() for i in range(n) for j in range(n) if i != j),
        "witness_gram": mx.agree(
            fac.y.T.dot(fac.y), mx.diag([c.rep(fac.y.flat[0].cfg) for c in fac.cls]), bound
        ),
        "class_matches": classify(g) == fac.cls,
    }


def anti_dominant_normalize(fac: CartanFactorization) -> CartanFactorization:
    """Reorder ``s`` so its valuations are non-increasing.

    Needs a scalar witness Gram (all classes equal): then ``y w y^-1`` is
    orthogonal for any permutation matrix ``w`` and can be absorbed into ``h``.
    """
    if len(set(fac.cls)) > 1:
        raise ValueError(
            "not normalizable by this method: witness Gram "
            f"{[c.name for c in fac.cls]} is not scalar"
        )
    n = fac.s.shape[0]
    cfg = fac.s.flat[0].cfg
    vals = fac.valuation_vector()
    order = sorted(range(n), key=lambda i: -vals[i])
    if order == list(range(n)):
        return fac
    w = mx.permutation_matrix(order, cfg)
    y = fac.y
    r = fac.cls[0].rep(cfg).inverse()
    yinv = y.T.dot(mx.diag([r] * n, cfg))
    h = fac.h.dot(y).dot(w).dot(yinv)
    s = mx.diag([fac.s[i, i] for i in order], cfg)
    kappa = fac.kappa[order, :]
    return CartanFactorization(h, y, s, kappa, fac.cls)


def reflection(u, cfg: PrimeConfig) -> np.ndarray:
    """Orthogonal reflection in the integer vector ``u`` (exact entries)."""
    from fractions import Fraction

    n = len(u)
    uu = sum(x * x for x in u)
    if uu == 0:
        raise ValueError("reflection vector is isotropic")
    rows = [
        [Fraction(int(i == j)) - Fraction(2 * u[i] * u[j], uu) for j in range(n)]
        for i in range(n)
    ]
    return mx.from_entries(rows, cfg)


def random_orthogonal(cfg: PrimeConfig, n: int, rng) -> np.ndarray:
    """Product of ``2n`` random reflections.

    Reflection vectors have norm of valuation at most 1, so each factor has
    entries of valuation at least -1 (those of valuation 1 leave GL_n(o)).
    """
    h = mx.identity(n, cfg)
    p2 = cfg.p * cfg.p
    for _ in range(2 * n):
        while True:
            u = [int(x) for x in rng.integers(-cfg.p, cfg.p + 1, size=n)]
            uu = sum(x * x for x in u)
            if uu and uu % p2:
                break
        h = h.dot(reflection(u, cfg))
    return h


def random_K(cfg: PrimeConfig, n: int, rng) -> np.ndarray:
    """A random element of GL_n(o) with full-precision entries."""
    while True:
        rows = [[cfg.random_element(rng, 0, 2) for _ in range(n)] for _ in range(n)]
        m = mx.from_entries(rows, cfg)
        d = mx.det(m)
        if not d.indistinguishable_from_zero() and d.valuation == 0:
            return m


def random_gl(cfg: PrimeConfig, n: int, rng, vmin: int = -3, vmax: int = 3) -> np.ndarray:
    """Random invertible matrix with entry valuations in ``[vmin, vmax]``."""
    while True:
        rows = [[cfg.random_element(rng, vmin, vmax) for _ in range(n)] for _ in range(n)]
        m = mx.from_entries(rows, cfg)
        d = mx.det(m)
        if not d.indistinguishable_from_zero() and d.valuation < INF:
            return m


def class_labels(cls: CosetClass) -> list[str]:
    return [c.label() for c in cls]


__all__ = [
    "CartanFactorization",
    "SquareClass",
    "anti_dominant_normalize",
    "cartan_factor",
    "classify",
    "jordan_canonical",
    "is_orthogonal",
    "random_K",
    "random_gl",
    "random_orthogonal",
    "verify",
    "witness",
]
