"""Diagonal quadratic forms over Q_p (p odd): invariants, isotropy, representation."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .padic import (
    PAdicNumber,
    PrimeConfig,
    SquareClass,
    class_of,
    hensel_sqrt,
    hilbert,
    square_class,
)


@dataclass(frozen=True)
class DiagonalForm:
    """The form ``a_1 X_1^2 + ... + a_n X_n^2``."""

    coeffs: tuple[PAdicNumber, ...]

    def __post_init__(self):
        if not self.coeffs:
            raise ValueError("a form needs rank at least 1")
        for a in self.coeffs:
            if a.indistinguishable_from_zero():
                raise ValueError("diagonal coefficients must be nonzero")

    @classmethod
    def of(cls, cfg: PrimeConfig, coeffs) -> DiagonalForm:
        return cls(tuple(cfg(a) for a in coeffs))

    @classmethod
    def from_classes(cls, cfg: PrimeConfig, classes) -> DiagonalForm:
        return cls(tuple(c.rep(cfg) for c in classes))

    @property
    def cfg(self) -> PrimeConfig:
        return self.coeffs[0].cfg

    @property
    def rank(self) -> int:
        return len(self.coeffs)

    def discriminant(self) -> PAdicNumber:
        d = self.cfg.one
        for a in self.coeffs:
            d = d * a
        return d

    def __call__(self, x) -> PAdicNumber:
        total = self.cfg.zero
        for a, xi in zip(self.coeffs, x):
            total = total + a * xi * xi
        return total

    def orthogonal_sum(self, other: DiagonalForm) -> DiagonalForm:
        return DiagonalForm(self.coeffs + other.coeffs)


@dataclass(frozen=True)
class FormInvariants:
    rank: int
    disc: SquareClass
    hasse: int


def invariants(f: DiagonalForm) -> FormInvariants:
    hasse = 1
    for a, b in itertools.combinations(f.coeffs, 2):
        hasse *= hilbert(a, b)
    return FormInvariants(f.rank, class_of(f.discriminant()), hasse)


def equivalent(f: DiagonalForm, g: DiagonalForm) -> bool:
    return invariants(f) == invariants(g)


def is_isotropic(f: DiagonalForm) -> bool:
    n = f.rank
    if n == 1:
        return False
    cfg = f.cfg
    inv = invariants(f)
    minus_one = cfg(-1)
    if n == 2:
        return inv.disc == class_of(minus_one)
    if n == 3:
        return hilbert(minus_one, -f.discriminant()) == inv.hasse
    if n == 4:
        return not (inv.disc == SquareClass.One and inv.hasse != hilbert(minus_one, minus_one))
    return True


def represents(f: DiagonalForm, c: PAdicNumber) -> bool:
    """Whether ``f(x) = c`` is soluble over Q_p."""
    c = f.cfg(c)
    return is_isotropic(f.orthogonal_sum(DiagonalForm((-c,))))


def _candidates(p: int):
    # 1, ..., p^2 - 1, then 0, then m/p for m prime to p
    for m in range(1, p * p):
        yield Fraction(m)
    yield Fraction(0)
    for m in range(1, p * p):
        if m % p:
            yield Fraction(m, p)


def represent_witness(f: DiagonalForm, c) -> list[PAdicNumber]:
    """A vector ``x`` with ``f(x) = c``.

    Coefficients and target are first normalized to square-class
    representatives.  Coordinates are then fixed one at a time, taking the
    first candidate (in a fixed order of small rationals) that leaves a
    remainder still represented by the remaining coefficients; the last
    coordinate is a Hensel square root.
    """
    cfg = f.cfg
    c = cfg(c)
    if c.indistinguishable_from_zero():
        raise ValueError("target must be nonzero")
    if not represents(f, c):
        inv = invariants(f)
        raise ValueError(
            f"{c} is not represented: rank {inv.rank}, disc {inv.disc.name}, "
            f"Hasse {inv.hasse} make the form with -c anisotropic"
        )
    reps, scales = [], []
    for a in f.coeffs:
        cls, alpha = square_class(a)
        reps.append(cls.rep(cfg))
        scales.append(alpha)
    c_cls, gamma = square_class(c)
    y = _solve_normalized(reps, c_cls.rep(cfg), cfg)
    return [yi * gamma / alpha for yi, alpha in zip(y, scales)]


def _solve_normalized(reps, target, cfg):
    n = len(reps)
    if n == 1:
        root = hensel_sqrt(target / reps[0])
        if root is None:
            raise ValueError("no square root in rank-1 step")
        return [root]
    rest = DiagonalForm(tuple(reps[1:]))
    for cand in _candidates(cfg.p):
        y = cfg(cand)
        r = target - reps[0] * y * y
        if r.indistinguishable_from_zero():
            # target and candidate are exact rationals, so this is a true zero
            return [y] + [cfg.zero] * (n - 1)
        if represents(rest, r):
            return [y] + _solve_normalized(reps[1:], r, cfg)
    raise RuntimeError("candidate search exhausted")  # unreachable for represented targets


def in_image_iota(a: DiagonalForm) -> bool:
    """Whether ``a`` is equivalent to the sum of ``n`` squares."""
    return equivalent(a, DiagonalForm.of(a.cfg, [1] * a.rank))


CLASS_ORDER = (SquareClass.One, SquareClass.Xi, SquareClass.Pi, SquareClass.XiPi)


def j_representatives(n: int, cfg: PrimeConfig) -> list[tuple[SquareClass, ...]]:
    """Sorted square-class tuples of length ``n`` realizable as ``tg g``."""
    if n < 1:
        raise ValueError("n must be positive")
    return [
        classes
        for classes in itertools.combinations_with_replacement(CLASS_ORDER, n)
        if in_image_iota(DiagonalForm.from_classes(cfg, classes))
    ]
