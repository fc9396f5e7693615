"""Finite-precision arithmetic in Q_p for odd primes.

Elements carry a valuation, a unit part and a relative precision (number of
known p-adic digits).  Exact zero is a distinguished value; a difference that
cancels every known digit becomes an *inexact* zero ``O(p^a)``, which may be
added and multiplied but whose valuation cannot be asked for.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

INF = math.inf


class PrecisionError(ArithmeticError):
    """Raised when the tracked digits do not determine the requested answer."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % d for d in range(3, math.isqrt(n) + 1, 2))


def legendre(u: int, p: int) -> int:
    """Legendre symbol of ``u`` modulo the odd prime ``p``."""
    u %= p
    if u == 0:
        raise ValueError(f"{u} is not a unit modulo {p}")
    return 1 if pow(u, (p - 1) // 2, p) == 1 else -1


def _int_valuation(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


@dataclass(frozen=True)
class PrimeConfig:
    """The field Q_p together with its working precision.

    ``xi`` is the least quadratic non-residue in ``2..p-1``; together with the
    uniformizer ``p`` it fixes the square-class representatives
    ``{1, xi, p, xi*p}``.
    """

    p: int
    precision: int = 40
    xi: int = field(init=False)
    _pw: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p) or self.p == 2:
            raise ValueError(f"p must be an odd prime, got {self.p}")
        if self.precision < 4:
            raise ValueError(f"precision must be at least 4, got {self.precision}")
        xi = next(a for a in range(2, self.p) if legendre(a, self.p) == -1)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(
            self, "_pw", tuple(self.p**k for k in range(self.precision + 2))
        )

    def __call__(self, x) -> PAdicNumber:
        """Coerce an int, Fraction or PAdicNumber into this field."""
        if isinstance(x, PAdicNumber):
            return x
        if isinstance(x, int):
            x = Fraction(x)
        elif isinstance(x, str):
            x = Fraction(x)
        if not isinstance(x, Fraction):
            raise TypeError(f"cannot build a p-adic number from {type(x).__name__}")
        if x == 0:
            return self.zero
        vn, num = _int_valuation(x.numerator, self.p)
        vd, den = _int_valuation(x.denominator, self.p)
        mod = self._pw[self.precision]
        unit = num * pow(den, -1, mod) % mod
        return PAdicNumber(self, vn - vd, unit, self.precision)

    @property
    def zero(self) -> PAdicNumber:
        return PAdicNumber(self, INF, 0, INF)

    @property
    def one(self) -> PAdicNumber:
        return PAdicNumber(self, 0, 1, self.precision)

    def uniformizer_power(self, k: int) -> PAdicNumber:
        return PAdicNumber(self, k, 1, self.precision)

    def inexact_zero(self, absprec: int) -> PAdicNumber:
        return PAdicNumber(self, absprec, 0, 0)

    # residue data used by the tree
    @property
    def q(self) -> int:
        return self.p

    @property
    def uniformizer(self) -> PAdicNumber:
        return self.uniformizer_power(1)

    def residue_reps(self) -> list[PAdicNumber]:
        """Representatives ``0, 1, ..., p-1`` of the residue field."""
        return [self(r) for r in range(self.p)]

    def random_unit(self, rng) -> PAdicNumber:
        """A unit drawn uniformly modulo p^N."""
        mod = self._pw[self.precision]
        while True:
            u = int(rng.integers(1, mod)) if mod < 2**63 else _big_randint(rng, mod)
            if u % self.p:
                return PAdicNumber(self, 0, u, self.precision)

    def random_element(self, rng, vmin: int, vmax: int) -> PAdicNumber:
        v = int(rng.integers(vmin, vmax + 1))
        u = self.random_unit(rng)
        return PAdicNumber(self, v, u.unit, self.precision)


def _big_randint(rng, mod: int) -> int:
    nbytes = (mod.bit_length() + 7) // 8 + 8
    return int.from_bytes(rng.bytes(nbytes), "little") % mod


class PAdicNumber:
    """``p^val * unit`` with ``unit`` known modulo ``p^prec``.

    Three kinds of values share this class: nonzero numbers (``prec >= 1``),
    the exact zero (``val = prec = inf``) and inexact zeros ``O(p^val)``
    (``unit = prec = 0``).
    """

    __slots__ = ("cfg", "val", "unit", "prec")

    def __init__(self, cfg: PrimeConfig, val, unit: int, prec):
        self.cfg = cfg
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- classification -------------------------------------------------
    @property
    def p(self) -> int:
        return self.cfg.p

    @property
    def field(self) -> PrimeConfig:
        return self.cfg

    @property
    def absprec(self):
        return self.val + self.prec

    def is_exact_zero(self) -> bool:
        return self.prec == INF

    def is_inexact_zero(self) -> bool:
        return self.prec == 0

    def indistinguishable_from_zero(self) -> bool:
        return self.unit == 0

    @property
    def valuation(self):
        """Valuation (``inf`` for exact zero); undefined for an inexact zero."""
        if self.prec == 0:
            raise PrecisionError(f"valuation of O({self.p}^{self.val}) is unknown")
        return self.val

    def lower_bound(self):
        """Largest integer the valuation is known to be at least."""
        return self.val

    def is_unit(self) -> bool:
        return self.valuation == 0

    def is_integral(self) -> bool:
        if self.prec == 0:
            if self.val >= 0:
                return True
            raise PrecisionError(f"cannot decide integrality of O({self.p}^{self.val})")
        return self.val >= 0

    def unit_residue(self) -> int:
        """The unit part modulo p."""
        if self.unit == 0:
            raise PrecisionError("zero has no unit part")
        return self.unit % self.p

    def unit_part(self) -> PAdicNumber:
        if self.unit == 0:
            raise PrecisionError("zero has no unit part")
        return PAdicNumber(self.cfg, 0, self.unit, self.prec)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> PAdicNumber:
        if isinstance(other, PAdicNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return self.cfg(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.prec == INF:
            return other
        if other.prec == INF:
            return self
        cfg = self.cfg
        absp = min(self.val + self.prec, other.val + other.prec)
        v = min(self.val, other.val)
        if absp <= v:
            return PAdicNumber(cfg, absp, 0, 0)
        m = absp - v
        pw = cfg._pw
        da, db = self.val - v, other.val - v
        x = (self.unit * pw[da] if da < m else 0) + (other.unit * pw[db] if db < m else 0)
        x %= pw[m]
        if x == 0:
            return PAdicNumber(cfg, absp, 0, 0)
        p = cfg.p
        t = 0
        while x % p == 0:
            x //= p
            t += 1
        return PAdicNumber(cfg, v + t, x, m - t)

    __radd__ = __add__

    def __neg__(self):
        if self.unit == 0:
            return self
        return PAdicNumber(self.cfg, self.val, (-self.unit) % self.cfg._pw[self.prec], self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        cfg = self.cfg
        if self.prec == INF or other.prec == INF:
            return cfg.zero
        if self.prec == 0 or other.prec == 0:
            return PAdicNumber(cfg, self.val + other.val, 0, 0)
        prec = min(self.prec, other.prec)
        return PAdicNumber(
            cfg, self.val + other.val, self.unit * other.unit % cfg._pw[prec], prec
        )

    __rmul__ = __mul__

    def inverse(self) -> PAdicNumber:
        if self.prec == INF:
            raise ZeroDivisionError("inverse of exact zero")
        if self.prec == 0:
            raise PrecisionError(f"inverse of O({self.p}^{self.val})")
        return PAdicNumber(
            self.cfg, -self.val, pow(self.unit, -1, self.cfg._pw[self.prec]), self.prec
        )

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.cfg.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def shift(self, k: int) -> PAdicNumber:
        """Multiply by p^k without touching the digits."""
        if self.prec == INF:
            return self
        return PAdicNumber(self.cfg, self.val + k, self.unit, self.prec)

    def with_precision(self, prec: int) -> PAdicNumber:
        """Forget digits beyond relative precision ``prec``."""
        if self.unit == 0 or prec >= self.prec:
            return self
        return PAdicNumber(self.cfg, self.val, self.unit % self.cfg._pw[prec], prec)

    # -- comparison and export -----------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.cfg(other)
        if not isinstance(other, PAdicNumber):
            return NotImplemented
        return (
            self.cfg.p == other.cfg.p
            and self.val == other.val
            and self.unit == other.unit
            and self.prec == other.prec
        )

    def __hash__(self):
        return hash((self.cfg.p, self.val, self.unit, self.prec))

    def agrees(self, other, absprec) -> bool:
        """True if ``self - other`` vanishes modulo ``p^absprec`` and that is known."""
        d = self - other
        return d.unit == 0 and d.val >= absprec

    def residue(self, k: int) -> Fraction:
        """The canonical representative of ``self`` modulo ``p^k``.

        The result is the truncation of the p-adic expansion below ``p^k``, an
        exact rational with p-power denominator.
        """
        if self.absprec < k:
            raise PrecisionError(
                f"residue mod {self.p}^{k} needs absolute precision {k}, have {self.absprec}"
            )
        if self.val >= k:
            return Fraction(0)
        p = self.p
        r = self.unit % p ** (k - self.val)
        if self.val >= 0:
            return Fraction(r * p**self.val)
        return Fraction(r, p ** (-self.val))

    def lift(self, balanced: bool = False) -> Fraction:
        """An exact rational agreeing with every known digit.

        With ``balanced`` the unit digits are read in ``(-p^prec/2, p^prec/2]``,
        so small negative integers come back as themselves.
        """
        if self.unit == 0:
            return Fraction(0)
        u = self.unit
        if balanced and 2 * u > self.cfg._pw[self.prec]:
            u -= self.cfg._pw[self.prec]
        return Fraction(u) * Fraction(self.p) ** self.val

    def __repr__(self):
        return f"PAdicNumber({self})"

    def __str__(self):
        p = self.p
        if self.prec == INF:
            return "0"
        if self.prec == 0:
            return f"O({p}^{self.val})"
        return f"{p}^{self.val} * {self.unit} mod {p}^{self.prec}"


# -- square roots and square classes --------------------------------------

def _sqrt_mod_p(u: int, p: int) -> int:
    for r in range(1, (p - 1) // 2 + 1):
        if r * r % p == u % p:
            return r
    raise ValueError(f"{u} is not a square modulo {p}")


def hensel_sqrt(a: PAdicNumber) -> PAdicNumber | None:
    """Square root of ``a`` or ``None`` when ``a`` is not a square.

    Of the two roots, the one whose unit residue lies in ``1..(p-1)/2`` is
    returned.
    """
    if a.prec == INF:
        raise ValueError("square root of exact zero")
    v = a.valuation
    if v % 2:
        return None
    p = a.p
    if legendre(a.unit, p) == -1:
        return None
    mod = a.cfg._pw[a.prec]
    r = _sqrt_mod_p(a.unit, p)
    k = 1
    while k < a.prec:
        k = min(2 * k, a.prec)
        m = p**k
        r = (r - (r * r - a.unit) * pow(2 * r, -1, m)) % m
    return PAdicNumber(a.cfg, v // 2, r % mod, a.prec)


class SquareClass(enum.Enum):
    """k^x / k^x^2 for odd p, as the Klein four-group ``{1, xi, pi, xi*pi}``."""

    One = 0
    Xi = 1
    Pi = 2
    XiPi = 3

    def __mul__(self, other: SquareClass) -> SquareClass:
        return SquareClass(self.value ^ other.value)

    def __lt__(self, other: SquareClass) -> bool:
        return self.value < other.value

    @property
    def has_pi(self) -> bool:
        return bool(self.value & 2)

    @property
    def has_xi(self) -> bool:
        return bool(self.value & 1)

    def rep(self, cfg: PrimeConfig) -> PAdicNumber:
        return cfg(self.rep_int(cfg))

    def rep_int(self, cfg: PrimeConfig) -> int:
        return (cfg.xi if self.has_xi else 1) * (cfg.p if self.has_pi else 1)

    def label(self) -> str:
        return {0: "1", 1: "xi", 2: "pi", 3: "xi*pi"}[self.value]


def class_of(a: PAdicNumber) -> SquareClass:
    v = a.valuation
    if v == INF:
        raise ValueError("zero has no square class")
    xi = legendre(a.unit, a.p) == -1
    return SquareClass((2 if v % 2 else 0) | (1 if xi else 0))


def square_class(a: PAdicNumber) -> tuple[SquareClass, PAdicNumber]:
    """Return ``(cls, c)`` with ``a = rep(cls) * c**2``."""
    cls = class_of(a)
    c = hensel_sqrt(a / cls.rep(a.cfg))
    assert c is not None
    return cls, c


def hilbert(a: PAdicNumber, b: PAdicNumber) -> int:
    """Hilbert symbol (a, b) over Q_p, p odd."""
    alpha, beta = a.valuation, b.valuation
    if alpha == INF or beta == INF:
        raise ValueError("Hilbert symbol of zero")
    p = a.p
    eps = legendre(-1, p)
    s = eps ** ((alpha * beta) % 2)
    if beta % 2:
        s *= legendre(a.unit, p)
    if alpha % 2:
        s *= legendre(b.unit, p)
    return s
