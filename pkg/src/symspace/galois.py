"""GL_n over a quadratic extension k' = k(sqrt(delta)) with the Galois involution.

H = GL_n(k) is the fixed group.  Cocycle classes of monomial matrices are
counted by involutions of S_n up to conjugacy; ``u_witness`` realizes each one
and ``solve_coboundary`` trivializes a given cocycle explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import matrix as mx
from . import tree
from .padic import INF, PAdicNumber, PrecisionError, PrimeConfig, SquareClass


@dataclass(frozen=True)
class QuadExt:
    """``k' = k(sqrt(delta))``, delta one of the representatives ``xi``, ``p``, ``xi*p``.

    Valuations on k' are normalized: ``v(sqrt(delta)) = 1`` when ramified,
    so the uniformizer is ``sqrt(delta)``; when unramified it is ``p``.
    """

    base: PrimeConfig
    delta: SquareClass
    d: PAdicNumber = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.delta == SquareClass.One:
            raise ValueError("delta must be a non-square (One gives the split algebra)")
        object.__setattr__(self, "d", self.delta.rep(self.base))

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def ramified(self) -> bool:
        return self.delta.has_pi

    @property
    def e(self) -> int:
        return 2 if self.ramified else 1

    @property
    def q(self) -> int:
        """Size of the residue field: ``p`` if ramified, ``p^2`` if not."""
        return self.p if self.ramified else self.p * self.p

    @property
    def delta_int(self) -> int:
        return self.delta.rep_int(self.base)

    @property
    def precision(self) -> int:
        return self.e * self.base.precision

    def __call__(self, x) -> ExtElement:
        if isinstance(x, ExtElement):
            return x
        if isinstance(x, tuple):
            a, b = x
            return ExtElement(self, self.base(a), self.base(b))
        return ExtElement(self, self.base(x), self.base.zero)

    @property
    def zero(self) -> ExtElement:
        return ExtElement(self, self.base.zero, self.base.zero)

    @property
    def one(self) -> ExtElement:
        return ExtElement(self, self.base.one, self.base.zero)

    @property
    def sqrt_delta(self) -> ExtElement:
        return ExtElement(self, self.base.zero, self.base.one)

    @property
    def uniformizer(self) -> ExtElement:
        return self.sqrt_delta if self.ramified else self(self.p)

    def uniformizer_power(self, k: int) -> ExtElement:
        if not self.ramified:
            return ExtElement(self, self.base.uniformizer_power(k), self.base.zero)
        # sqrt(delta)^k = delta^(k//2) * sqrt(delta)^(k % 2)
        half = self.d ** (k // 2)
        if k % 2:
            return ExtElement(self, self.base.zero, half)
        return ExtElement(self, half, self.base.zero)

    def inexact_zero(self, absprec: int) -> ExtElement:
        ax = -(-absprec // self.e)
        ay = -(-(absprec - (self.e - 1)) // self.e)
        return ExtElement(self, self.base.inexact_zero(ax), self.base.inexact_zero(ay))

    def residue_reps(self) -> list[ExtElement]:
        """Representatives of o'/pi': ``a`` (ramified) or ``a + b sqrt(xi)`` (unramified)."""
        p = self.p
        if self.ramified:
            return [self(r) for r in range(p)]
        return [self((a, b)) for b in range(p) for a in range(p)]

    def random_element(self, rng, vmin: int, vmax: int) -> ExtElement:
        """Random element with normalized valuation in ``[vmin, vmax]``."""
        v = int(rng.integers(vmin, vmax + 1))
        cfg = self.base
        if self.ramified:
            u = ExtElement(self, cfg.random_unit(rng), cfg.random_element(rng, 0, 2))
            return u * self.uniformizer_power(v)
        a, b = cfg.random_unit(rng), cfg.random_element(rng, 0, 2)
        if rng.integers(2):
            a, b = b, a
        return ExtElement(self, a, b) * self.uniformizer_power(v)

    def label(self) -> str:
        return f"Q_{self.p}(sqrt({self.delta_int}))"


class ExtElement:
    """``x + y sqrt(delta)`` with ``x``, ``y`` in k."""

    __slots__ = ("ext", "x", "y")

    def __init__(self, ext: QuadExt, x: PAdicNumber, y: PAdicNumber):
        self.ext = ext
        self.x = x
        self.y = y

    @property
    def field(self) -> QuadExt:
        return self.ext

    # weights turning k-valuations of x, y into normalized k'-valuations
    def _wx(self, v):
        return self.ext.e * v

    def _wy(self, v):
        return self.ext.e * v + (self.ext.e - 1)

    def is_exact_zero(self) -> bool:
        return self.x.is_exact_zero() and self.y.is_exact_zero()

    def indistinguishable_from_zero(self) -> bool:
        return self.x.indistinguishable_from_zero() and self.y.indistinguishable_from_zero()

    def lower_bound(self):
        return min(self._wx(self.x.lower_bound()), self._wy(self.y.lower_bound()))

    @property
    def absprec(self):
        return min(self._wx(self.x.absprec), self._wy(self.y.absprec))

    @property
    def valuation(self):
        known, unknown = [], []
        for c, w in ((self.x, self._wx), (self.y, self._wy)):
            if c.indistinguishable_from_zero():
                unknown.append(w(c.lower_bound()))
            else:
                known.append(w(c.valuation))
        if not known:
            if all(u == INF for u in unknown):
                return INF
            raise PrecisionError(f"valuation of {self} is unknown")
        v = min(known)
        if any(u <= v for u in unknown):
            raise PrecisionError(f"valuation of {self} is not determined")
        return v

    def is_unit(self) -> bool:
        return self.valuation == 0

    def is_integral(self) -> bool:
        if self.indistinguishable_from_zero():
            if self.lower_bound() >= 0:
                return True
            raise PrecisionError("cannot decide integrality")
        return self.valuation >= 0

    def is_rational(self, absprec=None) -> bool:
        """Whether the ``sqrt(delta)`` part vanishes (to ``absprec`` if given)."""
        if not self.y.indistinguishable_from_zero():
            return False
        return absprec is None or self._wy(self.y.lower_bound()) >= absprec

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, ExtElement):
            return other
        if isinstance(other, (int, Fraction, PAdicNumber)):
            return self.ext(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return ExtElement(self.ext, self.x + other.x, self.y + other.y)

    __radd__ = __add__

    def __neg__(self):
        return ExtElement(self.ext, -self.x, -self.y)

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
        d = self.ext.d
        x = self.x * other.x + d * self.y * other.y
        y = self.x * other.y + self.y * other.x
        return ExtElement(self.ext, x, y)

    __rmul__ = __mul__

    def conj(self) -> ExtElement:
        return ExtElement(self.ext, self.x, -self.y)

    def norm(self) -> PAdicNumber:
        return self.x * self.x - self.ext.d * self.y * self.y

    def trace(self) -> PAdicNumber:
        return self.x + self.x

    def inverse(self) -> ExtElement:
        if self.is_exact_zero():
            raise ZeroDivisionError("inverse of exact zero")
        if self.indistinguishable_from_zero():
            raise PrecisionError(f"inverse of {self}")
        ninv = self.norm().inverse()
        return ExtElement(self.ext, self.x * ninv, -self.y * ninv)

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
        result, base = self.ext.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- comparison and export -----------------------------------------
    def agrees(self, other, absprec) -> bool:
        diff = self - self._coerce(other)
        return diff.indistinguishable_from_zero() and diff.lower_bound() >= absprec

    def residue(self, k: int):
        """Canonical representative of ``self`` modulo ``pi'^k`` as a pair of rationals."""
        e = self.ext.e
        kx = -(-k // e)
        ky = k // e if e == 2 else k
        return (self.x.residue(kx), self.y.residue(ky))

    def lift(self, balanced: bool = False) -> tuple[Fraction, Fraction]:
        return (self.x.lift(balanced), self.y.lift(balanced))

    def __eq__(self, other):
        if not isinstance(other, ExtElement):
            return NotImplemented
        return self.ext == other.ext and self.x == other.x and self.y == other.y

    def __hash__(self):
        return hash((self.x, self.y))

    def __repr__(self):
        return f"ExtElement({self})"

    def __str__(self):
        if self.y.is_exact_zero():
            return str(self.x)
        s = f"sqrt({self.ext.delta_int})"
        if self.x.is_exact_zero():
            return f"({self.y})*{s}"
        return f"({self.x}) + ({self.y})*{s}"


# -- matrices over k' ---------------------------------------------------------


def sigma(m):
    """Entrywise Galois conjugation (scalars or object arrays)."""
    if isinstance(m, ExtElement):
        return m.conj()
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        out[idx] = x.conj()
    return out


def embed(m: np.ndarray, ext: QuadExt) -> np.ndarray:
    """A matrix over k viewed over k'."""
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        out[idx] = ext(x)
    return out


def rational_part(m: np.ndarray, absprec=None) -> np.ndarray:
    """The matrix over k of a k-rational matrix over k'; raises if it is not rational."""
    out = np.empty(m.shape, dtype=object)
    for idx, x in np.ndenumerate(m):
        if not x.is_rational(absprec):
            raise ValueError(f"entry {idx} = {x} is not k-rational")
        out[idx] = x.x
    return out


def tau(n: int, i: int, ext) -> np.ndarray:
    """Permutation matrix of ``(0 1)(2 3)...(2i-2 2i-1)``."""
    if not 0 <= 2 * i <= n:
        raise ValueError(f"need 0 <= i <= {n // 2}, got {i}")
    perm = list(range(n))
    for k in range(i):
        perm[2 * k], perm[2 * k + 1] = 2 * k + 1, 2 * k
    return mx.permutation_matrix(perm, ext)


def _zero_bound(m: np.ndarray, slack: int = 5):
    return mx.min_absprec(m) + min(mx.min_valuation(m), 0) - slack


@dataclass(frozen=True)
class GaloisCocycleClass:
    """Class of a monomial cocycle: the number ``i`` of 2-cycles of its permutation."""

    n: int
    i: int

    def __post_init__(self):
        if not 0 <= 2 * self.i <= self.n:
            raise ValueError(f"class index {self.i} out of range for n = {self.n}")


def cocycle_classes(n: int) -> list[GaloisCocycleClass]:
    """One class per conjugacy class of involutions in S_n (including 1)."""
    return [GaloisCocycleClass(n, i) for i in range(n // 2 + 1)]


def is_cocycle(w: np.ndarray, slack: int = 5) -> bool:
    """``w sigma(w) = 1`` for a monomial ``w``."""
    if not mx.is_monomial(w):
        raise ValueError("cocycle test needs a monomial matrix")
    n = w.shape[0]
    prod = w.dot(sigma(w))
    return mx.agree(prod, mx.identity(n, w.flat[0].field), _zero_bound(w, slack))


def cocycle_class(w: np.ndarray) -> GaloisCocycleClass:
    perm = mx.monomial_permutation(w)
    n = len(perm)
    if any(perm[perm[j]] != j for j in range(n)):
        raise ValueError("permutation of a cocycle must be an involution")
    twos = sum(1 for j in range(n) if perm[j] > j)
    return GaloisCocycleClass(n, twos)


def u_witness(n: int, i: int, ext: QuadExt) -> np.ndarray:
    """Block diagonal ``u`` with ``u^-1 sigma(u) = tau_i``.

    Blocks ``[[a, sigma(a)], [1, 1]]`` with ``a = sqrt(delta)`` on the first
    ``2i`` coordinates, ones elsewhere.
    """
    t = tau(n, i, ext)
    u = mx.identity(n, ext)
    a = ext.sqrt_delta
    for k in range(i):
        r = 2 * k
        u[r, r], u[r, r + 1] = a, a.conj()
        u[r + 1, r], u[r + 1, r + 1] = ext.one, ext.one
    check = mx.inverse(u).dot(sigma(u))
    if not mx.agree(check, t, ext.precision - 2):
        raise ArithmeticError("u_witness postcondition failed")  # pragma: no cover
    return u


def _scalar_coboundary(c: ExtElement) -> ExtElement:
    """``nu`` with ``c = sigma(nu) / nu`` for ``c sigma(c) = 1``."""
    ext = c.ext
    s = c.conj()
    if c.agrees(-ext.one, ext.precision):
        return ext.sqrt_delta
    a = ext.one + s
    if not a.indistinguishable_from_zero() and a.valuation == 0:
        return a
    # (1 + s) + (1 - s) = 2, so 1 - s is a unit here and sqrt(delta)(1 - s) works
    return ext.sqrt_delta * (ext.one - s)


def solve_coboundary(c: np.ndarray, i: int) -> np.ndarray:
    """Monomial ``nu`` with ``c = nu^-1 tau_i sigma(nu)``."""
    n = c.shape[0]
    ext = c.flat[0].field
    cls = cocycle_class(c)
    if cls.i != i:
        raise ValueError(f"cocycle has class {cls.i}, not {i}")
    perm = mx.monomial_permutation(c)
    # q relabels coordinates so that the involution becomes tau_i
    pairs = sorted((j, perm[j]) for j in range(n) if perm[j] > j)
    fixed = [j for j in range(n) if perm[j] == j]
    order = [j for pr in pairs for j in pr] + fixed
    qperm = [0] * n
    for new, old in enumerate(order):
        qperm[old] = new
    q = mx.permutation_matrix(qperm, ext)
    cq = q.dot(c).dot(q.T)
    nu = mx.identity(n, ext)
    for k in range(i):
        r = 2 * k
        alpha = cq[r, r + 1]
        nu[r, r] = alpha.inverse()
    for j in range(2 * i, n):
        nu[j, j] = _scalar_coboundary(cq[j, j])
    return nu.dot(q)


def in_O(g: np.ndarray) -> bool:
    """Whether ``g^-1 sigma(g)`` is monomial."""
    m = mx.inverse(g).dot(sigma(g))
    nonzero = [x.valuation for x in m.flat if not x.indistinguishable_from_zero()]
    top = max(nonzero) if nonzero else INF
    for x in m.flat:
        if x.indistinguishable_from_zero() and not x.is_exact_zero() and x.lower_bound() <= top:
            raise PrecisionError("cannot certify a vanishing entry of g^-1 sigma(g)")
    return mx.is_monomial(m)


@dataclass
class GaloisFactorization:
    """``g = h u_i z kappa`` with ``h`` over k, ``z`` diagonal, ``kappa`` in GL_2(o')."""

    h: np.ndarray  # over k
    i: int
    u: np.ndarray
    z: np.ndarray
    kappa: np.ndarray
    apartment: tree.Apartment

    def product(self) -> np.ndarray:
        ext = self.u.flat[0].field
        return embed(self.h, ext).dot(self.u).dot(self.z).dot(self.kappa)


def _monomial_part(m: np.ndarray) -> np.ndarray:
    """``m`` with its entries that vanish to precision replaced by exact zeros."""
    out = m.copy()
    field_ = m.flat[0].field
    for idx, x in np.ndenumerate(m):
        if x.indistinguishable_from_zero():
            out[idx] = field_.zero
    return out


def _line_generator(g: np.ndarray, line) -> np.ndarray:
    """Generator of ``g o'^2 ∩ L``."""
    vec = np.array(line, dtype=object)
    c = mx.inverse(g).dot(vec)
    k = min(
        (j for j in range(len(c)) if not c[j].indistinguishable_from_zero()),
        key=lambda j: c[j].valuation,
    )
    return vec * c[k].inverse()


def guard_extension(g: np.ndarray) -> QuadExt:
    """The field of ``g`` with its precision widened by guard digits."""
    ext = g.flat[0].field
    vals = [x.valuation for x in g.flat if not x.indistinguishable_from_zero()]
    spread = max(vals) - min(vals)
    return QuadExt(PrimeConfig(ext.p, 2 * ext.base.precision + 2 * spread), ext.delta)


def lift_matrix(g: np.ndarray, ext: QuadExt) -> np.ndarray:
    """Re-express ``g`` over ``ext``, extending its balanced digits by zeros."""
    out = np.empty(g.shape, dtype=object)
    for idx, x in np.ndenumerate(g):
        out[idx] = ext(x.lift(balanced=True))
    return out


def factor_n2(g: np.ndarray, radius: int = 4) -> GaloisFactorization:
    """Factor ``g`` in GL_2(k') as ``h u_i z kappa``.

    A Galois-stable apartment through ``g x0`` gives ``g' = [w1 w2]`` with
    ``g' o'^2 = g o'^2`` and ``g'^-1 sigma(g')`` monomial; trivializing that
    cocycle splits ``g'`` into a rational part times ``u_i`` times a
    monomial matrix.
    """
    if g.shape != (2, 2):
        raise ValueError("factor_n2 needs a 2x2 matrix")
    ext = guard_extension(g)
    g = lift_matrix(g, ext)
    v = tree.act(g, tree.base_vertex(ext))
    A = tree.find_sigma_stable_apartment(v, tree.GALOIS, radius)
    if A is None:
        raise tree.SearchExhausted(radius)
    gp = np.empty((2, 2), dtype=object)
    for j, line in enumerate(A.lines):
        gp[:, j] = _line_generator(g, line)
    kappa0 = mx.inverse(gp).dot(g)
    c = _monomial_part(mx.inverse(gp).dot(sigma(gp)))
    i = cocycle_class(c).i
    nu = solve_coboundary(c, i)
    u = u_witness(2, i, ext)
    h = rational_part(gp.dot(mx.inverse(nu)).dot(mx.inverse(u)))
    # nu = z w with w the permutation part and z[perm[j]] = nu[perm[j], j]
    perm = mx.monomial_permutation(nu)
    w = mx.permutation_matrix(perm, ext)
    z = mx.zeros(2, ext)
    for j in range(2):
        z[perm[j], perm[j]] = nu[perm[j], j]
    return GaloisFactorization(h, i, u, z, w.dot(kappa0), A)


def in_K_ext(m: np.ndarray) -> bool:
    """Membership in GL_n(o')."""
    for x in m.flat:
        if not x.is_integral():
            return False
    d = mx.det(m)
    return not d.indistinguishable_from_zero() and d.valuation == 0


def verify_factorization(fac: GaloisFactorization, g: np.ndarray, slack: int = 5) -> dict:
    """Re-check a factorization of ``g``; recomposition in every digit ``g`` carries, less ``slack``."""
    wide = lift_matrix(g, fac.u.flat[0].field)
    return {
        "recomposes": mx.agree(fac.product(), wide, mx.min_absprec(g) - slack),
        "h_rational": all(isinstance(x, PAdicNumber) for x in fac.h.flat),
        "z_diagonal": all(
            fac.z[a, b].is_exact_zero() for a in range(2) for b in range(2) if a != b
        ),
        "kappa_integral": in_K_ext(fac.kappa),
        "u_relation": mx.agree(
            mx.inverse(fac.u).dot(sigma(fac.u)), tau(2, fac.i, fac.u.flat[0].field),
            fac.u.flat[0].field.precision - slack,
        ),
    }


# -- random generators ----------------------------------------------------------


def random_monomial(ext: QuadExt, n: int, rng, vmin: int = -2, vmax: int = 2) -> np.ndarray:
    perm = [int(j) for j in rng.permutation(n)]
    m = mx.zeros(n, ext)
    for j, i in enumerate(perm):
        m[i, j] = ext.random_element(rng, vmin, vmax)
    return m


def random_cocycle(ext: QuadExt, n: int, i: int, rng) -> np.ndarray:
    """``nu^-1 tau_i sigma(nu)`` for a random monomial ``nu``."""
    nu = random_monomial(ext, n, rng)
    return mx.inverse(nu).dot(tau(n, i, ext)).dot(sigma(nu))


def random_gl(ext: QuadExt, n: int, rng, vmin: int = -2, vmax: int = 2) -> np.ndarray:
    while True:
        rows = [[ext.random_element(rng, vmin, vmax) for _ in range(n)] for _ in range(n)]
        m = mx.from_entries(rows, ext)
        d = mx.det(m)
        if not d.indistinguishable_from_zero():
            return m
