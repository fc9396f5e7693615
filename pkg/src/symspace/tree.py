"""The Bruhat-Tits tree of GL_2 over k = Q_p or a quadratic extension k'.

Vertices are homothety classes of o-lattices in the plane, stored by the
normalized Hermite form ``[[pi^a, b], [0, pi^c]]`` of a basis.  Apartments
are frames: unordered pairs of lines.  Fields are duck-typed: both
:class:`~symspace.padic.PrimeConfig` and :class:`~symspace.galois.QuadExt`
supply ``uniformizer_power``, ``residue_reps``, ``q`` and ``precision``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import matrix as mx
from .padic import INF, PrecisionError

GALOIS = "galois"
TRANSPOSE = "transpose"


class SearchExhausted(RuntimeError):
    """No stable apartment among the frames enumerated to the given depth."""

    def __init__(self, radius: int):
        super().__init__(f"no stable apartment found at search radius {radius}")
        self.radius = radius


def _key_str(b) -> str:
    if isinstance(b, tuple):
        return f"{b[0]}+{b[1]}*sqrt(d)"
    return str(b)


@dataclass(frozen=True, eq=False)
class TreeVertex:
    """Class of the lattice spanned by the columns of ``basis``."""

    field: object
    a: int
    c: int
    b: object  # exact residue of the corner entry modulo pi^a
    basis: np.ndarray = field(repr=False)

    @property
    def key(self):
        return (self.a, self.c, self.b)

    def __eq__(self, other):
        return isinstance(other, TreeVertex) and self.field == other.field and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __lt__(self, other):
        return _sort_key(self) < _sort_key(other)

    def to_dict(self) -> dict:
        return {"a": self.a, "c": self.c, "b": _key_str(self.b)}

    def __str__(self):
        return f"[[pi^{self.a}, {_key_str(self.b)}], [0, pi^{self.c}]]"


def _sort_key(v: TreeVertex):
    b = v.b if isinstance(v.b, tuple) else (v.b,)
    return (v.a + v.c, v.a, tuple(b))


def canonical(m: np.ndarray, F) -> TreeVertex:
    """The vertex of the lattice spanned by the columns of ``m``."""
    m = m.copy()
    d1 = mx.min_valuation(m)
    if d1 == INF:
        raise mx.SingularMatrixError("zero matrix spans no lattice")
    if d1:
        s = F.uniformizer_power(-d1)
        m = np.array([[x * s for x in row] for row in m], dtype=object)
    # bottom row: pivot on the entry of least valuation
    r0, r1 = m[1, 0], m[1, 1]
    v0 = INF if r0.indistinguishable_from_zero() else r0.valuation
    v1 = INF if r1.indistinguishable_from_zero() else r1.valuation
    if v0 == INF and v1 == INF:
        raise PrecisionError("lattice basis is singular to working precision")
    if v0 < v1:
        m[:, [0, 1]] = m[:, [1, 0]]
        v0, v1 = v1, v0
    c = v1
    scale = F.uniformizer_power(c) / m[1, 1]
    m[:, 1] = [x * scale for x in m[:, 1]]
    if not m[1, 0].is_exact_zero():
        t = m[1, 0] / m[1, 1]
        m[:, 0] = [x - t * y for x, y in zip(m[:, 0], m[:, 1])]
    top = m[0, 0]
    if top.indistinguishable_from_zero():
        raise PrecisionError("lattice basis is singular to working precision")
    a = top.valuation
    b = m[0, 1].residue(a)
    basis = mx.from_entries(
        [[F.uniformizer_power(a), F(b)], [F.zero, F.uniformizer_power(c)]], F
    )
    return TreeVertex(F, a, c, b, basis)


def base_vertex(F) -> TreeVertex:
    return canonical(mx.identity(2, F), F)


def neighbors(v: TreeVertex) -> list[TreeVertex]:
    """The ``q + 1`` vertices at distance one, ordered by residue representative."""
    F = v.field
    pi = F.uniformizer
    out = []
    for r in F.residue_reps():
        step = mx.from_entries([[pi, r], [F.zero, F.one]], F)
        out.append(canonical(v.basis.dot(step), F))
    step = mx.from_entries([[F.one, F.zero], [F.zero, pi]], F)
    out.append(canonical(v.basis.dot(step), F))
    return out


def distance(u: TreeVertex, v: TreeVertex) -> int:
    """``d2 - d1`` for the elementary divisors ``pi^d1 | pi^d2`` of ``Mu^-1 Mv``."""
    n = mx.inverse(u.basis).dot(v.basis)
    return mx.det(n).valuation - 2 * mx.min_valuation(n)


def geodesic(u: TreeVertex, v: TreeVertex) -> list[TreeVertex]:
    """Vertices of the path from ``u`` to ``v``, both included."""
    path = [u]
    d = distance(u, v)
    while d:
        cur = path[-1]
        nxt = next(w for w in neighbors(cur) if distance(w, v) == d - 1)
        path.append(nxt)
        d -= 1
    return path


def ball(center: TreeVertex, radius: int) -> list[tuple[TreeVertex, int]]:
    """Breadth-first list of ``(vertex, distance)`` within ``radius``."""
    seen = {center: 0}
    out = [(center, 0)]
    queue = deque([center])
    while queue:
        v = queue.popleft()
        d = seen[v]
        if d == radius:
            continue
        for w in neighbors(v):
            if w not in seen:
                seen[w] = d + 1
                out.append((w, d + 1))
                queue.append(w)
    return out


def act(g: np.ndarray, v: TreeVertex) -> TreeVertex:
    return canonical(g.dot(v.basis), v.field)


def sigma_galois(v: TreeVertex) -> TreeVertex:
    """Entrywise conjugation of the basis (k' trees only)."""
    m = np.array([[x.conj() for x in row] for row in v.basis], dtype=object)
    return canonical(m, v.field)


def sigma_transpose(v: TreeVertex) -> TreeVertex:
    """The dual lattice for the standard form: basis ``M^-T``."""
    return canonical(mx.inverse(v.basis).T.copy(), v.field)


def sigma_vertex(v: TreeVertex, which: str) -> TreeVertex:
    return _SIGMA[which](v)


_SIGMA = {GALOIS: sigma_galois, TRANSPOSE: sigma_transpose}


# -- lines and frames ---------------------------------------------------------


def _primitive(vec):
    """Scale ``vec`` so its least-valuation coordinate is 1."""
    x, y = vec
    if x.indistinguishable_from_zero() and y.indistinguishable_from_zero():
        raise PrecisionError("direction vector is zero to working precision")
    if y.indistinguishable_from_zero() or (
        not x.indistinguishable_from_zero() and x.valuation <= y.valuation
    ):
        return (x.field.one, y / x)
    return (x / y, y.field.one)


def normalize_line(vec):
    """Direction with first coordinate 1, or ``(0, 1)``."""
    x, y = vec
    F = x.field
    if x.indistinguishable_from_zero():
        if not x.is_exact_zero() and y.indistinguishable_from_zero():
            raise PrecisionError("direction vector is zero to working precision")
        return (F.zero, F.one)
    return (F.one, y / x)


def lines_equal(l1, l2) -> bool:
    a, b = _primitive(l1), _primitive(l2)
    d = a[0] * b[1] - a[1] * b[0]
    if not d.indistinguishable_from_zero():
        return False
    F = a[0].field
    if d.lower_bound() < F.precision // 2:
        raise PrecisionError("cannot certify equality of two lines")
    return True


def line_image(line, which: str):
    """Image of a line under the involution acting on directions."""
    x, y = line
    if which == GALOIS:
        return normalize_line((x.conj(), y.conj()))
    if which == TRANSPOSE:
        return normalize_line((-y, x))  # orthogonal complement
    raise ValueError(f"unknown involution {which!r}")


def _line_str(line) -> str:
    return f"({line[0]} : {line[1]})"


@dataclass(frozen=True, eq=False)
class Apartment:
    """The apartment of the frame ``{L1, L2}``."""

    lines: tuple

    def __post_init__(self):
        l1, l2 = self.lines
        if lines_equal(l1, l2):
            raise ValueError("frame lines must be distinct")

    @classmethod
    def of(cls, v1, v2) -> Apartment:
        return cls((normalize_line(v1), normalize_line(v2)))

    @property
    def field(self):
        return self.lines[0][0].field

    def same_as(self, other: Apartment) -> bool:
        a1, a2 = self.lines
        b1, b2 = other.lines
        return (lines_equal(a1, b1) and lines_equal(a2, b2)) or (
            lines_equal(a1, b2) and lines_equal(a2, b1)
        )

    def adapted_basis(self, v: TreeVertex):
        """Generators ``w_i`` of ``Lambda_v ∩ L_i`` or ``None`` if ``v`` is off the apartment."""
        minv = mx.inverse(v.basis)
        cols = []
        for line in self.lines:
            c = minv.dot(np.array(line, dtype=object))
            i = min(
                (k for k in range(2) if not c[k].indistinguishable_from_zero()),
                key=lambda k: c[k].valuation,
            )
            cols.append([x / c[i] for x in c])
        n = mx.from_entries([[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]], v.field)
        d = mx.det(n)
        if d.indistinguishable_from_zero() or d.valuation != 0:
            return None
        return v.basis.dot(n)

    def contains(self, v: TreeVertex) -> bool:
        """``Lambda = (Lambda ∩ L1) + (Lambda ∩ L2)`` for the lattice of ``v``."""
        return self.adapted_basis(v) is not None

    def vertices_near(self, v: TreeVertex, radius: int) -> list[TreeVertex]:
        """Apartment vertices within ``radius`` of ``v`` (which must lie on it)."""
        w = self.adapted_basis(v)
        if w is None:
            raise ValueError("vertex is not on the apartment")
        F = v.field
        out = []
        for a in range(-radius, radius + 1):
            m = w.copy()
            s = F.uniformizer_power(a)
            m[:, 0] = [x * s for x in m[:, 0]]
            out.append(canonical(m, F))
        return out

    def act(self, g: np.ndarray) -> Apartment:
        return Apartment.of(*(tuple(g.dot(np.array(l, dtype=object))) for l in self.lines))

    def to_dict(self) -> dict:
        return {"lines": [[str(x) for x in l] for l in self.lines]}

    def __str__(self):
        return "{" + ", ".join(_line_str(l) for l in self.lines) + "}"


def is_sigma_stable(A: Apartment, which: str) -> bool:
    """Whether the involution maps the frame to itself (lines fixed or swapped)."""
    l1, l2 = A.lines
    i1, i2 = line_image(l1, which), line_image(l2, which)
    return (lines_equal(i1, l1) and lines_equal(i2, l2)) or (
        lines_equal(i1, l2) and lines_equal(i2, l1)
    )


def swaps_lines(A: Apartment, which: str) -> bool:
    l1, l2 = A.lines
    return lines_equal(line_image(l1, which), l2)


def anti_invariant_rank(A: Apartment, which: str) -> int:
    """Rank of the part of the frame's torus on which the involution acts by inversion.

    Galois: 0 for rational lines, 1 for conjugate lines.  Transpose-inverse:
    2 for an orthogonal frame, 1 for a pair of isotropic lines.
    """
    if not is_sigma_stable(A, which):
        raise ValueError("frame is not stable")
    swapped = swaps_lines(A, which)
    if which == GALOIS:
        return 1 if swapped else 0
    return 2 if swapped else 1


def standard_apartment(F) -> Apartment:
    return Apartment.of((F.one, F.zero), (F.zero, F.one))


def _smith_left(n: np.ndarray):
    """``P`` in GL_2(o) whose columns are adapted to both o^2 and ``n o^2``."""
    F = n.flat[0].field
    r = n.copy()
    P = mx.identity(2, F)
    best = None
    for i, j in itertools.product(range(2), range(2)):
        x = r[i, j]
        if not x.indistinguishable_from_zero() and (best is None or x.valuation < best[0]):
            best = (x.valuation, i, j)
    _, i, j = best
    if i:
        r[[0, 1]] = r[[1, 0]]
        P[:, [0, 1]] = P[:, [1, 0]]
    if j:
        r[:, [0, 1]] = r[:, [1, 0]]
    t = r[1, 0] / r[0, 0]
    r[1] = [x - t * y for x, y in zip(r[1], r[0])]
    P[:, 0] = [x + t * y for x, y in zip(P[:, 0], P[:, 1])]
    return P


def apartment_through(u: TreeVertex, v: TreeVertex) -> Apartment:
    """A frame whose apartment contains ``u`` and ``v``."""
    if u == v:
        raise ValueError("need two distinct vertices")
    n = mx.inverse(u.basis).dot(v.basis)
    P = u.basis.dot(_smith_left(n))
    return Apartment.of(tuple(P[:, 0]), tuple(P[:, 1]))


# -- stable apartment search ----------------------------------------------------


def _digit_sums(F, length: int, zero_top: bool = False):
    """Elements ``sum_{k < length} r_k pi^k`` with a nonzero top digit.

    With ``zero_top`` the top digit may vanish too (all of o / pi^length).
    """
    reps = F.residue_reps()
    pis = [F.uniformizer_power(k) for k in range(length)]
    tops = reps if zero_top else reps[1:]
    for top in tops:
        for lower in itertools.product(reps, repeat=length - 1):
            t = top * pis[length - 1]
            for k, r in enumerate(lower):
                t = t + r * pis[k]
            yield t


def candidate_lines(v: TreeVertex, depth: int):
    """Lines through the lattice of ``v`` first seen at direction depth ``depth``.

    At depth 1 the column ``M (1, 0)`` comes first, so a vertex's own frame
    wins ties; then ``M (t, 1)`` for ``t`` with ``depth`` digits and
    ``M (1, pi s)`` for ``s`` with ``depth - 1`` digits, ``M`` the basis of ``v``.
    """
    F = v.field
    M = v.basis
    if depth == 1:
        yield normalize_line(tuple(M[:, 0]))
    for t in _digit_sums(F, depth, zero_top=depth == 1):
        yield normalize_line(tuple(M.dot(np.array([t, F.one], dtype=object))))
    if depth > 1:
        pi = F.uniformizer
        for s in _digit_sums(F, depth - 1):
            yield normalize_line(tuple(M.dot(np.array([F.one, pi * s], dtype=object))))


def stable_frames(v: TreeVertex, which: str, depth: int):
    """Every stable frame through ``v`` built from candidate lines up to ``depth``.

    Lines moved by the involution are paired with their image; lines it
    fixes are paired with one another.  Frames come out in discovery order,
    shallowest first, possibly with repeats.
    """
    fixed = []
    for r in range(1, depth + 1):
        for line in candidate_lines(v, r):
            img = line_image(line, which)
            if not lines_equal(img, line):
                A = Apartment((line, img))
                if A.contains(v):
                    yield A
                continue
            for other in fixed:
                A = Apartment((other, line))
                if A.contains(v):
                    yield A
            fixed.append(line)


def find_sigma_stable_apartment(
    v: TreeVertex, which: str, radius: int = 3, swapped: bool = False
) -> Apartment | None:
    """First stable frame through ``v`` at direction depth at most ``radius``.

    ``None`` means the search was exhausted at this depth, not that no
    stable apartment exists.  With ``swapped`` only frames whose lines are
    exchanged by the involution are accepted.
    """
    if radius < 0:
        raise ValueError("search radius must be non-negative")
    for A in stable_frames(v, which, radius):
        if not swapped or swaps_lines(A, which):
            return A
    return None


# -- the ramified Galois experiments ---------------------------------------------


@dataclass
class CensusRecord:
    vertex: TreeVertex
    distance: int
    fixed: bool
    neighbor_count: int
    fixed_neighbor_count: int | None = None
    type: str | None = None  # "A": vertex of the k-tree, "B": inside one of its edges

    @property
    def consistent(self) -> bool:
        if not self.fixed:
            return True
        q1 = self.neighbor_count
        if self.type == "A":
            return self.fixed_neighbor_count == q1
        return self.fixed_neighbor_count == 2

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex.to_dict(),
            "distance": self.distance,
            "fixed": self.fixed,
            "neighbors": self.neighbor_count,
            "fixed_neighbors": self.fixed_neighbor_count,
            "type": self.type,
        }


@dataclass
class CensusReport:
    q: int
    radius: int
    records: list

    @property
    def fixed(self) -> list:
        return [r for r in self.records if r.fixed]

    @property
    def all_consistent(self) -> bool:
        return all(r.neighbor_count == self.q + 1 and r.consistent for r in self.records)

    def summary(self) -> dict:
        fx = self.fixed
        return {
            "q": self.q,
            "radius": self.radius,
            "vertices": len(self.records),
            "all_have_q_plus_1_neighbors": all(r.neighbor_count == self.q + 1 for r in self.records),
            "fixed_type_A": sum(r.type == "A" for r in fx),
            "fixed_type_B": sum(r.type == "B" for r in fx),
            "type_A_fixed_neighbor_counts": sorted({r.fixed_neighbor_count for r in fx if r.type == "A"}),
            "type_B_fixed_neighbor_counts": sorted({r.fixed_neighbor_count for r in fx if r.type == "B"}),
            "consistent": self.all_consistent,
        }


def _require_ramified(ext):
    if not getattr(ext, "ramified", False):
        raise ValueError("this experiment needs a ramified quadratic extension")


def fixed_point_census(radius: int, ext) -> CensusReport:
    """Neighbor counts of Galois-fixed vertices within ``radius`` of the base vertex.

    A fixed vertex at even distance is expected to have all ``q + 1``
    neighbors fixed (type A), one at odd distance exactly two (type B).
    """
    _require_ramified(ext)
    records = []
    for v, d in ball(base_vertex(ext), radius):
        nb = neighbors(v)
        fixed = sigma_galois(v) == v
        rec = CensusRecord(v, d, fixed, len(nb))
        if fixed:
            rec.fixed_neighbor_count = sum(sigma_galois(w) == w for w in nb)
            rec.type = "A" if d % 2 == 0 else "B"
        records.append(rec)
    return CensusReport(ext.q, radius, records)


@dataclass
class CounterexampleReport:
    vertex: TreeVertex
    radius: int
    apartments: list  # (Apartment, pointwise_fixed)

    @property
    def all_pointwise_fixed(self) -> bool:
        return all(fx for _, fx in self.apartments)

    @property
    def verdict(self) -> str:
        if not self.apartments:
            return "no stable apartment found"
        return "all pointwise fixed" if self.all_pointwise_fixed else "non-fixed stable apartment found"

    def to_dict(self) -> dict:
        return {
            "vertex": self.vertex.to_dict(),
            "radius": self.radius,
            "apartments_examined": len(self.apartments),
            "apartments": [
                {"frame": [[str(x) for x in l] for l in A.lines], "pointwise_fixed": fx}
                for A, fx in self.apartments
            ],
            "verdict": self.verdict,
        }


def counterexample_check(radius: int, ext, vertex: TreeVertex | None = None) -> CounterexampleReport:
    """Every Galois-stable frame through ``vertex`` (default: base) found at depth ``radius``,
    with whether the involution fixes each of its vertices within ``radius``."""
    _require_ramified(ext)
    if radius < 2:
        raise ValueError("radius must be at least 2")
    v = vertex if vertex is not None else base_vertex(ext)
    found = []
    for A in stable_frames(v, GALOIS, radius):
        if any(A.same_as(B) for B, _ in found):
            continue
        pts = A.vertices_near(v, radius)
        found.append((A, all(sigma_galois(w) == w for w in pts)))
    return CounterexampleReport(v, radius, found)
