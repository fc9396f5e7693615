"""The acceptance suite: ten checks, each returning a pass/fail record.

Every check takes a ``seed`` and an optional ``trials`` override.  With the
override below the default count the check runs in smoke mode: random
trials are cut to ``trials`` and the tree sweeps shrink to radius 2.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import galois as gl
from . import lattice as la
from . import matrix as mx
from . import orthsym as os_
from . import tree
from .padic import PrimeConfig, SquareClass, hilbert
from .qforms import j_representatives

ORTH_SIZES = (2, 3, 4)
ORTH_PRIMES = (3, 5, 7, 13)
GALOIS_PRIMES = (3, 5)
FLAVORS = (SquareClass.Xi, SquareClass.Pi, SquareClass.XiPi)
RAMIFIED = (SquareClass.Pi, SquareClass.XiPi)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:2d} {self.name} ({self.seconds:.2f} s)"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
        }


def _rngs(seed: int, tag: int, count: int):
    ss = np.random.SeedSequence([seed, tag])
    return [np.random.default_rng(s) for s in ss.spawn(count)]


def _count(trials, default):
    return default if trials is None else min(trials, default)


def _smoke(trials, default) -> bool:
    return trials is not None and trials < default


# -- oracles ---------------------------------------------------------------------


def hilbert_by_search(a: int, b: int, p: int) -> int:
    """+1 iff z^2 = a x^2 + b y^2 has a nonzero p-adic solution.

    Needs ``v(a), v(b) <= 1``.  A primitive solution has gradient valuation
    at most 1, so a primitive solution mod p^3 with gradient valuation <= 1
    lifts by Hensel's lemma; conversely every true solution reduces to one.
    Scaling makes one coordinate equal 1, leaving a p^6 grid per case.
    """
    m = p**3
    r = np.arange(m, dtype=np.int64)
    s, t = np.meshgrid(r, r, indexing="ij")

    def val(x):  # valuation capped at 3
        return sum((x % p**k == 0).astype(np.int64) for k in (1, 2, 3))

    va, vb = _v(a, p), _v(b, p)
    # (z, x, y) with one coordinate pinned to 1
    for z, x, y in ((np.ones_like(s), s, t), (s, np.ones_like(s), t), (s, t, np.ones_like(s))):
        eq = (z * z - a * x * x - b * y * y) % m == 0
        grad = np.minimum(val(z % m), np.minimum(va + val(x % m), vb + val(y % m)))
        if np.any(eq & (grad <= 1)):
            return 1
    return -1


def _v(a: int, p: int) -> int:
    k = 0
    while a % p == 0:
        a //= p
        k += 1
    return k


# -- the criteria ----------------------------------------------------------------


def c1_j_sets(seed: int = 0, trials=None) -> CriterionResult:
    X, P, XP, O = SquareClass.Xi, SquareClass.Pi, SquareClass.XiPi, SquareClass.One
    expected = {
        5: {(O, O), (X, X), (P, P), (XP, XP)},
        13: {(O, O), (X, X), (P, P), (XP, XP)},
        3: {(O, O), (X, X)},
        7: {(O, O), (X, X)},
    }
    t = time.perf_counter()
    got = {p: set(j_representatives(2, PrimeConfig(p))) for p in expected}
    dt = time.perf_counter() - t
    ok = all(got[p] == expected[p] for p in expected) and dt < 1.0
    detail = {str(p): sorted(",".join(c.label() for c in cls) for cls in got[p]) for p in got}
    return CriterionResult(1, "J-set reproduction", ok, detail, dt)


def c2_galois_classes(seed: int = 0, trials=None) -> CriterionResult:
    t = time.perf_counter()
    counts = {n: len(gl.cocycle_classes(n)) for n in range(1, 9)}
    count_ok = all(counts[n] == n // 2 + 1 for n in counts)
    bad = []
    for p in GALOIS_PRIMES:
        for d in FLAVORS:
            ext = gl.QuadExt(PrimeConfig(p), d)
            for n in range(1, 9):
                for i in range(n // 2 + 1):
                    u = gl.u_witness(n, i, ext)
                    if not mx.agree(mx.inverse(u).dot(gl.sigma(u)), gl.tau(n, i, ext), ext.precision):
                        bad.append((p, d.name, n, i))
    dt = time.perf_counter() - t
    ok = count_ok and not bad and dt < 1.0
    return CriterionResult(
        2, "Galois cocycle class count", ok, {"counts": counts, "u_witness_failures": bad}, dt
    )


def c3_cartan_round_trip(seed: int = 0, trials=None) -> CriterionResult:
    count = _count(trials, 1000)
    t = time.perf_counter()
    failures = []
    configs = list(itertools.product(ORTH_SIZES, ORTH_PRIMES))
    for (n, p), rng in zip(configs, _rngs(seed, 3, len(configs))):
        cfg = PrimeConfig(p, 40)
        for k in range(count):
            g = os_.random_gl(cfg, n, rng, -3, 3)
            try:
                checks = os_.verify(os_.cartan_factor(g), g)
            except ArithmeticError as e:
                failures.append({"n": n, "p": p, "trial": k, "error": str(e)})
                continue
            if not all(checks.values()):
                failures.append({"n": n, "p": p, "trial": k, "checks": checks})
    dt = time.perf_counter() - t
    ok = not failures and dt < 60.0
    detail = {"trials_per_config": count, "failures": failures[:10], "failure_count": len(failures)}
    return CriterionResult(3, "Cartan round trip", ok, detail, dt)


def c4_bi_invariance(seed: int = 0, trials=None) -> CriterionResult:
    count = _count(trials, 1000)
    t = time.perf_counter()
    (rng,) = _rngs(seed, 4, 1)
    configs = list(itertools.product(ORTH_SIZES, ORTH_PRIMES))
    failures = []
    for k in range(count):
        n, p = configs[k % len(configs)]
        cfg = PrimeConfig(p, 40)
        g = os_.random_gl(cfg, n, rng, -3, 3)
        h = os_.random_orthogonal(cfg, n, rng)
        kappa = os_.random_K(cfg, n, rng)
        try:
            same = os_.classify(h.dot(g).dot(kappa)) == os_.classify(g)
        except ArithmeticError as e:
            failures.append({"n": n, "p": p, "trial": k, "error": str(e)})
            continue
        if not same:
            failures.append({"n": n, "p": p, "trial": k})
    dt = time.perf_counter() - t
    detail = {"trials": count, "failures": failures[:10], "failure_count": len(failures)}
    return CriterionResult(4, "Classifier bi-invariance", not failures, detail, dt)


def random_form(cfg: PrimeConfig, n: int, rng, kind: str) -> np.ndarray:
    """Exact symmetric Gram matrix: ``full`` rank, ``degenerate`` (rank < n) or ``zero``."""
    from fractions import Fraction

    if kind == "zero":
        return mx.zeros(n, cfg)
    r = n if kind == "full" else int(rng.integers(1, n))
    p = cfg.p
    C = [[Fraction(int(x)) for x in rng.integers(-2 * p, 2 * p + 1, size=n)] for _ in range(n)]
    d = [
        Fraction(int(rng.integers(1, p * p))) * Fraction(p) ** int(rng.integers(-1, 2))
        for _ in range(r)
    ] + [Fraction(0)] * (n - r)
    rows = [[sum(C[k][i] * d[k] * C[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    return mx.from_entries(rows, cfg)


def c5_hilbert_and_lattices(seed: int = 0, trials=None) -> CriterionResult:
    t = time.perf_counter()
    mismatches = []
    for p in (3, 5, 7):
        cfg = PrimeConfig(p)
        for a, b in itertools.product(SquareClass, repeat=2):
            ai, bi = a.rep_int(cfg), b.rep_int(cfg)
            if hilbert(cfg(ai), cfg(bi)) != hilbert_by_search(ai, bi, p):
                mismatches.append((p, a.name, b.name))
    count = _count(trials, 1000)
    (rng,) = _rngs(seed, 5, 1)
    kinds = ("full", "degenerate", "zero")
    failures = []
    for k in range(count):
        p = (3, 5, 7)[k % 3]
        cfg = PrimeConfig(p, 40)
        n = int(rng.integers(2, 5))
        kind = kinds[(k // 3) % 3]
        B = random_form(cfg, n, rng, kind)
        L = os_.random_gl(cfg, n, rng, -2, 2)
        try:
            L2 = la.orthogonalize_lattice(B, L)
            ok = la.gram_is_diagonal(la.gram(B, L2)) and la.hnf(L2) == la.hnf(L)
        except ArithmeticError as e:
            failures.append({"trial": k, "p": p, "n": n, "kind": kind, "error": str(e)})
            continue
        if not ok:
            failures.append({"trial": k, "p": p, "n": n, "kind": kind})
    dt = time.perf_counter() - t
    detail = {
        "hilbert_mismatches": mismatches,
        "lattice_trials": count,
        "lattice_failures": failures[:10],
        "lattice_failure_count": len(failures),
    }
    return CriterionResult(5, "Hilbert symbol and lattice orthogonalization", not mismatches and not failures, detail, dt)


def c6_galois_round_trip(seed: int = 0, trials=None) -> CriterionResult:
    count = _count(trials, 500)
    t = time.perf_counter()
    configs = list(itertools.product(GALOIS_PRIMES, FLAVORS))
    failures = []
    classes = {}
    for (p, d), rng in zip(configs, _rngs(seed, 6, len(configs))):
        ext = gl.QuadExt(PrimeConfig(p), d)
        for k in range(count):
            g = gl.random_gl(ext, 2, rng)
            try:
                fac = gl.factor_n2(g)
                checks = gl.verify_factorization(fac, g)
            except (ArithmeticError, tree.SearchExhausted) as e:
                failures.append({"field": ext.label(), "trial": k, "error": str(e)})
                continue
            classes[fac.i] = classes.get(fac.i, 0) + 1
            if not all(checks.values()):
                failures.append({"field": ext.label(), "trial": k, "checks": checks})
    dt = time.perf_counter() - t
    ok = not failures and dt < 60.0
    detail = {
        "trials_per_field": count,
        "class_histogram": {str(i): c for i, c in sorted(classes.items())},
        "failures": failures[:10],
        "failure_count": len(failures),
    }
    return CriterionResult(6, "Galois factorization round trip", ok, detail, dt)


def c7_census(seed: int = 0, trials=None) -> CriterionResult:
    radius = 2 if _smoke(trials, 1000) else 4
    t = time.perf_counter()
    ext = gl.QuadExt(PrimeConfig(3), SquareClass.Pi)
    rep = tree.fixed_point_census(radius, ext)
    s = rep.summary()
    dt = time.perf_counter() - t
    ok = (
        s["all_have_q_plus_1_neighbors"]
        and ext.q + 1 == 4
        and s["type_A_fixed_neighbor_counts"] == [4]
        and s["type_B_fixed_neighbor_counts"] in ([2], [])
        and s["consistent"]
    )
    return CriterionResult(7, "Tree census", ok, s, dt)


def _sweep_fields():
    for p in GALOIS_PRIMES:
        yield PrimeConfig(p), tree.TRANSPOSE
        for d in RAMIFIED:
            yield gl.QuadExt(PrimeConfig(p), d), tree.GALOIS


def c8_stable_apartments(seed: int = 0, trials=None) -> CriterionResult:
    radius = 2 if _smoke(trials, 1000) else 4
    t = time.perf_counter()
    rows = []
    ok = True
    for F, which in _sweep_fields():
        n = miss = 0
        for v, _ in tree.ball(tree.base_vertex(F), radius):
            n += 1
            A = tree.find_sigma_stable_apartment(v, which, 3)
            if A is None or not tree.is_sigma_stable(A, which) or not A.contains(v):
                miss += 1
        rows.append({"field": _field_label(F), "involution": which, "vertices": n, "not_found": miss})
        ok = ok and miss == 0
    dt = time.perf_counter() - t
    return CriterionResult(8, "Stable apartments through every vertex", ok, {"radius": radius, "sweeps": rows}, dt)


def _field_label(F) -> str:
    return F.label() if hasattr(F, "label") else f"Q_{F.p}"


def c9_counterexample(seed: int = 0, trials=None) -> CriterionResult:
    radius = 2 if _smoke(trials, 1000) else 3
    t = time.perf_counter()
    ext = gl.QuadExt(PrimeConfig(3), SquareClass.Pi)
    rep = tree.counterexample_check(3, ext)
    rows = []
    split_ok = True
    for p in GALOIS_PRIMES:
        F = PrimeConfig(p)
        n = miss = 0
        for v, _ in tree.ball(tree.base_vertex(F), radius):
            n += 1
            A = tree.find_sigma_stable_apartment(v, tree.TRANSPOSE, 3, swapped=True)
            if A is None or not tree.swaps_lines(A, tree.TRANSPOSE) or not A.contains(v):
                miss += 1
        rows.append({"p": p, "vertices": n, "without_swapped_frame": miss})
        split_ok = split_ok and miss == 0
    dt = time.perf_counter() - t
    ok = rep.verdict == "all pointwise fixed" and split_ok
    detail = {
        "ramified_verdict": rep.verdict,
        "apartments_examined": len(rep.apartments),
        "split_transpose": rows,
    }
    return CriterionResult(9, "Counterexample at the base vertex", ok, detail, dt)


def c10_coboundary(seed: int = 0, trials=None) -> CriterionResult:
    count = _count(trials, 500)
    t = time.perf_counter()
    exts = [gl.QuadExt(PrimeConfig(p), d) for p in GALOIS_PRIMES for d in FLAVORS]
    classes = [(n, i) for n in range(1, 7) for i in range(n // 2 + 1)]
    failures = []
    for (n, i), rng in zip(classes, _rngs(seed, 10, len(classes))):
        for k in range(count):
            ext = exts[k % len(exts)]
            c = gl.random_cocycle(ext, n, i, rng)
            nu = gl.solve_coboundary(c, i)
            back = mx.inverse(nu).dot(gl.tau(n, i, ext)).dot(gl.sigma(nu))
            if not mx.agree(back, c, mx.min_absprec(c) - 5):
                failures.append({"n": n, "i": i, "field": ext.label(), "trial": k})
    dt = time.perf_counter() - t
    detail = {"trials_per_class": count, "classes": len(classes), "failures": failures[:10], "failure_count": len(failures)}
    return CriterionResult(10, "Coboundary solver", not failures, detail, dt)


CRITERIA = (
    c1_j_sets,
    c2_galois_classes,
    c3_cartan_round_trip,
    c4_bi_invariance,
    c5_hilbert_and_lattices,
    c6_galois_round_trip,
    c7_census,
    c8_stable_apartments,
    c9_counterexample,
    c10_coboundary,
)


def run_all(seed: int = 0, trials=None, only=None, log=None) -> list[CriterionResult]:
    out = []
    for k, fn in enumerate(CRITERIA, start=1):
        if only and k not in only:
            continue
        res = fn(seed, trials)
        if log:
            log(res.line())
        out.append(res)
    return out
