import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symspace import matrix as mx
from symspace.lattice import in_K
from symspace.orthsym import (
    CartanFactorization,
    anti_dominant_normalize,
    cartan_factor,
    classify,
    is_orthogonal,
    jordan_canonical,
    random_K,
    random_gl,
    random_orthogonal,
    reflection,
    verify,
    witness,
)
from symspace.padic import PrecisionError, PrimeConfig, SquareClass
from symspace.qforms import CLASS_ORDER, j_representatives

O, X, P, XP = SquareClass
F5 = PrimeConfig(5)
seeds = st.integers(0, 2**32 - 1)
primes = st.sampled_from([3, 5, 7, 13])


def ints(m):
    return [[x.lift(balanced=True) for x in row] for row in m]


def test_classify_examples():
    assert classify(mx.identity(3, F5)) == (O, O, O)
    assert classify(mx.diag([F5(5), F5(5)], F5)) == (O, O)
    assert classify(mx.from_entries([[1, 2], [2, -1]], F5)) == (P, P)


def test_witness_examples():
    assert ints(witness((O, O, O), F5)) == ints(mx.identity(3, F5))
    assert ints(witness((P, P), F5)) == [[1, 2], [2, -1]]
    F7 = PrimeConfig(7)
    y = witness((X, X), F7)
    assert F7.xi == 3
    assert mx.agree(y.T.dot(y), mx.diag([F7(3), F7(3)], F7), 38)


def test_witness_rejects_unrealizable():
    with pytest.raises(ValueError, match="discriminant"):
        witness((O, X), F5)


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_witness_exists_exactly_on_J(p):
    cfg = PrimeConfig(p)
    for n in (1, 2, 3):
        J = set(j_representatives(n, cfg))
        for cls in itertools.combinations_with_replacement(CLASS_ORDER, n):
            if cls in J:
                y = witness(cls, cfg)
                gram = mx.diag([c.rep(cfg) for c in cls], cfg)
                assert mx.agree(y.T.dot(y), gram, cfg.precision - 6)
            else:
                with pytest.raises(ValueError):
                    witness(cls, cfg)


@pytest.mark.parametrize("p", [3, 5, 7, 13])
def test_classify_of_witness(p):
    # classify returns the Jordan-canonical label of the double coset
    cfg = PrimeConfig(p)
    for n in (1, 2, 3, 4):
        for cls in j_representatives(n, cfg):
            assert classify(witness(cls, cfg)) == jordan_canonical(cls)


def test_xi_pair_is_identity_coset():
    # <xi, xi> and <1, 1> are isometric over o, so both witnesses share a double coset
    for p in (3, 7):
        cfg = PrimeConfig(p)
        assert jordan_canonical((X, X)) == (O, O)
        assert classify(witness((X, X), cfg)) == classify(mx.identity(2, cfg))


def test_n2_realizable_count():
    for p, count in ((5, 4), (13, 4), (3, 2), (7, 2)):
        assert len(j_representatives(2, PrimeConfig(p))) == count


def test_cartan_identity():
    fac = cartan_factor(mx.identity(3, F5))
    I = ints(mx.identity(3, F5))
    assert ints(fac.h) == I and ints(fac.y) == I and ints(fac.s) == I and ints(fac.kappa) == I
    assert fac.cls == (O, O, O)


def test_cartan_diag_5_1():
    g = mx.diag([F5(5), F5(1)], F5)
    fac = cartan_factor(g)
    assert fac.cls == (O, O)
    assert ints(fac.h) == [[1, 0], [0, 1]]
    assert sorted(fac.valuation_vector()) == [0, 1]
    assert all(verify(fac, g).values())


def test_cartan_worked_example():
    g = mx.from_entries([[1, 2], [2, -1]], F5)
    fac = cartan_factor(g)
    assert fac.cls == (P, P)
    assert all(verify(fac, g).values())


@settings(max_examples=150, deadline=None)
@given(seed=seeds, p=primes, n=st.integers(2, 4))
def test_cartan_round_trip(seed, p, n):
    cfg = PrimeConfig(p, 40)
    g = random_gl(cfg, n, np.random.default_rng(seed), -3, 3)
    fac = cartan_factor(g)
    checks = verify(fac, g)
    assert all(checks.values()), checks
    assert in_K(fac.kappa)


@settings(max_examples=150, deadline=None)
@given(seed=seeds, p=primes, n=st.integers(1, 4))
def test_classify_bi_invariant(seed, p, n):
    cfg = PrimeConfig(p)
    rng = np.random.default_rng(seed)
    g = random_gl(cfg, n, rng, -3, 3)
    h, k = random_orthogonal(cfg, n, rng), random_K(cfg, n, rng)
    assert classify(h.dot(g).dot(k)) == classify(g)


def test_distinct_classes_never_collide():
    # smoke test of injectivity: translates of a witness keep its class
    rng = np.random.default_rng(11)
    for p in (5, 13):
        cfg = PrimeConfig(p)
        reps = [jordan_canonical(c) for c in j_representatives(2, cfg)]
        ys = {c: witness(c, cfg) for c in set(reps)}
        for c1, c2 in itertools.permutations(ys, 2):
            for _ in range(10):
                h, k = random_orthogonal(cfg, 2, rng), random_K(cfg, 2, rng)
                assert classify(h.dot(ys[c1]).dot(k)) != c2


def test_anti_dominant_examples():
    y = witness((P, P), F5)
    s = mx.diag([F5(1), F5(5)], F5)
    fac = CartanFactorization(mx.identity(2, F5), y, s, mx.identity(2, F5), (P, P))
    out = anti_dominant_normalize(fac)
    assert out.valuation_vector() == (1, 0)
    assert all(verify(out, y.dot(s)).values())
    assert anti_dominant_normalize(out) is out


def test_anti_dominant_declines_non_scalar():
    F3 = PrimeConfig(3)
    fac = CartanFactorization(
        mx.identity(3, F3), mx.identity(3, F3), mx.identity(3, F3), mx.identity(3, F3), (O, X, X)
    )
    with pytest.raises(ValueError, match="not normalizable"):
        anti_dominant_normalize(fac)


def test_reflection_in_e1():
    r = reflection([1, 0, 0], F5)
    assert ints(r) == [[-1, 0, 0], [0, 1, 0], [0, 0, 1]]


@settings(max_examples=60, deadline=None)
@given(seed=seeds, p=primes, n=st.integers(1, 4))
def test_random_orthogonal(seed, p, n):
    cfg = PrimeConfig(p)
    h = random_orthogonal(cfg, n, np.random.default_rng(seed))
    assert is_orthogonal(h)
    d = mx.det(h)
    assert d.agrees(cfg.one, 30) or d.agrees(-cfg.one, 30)


def test_classify_needs_enough_digits():
    # g.T g only known mod p^2 but with Jordan scale 4: class not determined
    cfg = PrimeConfig(5, 4)
    g = mx.diag([cfg(1), cfg(25)], cfg)
    g[0, 1] = cfg.inexact_zero(2)
    with pytest.raises(PrecisionError):
        classify(g)
