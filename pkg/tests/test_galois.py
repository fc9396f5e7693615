import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from symspace import matrix as mx
from symspace.galois import (
    QuadExt,
    cocycle_class,
    cocycle_classes,
    embed,
    factor_n2,
    in_O,
    is_cocycle,
    random_cocycle,
    random_gl,
    random_monomial,
    sigma,
    solve_coboundary,
    tau,
    u_witness,
    verify_factorization,
)
from symspace.padic import PrimeConfig, SquareClass

FLAVORS = [SquareClass.Xi, SquareClass.Pi, SquareClass.XiPi]
EXTS = [QuadExt(PrimeConfig(p), d) for p in (3, 5) for d in FLAVORS]
seeds = st.integers(0, 2**32 - 1)
exts = st.sampled_from(EXTS)


def rational(ext, rows):
    return embed(mx.from_entries(rows, ext.base), ext)


def test_extension_basics():
    E = QuadExt(PrimeConfig(5), SquareClass.Xi)
    assert not E.ramified and E.q == 25 and E.delta_int == 2
    R = QuadExt(PrimeConfig(3), SquareClass.Pi)
    assert R.ramified and R.q == 3
    assert R.sqrt_delta.valuation == 1 and R(3).valuation == 2
    assert E.sqrt_delta.valuation == 0 and E(5).valuation == 1
    with pytest.raises(ValueError):
        QuadExt(PrimeConfig(5), SquareClass.One)


@settings(max_examples=50, deadline=None)
@given(seed=seeds, ext=exts)
def test_field_arithmetic(seed, ext):
    rng = np.random.default_rng(seed)
    a = ext.random_element(rng, -2, 2)
    b = ext.random_element(rng, -2, 2)
    assert (a * a.inverse()).agrees(ext.one, ext.precision - 10)
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a * b).valuation == a.valuation + b.valuation
    assert a.norm().agrees((a * a.conj()).x, ext.base.precision - 10)


def test_sigma_examples():
    E = EXTS[1]
    g = rational(E, [[1, 2], [3, 4]])
    assert mx.agree(sigma(g), g, E.precision)
    s = mx.diag([E.sqrt_delta] * 2, E)
    assert mx.agree(sigma(s), mx.diag([-E.sqrt_delta] * 2, E), E.precision)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, ext=exts)
def test_sigma_involutive_and_multiplicative(seed, ext):
    rng = np.random.default_rng(seed)
    m, n = random_gl(ext, 2, rng), random_gl(ext, 2, rng)
    assert mx.agree(sigma(sigma(m)), m, mx.min_absprec(m))
    mn = m.dot(n)
    assert mx.agree(sigma(mn), sigma(m).dot(sigma(n)), mx.min_absprec(mn))


def test_cocycle_examples():
    E = QuadExt(PrimeConfig(5), SquareClass.Xi)
    assert is_cocycle(mx.identity(2, E)) and cocycle_class(mx.identity(2, E)).i == 0
    assert is_cocycle(tau(2, 1, E)) and cocycle_class(tau(3, 1, E)).i == 1
    r = E.sqrt_delta
    c = (E.one + r) / (E.one - r)
    assert is_cocycle(mx.diag([c, E.one], E))
    with pytest.raises(ValueError):
        is_cocycle(mx.from_entries([[1, 1], [0, 1]], E))


@settings(max_examples=60, deadline=None)
@given(seed=seeds, ext=exts, n=st.integers(1, 6), data=st.data())
def test_cocycle_class_is_cohomology_invariant(seed, ext, n, data):
    i = data.draw(st.integers(0, n // 2))
    rng = np.random.default_rng(seed)
    c = random_cocycle(ext, n, i, rng)
    assert is_cocycle(c) and cocycle_class(c).i == i
    nu = random_monomial(ext, n, rng)
    c2 = mx.inverse(nu).dot(c).dot(sigma(nu))
    assert cocycle_class(c2).i == i


def test_class_count():
    for n in range(1, 9):
        assert len(cocycle_classes(n)) == n // 2 + 1


def test_u_witness_examples():
    E = QuadExt(PrimeConfig(5), SquareClass.Xi)
    assert mx.agree(u_witness(3, 0, E), mx.identity(3, E), E.precision)
    u = u_witness(2, 1, E)
    r = E.sqrt_delta
    assert mx.agree(u, mx.from_entries([[r, -r], [E.one, E.one]], E), E.precision)
    assert mx.det(u).agrees(2 * r, E.precision)
    assert mx.agree(mx.inverse(u).dot(sigma(u)), tau(2, 1, E), E.precision - 2)


@pytest.mark.parametrize("ext", EXTS, ids=lambda e: e.label())
def test_u_witness_all_sizes(ext):
    for n in range(1, 9):
        for i in range(n // 2 + 1):
            u = u_witness(n, i, ext)
            assert mx.agree(mx.inverse(u).dot(sigma(u)), tau(n, i, ext), ext.precision)


def test_coboundary_examples():
    E = EXTS[2]
    nu = solve_coboundary(mx.identity(2, E), 0)
    assert mx.agree(nu, mx.diag([E(2), E(2)], E), E.precision)
    nu = solve_coboundary(mx.diag([-E.one], E), 0)
    assert mx.agree(nu, mx.diag([E.sqrt_delta], E), E.precision)
    with pytest.raises(ValueError):
        solve_coboundary(tau(2, 1, E), 0)


@settings(max_examples=150, deadline=None)
@given(seed=seeds, ext=exts, n=st.integers(1, 6), data=st.data())
def test_coboundary_round_trip(seed, ext, n, data):
    i = data.draw(st.integers(0, n // 2))
    c = random_cocycle(ext, n, i, np.random.default_rng(seed))
    nu = solve_coboundary(c, i)
    assert mx.is_monomial(nu)
    back = mx.inverse(nu).dot(tau(n, i, ext)).dot(sigma(nu))
    assert mx.agree(back, c, mx.min_absprec(c) - 5)


def test_in_O_examples():
    E = EXTS[4]
    rng = np.random.default_rng(5)
    assert in_O(rational(E, [[1, 2], [3, 4]]))
    assert in_O(u_witness(2, 1, E))
    h = rational(E, [[2, 1], [7, 3]])
    z = mx.diag([E.random_element(rng, -1, 1), E.random_element(rng, -1, 1)], E)
    assert in_O(h.dot(u_witness(2, 1, E)).dot(z))
    assert not in_O(mx.from_entries([[E.one, E.sqrt_delta], [E.zero, E.one]], E))


def test_factor_rational_input():
    for E in EXTS:
        g = rational(E, [[2, 1], [1, 5]])
        fac = factor_n2(g)
        assert fac.i == 0
        assert all(verify_factorization(fac, g).values())


def test_factor_u_witness_times_diagonal():
    for E in EXTS[3:]:  # p = 5, so diag(5, 1) leaves K
        g = u_witness(2, 1, E).dot(mx.diag([E(5), E.one], E))
        fac = factor_n2(g)
        assert fac.i == 1
        assert all(verify_factorization(fac, g).values())


def test_class_index_not_unique_when_unramified():
    # u_1 lies in GL_2(o') when sqrt(delta) is a unit, so u_1 = 1 * 1 * u_1 has i = 0
    E = EXTS[0]
    g = u_witness(2, 1, E)
    fac = factor_n2(g)
    assert fac.i == 0
    assert all(verify_factorization(fac, g).values())


@settings(max_examples=120, deadline=None)
@given(seed=seeds, ext=exts)
def test_factor_round_trip(seed, ext):
    g = random_gl(ext, 2, np.random.default_rng(seed))
    fac = factor_n2(g)
    checks = verify_factorization(fac, g)
    assert all(checks.values()), checks


def test_factor_rejects_other_sizes():
    with pytest.raises(ValueError):
        factor_n2(mx.identity(3, EXTS[0]))
