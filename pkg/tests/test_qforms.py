import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_lex_witness, class_reps, represents_by_search
from symspace import lattice as la
from symspace import matrix as mx
from symspace.padic import PrimeConfig, SquareClass
from symspace.qforms import (
    DiagonalForm,
    equivalent,
    in_image_iota,
    invariants,
    is_isotropic,
    j_representatives,
    represent_witness,
    represents,
)

F5, F7 = PrimeConfig(5), PrimeConfig(7)
O, X, P, XP = SquareClass


def form(cfg, *a):
    return DiagonalForm.of(cfg, a)


def test_invariant_examples():
    for coeffs in ((1, 1), (2, 2), (5, 5)):
        inv = invariants(form(F5, *coeffs))
        assert (inv.rank, inv.disc, inv.hasse) == (2, O, 1)
    assert invariants(form(F5, 3)).hasse == 1


def test_equivalence_examples():
    f = form(F5, 2, 5, 10)
    assert equivalent(f, f)
    assert equivalent(form(F5, 2, 2), form(F5, 1, 1))
    assert not equivalent(form(F7, 7, 7), form(F7, 1, 1))


def test_isotropy_examples():
    assert is_isotropic(form(F5, 1, -1))
    assert is_isotropic(form(F5, 1, 1, -5))
    assert not is_isotropic(form(F7, 1, 1))
    assert not is_isotropic(form(F5, 3))


def test_represents_examples():
    assert represents(form(F5, 1, 1), F5(5))
    assert not represents(form(F7, 1, 1), F7(7))
    f = form(F7, 3, 14, 21)
    assert represents(f, f.coeffs[0])


def test_represent_witness_examples():
    x = represent_witness(form(F5, 1, 1), 5)
    assert x == [F5(1), F5(2)]
    assert tuple(int(v.lift()) for v in x) == brute_lex_witness([1, 1], 5, 5)
    F = PrimeConfig(3)
    assert represent_witness(form(F, 1), 9)[0] ** 2 == F(9)
    f = form(F, 1, 1, 1)
    assert f(represent_witness(f, 2)).agrees(F(2), 38)
    with pytest.raises(ValueError, match="not represented"):
        represent_witness(form(F7, 1, 1), 7)


def test_in_image_iota_examples():
    assert in_image_iota(form(F5, 1, 1))
    assert in_image_iota(form(F5, 5, 5))
    assert not in_image_iota(form(F7, 7, 7))
    for p in (3, 5, 7, 13):
        cfg = PrimeConfig(p)
        assert not in_image_iota(form(cfg, 1, cfg.xi))


def test_j_representatives_examples():
    assert set(j_representatives(2, F5)) == {(O, O), (X, X), (P, P), (XP, XP)}
    assert set(j_representatives(2, F7)) == {(O, O), (X, X)}
    assert j_representatives(1, F5) == [(O,)]


@pytest.mark.parametrize("p", [3, 5, 7])
def test_represents_matches_search(p):
    cfg = PrimeConfig(p)
    reps = class_reps(p)
    for n in (1, 2, 3):
        for coeffs in itertools.combinations_with_replacement(reps, n):
            f = DiagonalForm.of(cfg, coeffs)
            for c in reps:
                assert represents(f, cfg(c)) == represents_by_search(list(coeffs), c, p), (coeffs, c)


@pytest.mark.parametrize("p", [3, 5, 7])
def test_witness_evaluates_back(p):
    cfg = PrimeConfig(p)
    reps = class_reps(p)
    for n in (1, 2, 3):
        for coeffs in itertools.combinations_with_replacement(reps, n):
            f = DiagonalForm.of(cfg, coeffs)
            for c in reps:
                if represents(f, cfg(c)):
                    x = represent_witness(f, c)
                    assert f(x).agrees(cfg(c), cfg.precision - 4)


@settings(max_examples=500, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.sampled_from([3, 5, 7, 13]), n=st.integers(1, 4))
def test_invariants_survive_congruence(seed, p, n):
    cfg = PrimeConfig(p)
    rng = np.random.default_rng(seed)
    coeffs = [cfg.random_element(rng, -2, 2) for _ in range(n)]
    f = DiagonalForm(tuple(coeffs))
    while True:
        C = mx.from_entries([[cfg.random_element(rng, -1, 2) for _ in range(n)] for _ in range(n)], cfg)
        if not mx.det(C).indistinguishable_from_zero():
            break
    M = C.T.dot(mx.diag(coeffs, cfg)).dot(C)
    _, D = la.diagonalize(M)
    g = DiagonalForm(tuple(D[i, i] for i in range(n)))
    assert invariants(g) == invariants(f)
