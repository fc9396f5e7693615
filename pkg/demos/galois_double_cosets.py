"""
Double cosets of GL_2(k) in GL_2(k')
====================================

For a quadratic extension k' = k(sqrt(delta)) each g in GL_2(k') factors as
h u_i z kappa with h rational, z diagonal and kappa integral.  The index i
records how the Galois involution acts on a stable apartment through the
vertex g o'^2.
"""

import numpy as np

from symspace import galois as gl
from symspace import matrix as mx
from symspace.padic import PrimeConfig, SquareClass

E = gl.QuadExt(PrimeConfig(5), SquareClass.Pi)
print(E.label(), "residue field size", E.q)

# a rational matrix lands in the trivial coset
g = mx.from_entries([[E(2), E(1)], [E(7), E(3)]], E)
print("rational g: i =", gl.factor_n2(g).i)

# u_1 diag(5, 1) lands in the other one
g = gl.u_witness(2, 1, E).dot(mx.diag([E(5), E.one], E))
fac = gl.factor_n2(g)
print("u_1 diag(5,1): i =", fac.i, "checks", gl.verify_factorization(fac, g))

# random matrices: the factorization always recomposes
rng = np.random.default_rng(3)
counts = {0: 0, 1: 0}
for _ in range(20):
    g = gl.random_gl(E, 2, rng)
    fac = gl.factor_n2(g)
    assert all(gl.verify_factorization(fac, g).values())
    counts[fac.i] += 1
print("class indices over 20 random g:", counts)

# the cocycle behind it: a monomial c with c sigma(c) = 1 is nu^-1 tau_i sigma(nu)
c = gl.random_cocycle(E, 4, 1, rng)
print("class of a random 4x4 cocycle:", gl.cocycle_class(c).i)
nu = gl.solve_coboundary(c, 1)
lhs = mx.inverse(nu).dot(gl.tau(4, 1, E)).dot(gl.sigma(nu))
print("coboundary solved:", mx.agree(lhs, c, E.precision - 10))
