"""
Double cosets of the orthogonal group in GL_n(Q_p)
==================================================

Any g in GL_n(Q_p) factors as g = h y s kappa with h orthogonal, kappa in
GL_n(Z_p), s a diagonal of powers of p and y a fixed witness.  The class
of the coset is read off the square classes of an orthogonal basis of the
lattice spanned by the columns of g.
"""

import numpy as np

from symspace import matrix as mx
from symspace import orthsym
from symspace.padic import PrimeConfig
from symspace.qforms import j_representatives

F = PrimeConfig(5, 40)

# the worked 2x2 example
g = mx.from_entries([[1, 2], [2, -1]], F)
fac = orthsym.cartan_factor(g)
print("class:", orthsym.class_labels(fac.cls))
print("valuations of s:", fac.valuation_vector())
print("checks:", orthsym.verify(fac, g))

# a random 3x3 matrix with entries of mixed valuation
rng = np.random.default_rng(7)
g = orthsym.random_gl(F, 3, rng, -2, 2)
fac = orthsym.cartan_factor(g)
print("\nrandom g, class", orthsym.class_labels(fac.cls), "valuations", fac.valuation_vector())
print("recomposes:", mx.agree(fac.product(), g, 20))

# multiplying by orthogonal matrices on the left and integral ones on the right
# does not change the class
h = orthsym.random_orthogonal(F, 3, rng)
k = orthsym.random_gl(F, 3, rng, 0, 0)
print("same class after h g k:", orthsym.classify(h.dot(g).dot(k)) == orthsym.classify(g))

# the classes of the diagonal part: 2 when -1 is not a square, 4 when it is
for p in (5, 7):
    print(f"p={p}:", [orthsym.class_labels(c) for c in j_representatives(2, PrimeConfig(p))])
