"""
Fixed points on the Bruhat-Tits tree
====================================

Vertices of the tree of PGL_2 are homothety classes of lattices.  Over a
ramified extension the Galois-fixed vertices are the vertices of the tree
over k together with the midpoints of its edges, and every stable
apartment through the base vertex is fixed pointwise.
"""

from symspace import galois as gl
from symspace import matrix as mx
from symspace import tree
from symspace.padic import PrimeConfig, SquareClass

F = PrimeConfig(3)
E = gl.QuadExt(F, SquareClass.Pi)

base = tree.base_vertex(F)
print("neighbors of the base vertex over Q_3:", len(tree.neighbors(base)))
print("ball of radius 3:", len(tree.ball(base, 3)), "vertices")

# which vertices does the Galois involution fix?
rep = tree.fixed_point_census(3, E)
print(rep.summary())

# stable apartments through every vertex near the base
for which, field in ((tree.TRANSPOSE, F), (tree.GALOIS, E)):
    found = all(tree.find_sigma_stable_apartment(v, which, 3) is not None
                for v, _ in tree.ball(tree.base_vertex(field), 2))
    print(which, "stable apartment through every vertex within 2:", found)

# at the base vertex each stable apartment is fixed pointwise ...
print(tree.counterexample_check(3, E).verdict)

# ... but not at a vertex sitting inside an edge of the k-tree
v = tree.canonical(mx.diag([E.sqrt_delta, E.one], E), E)
print(tree.counterexample_check(3, E, v).verdict)
