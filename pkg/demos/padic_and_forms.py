"""
p-adic numbers, square classes and diagonal forms
=================================================

Capped-precision arithmetic in Q_5, the four square classes, the Hilbert
symbol and the invariants that decide when two diagonal forms are equivalent.
"""

from symspace.padic import PrimeConfig, hilbert, square_class
from symspace.qforms import DiagonalForm, equivalent, invariants, represent_witness

F = PrimeConfig(5, 20)

# elements carry a valuation, a unit part and a relative precision
x = F(50)
print(x, "valuation", x.valuation)
print("1/3 =", F(1) / F(3))

# subtracting nearly equal numbers leaves an inexact zero
y = F(1) - (F(1) + F(5) ** 20)
print("1 - (1 + 5^20) =", y)

# every nonzero element is a square times 1, xi, p or xi*p
for a in (9, 2, 10, 75):
    print(a, "->", square_class(F(a))[0].label())
cls, root = square_class(F(9))
print("9 =", cls.label(), "*", root.lift(balanced=True), "^2")

# (a, b) = 1 exactly when z^2 = a x^2 + b y^2 has a nonzero solution
print("(2, 5) =", hilbert(F(2), F(5)), " (1, 5) =", hilbert(F(1), F(5)))

# <1, 1> and <2, 3> have the same discriminant class and Hasse invariant
f, g = DiagonalForm.of(F, [1, 1]), DiagonalForm.of(F, [2, 3])
print(invariants(f), invariants(g), "equivalent:", equivalent(f, g))

# a concrete vector with 1*x^2 + 1*y^2 = 5
print("witness for 5:", [int(v.lift(balanced=True)) for v in represent_witness(f, F(5))])
