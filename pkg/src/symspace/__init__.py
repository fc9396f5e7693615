"""Double cosets of p-adic symmetric spaces with exact capped-precision arithmetic.

Modules: ``padic`` (Q_p and square classes), ``qforms`` (diagonal forms),
``lattice`` (o-lattices), ``orthsym`` (O_n double cosets in GL_n),
``galois`` (GL_n(k) double cosets in GL_n(k')), ``tree`` (the Bruhat-Tits
tree of PGL_2), ``acceptance`` and ``cli``.
"""

from .padic import PAdicNumber, PrecisionError, PrimeConfig, SquareClass, hilbert
from .orthsym import CartanFactorization, cartan_factor, classify, witness
from .galois import GaloisFactorization, QuadExt, factor_n2, solve_coboundary
from .tree import SearchExhausted

__version__ = "0.1.0"

__all__ = [
    "PAdicNumber",
    "PrecisionError",
    "PrimeConfig",
    "SquareClass",
    "hilbert",
    "CartanFactorization",
    "cartan_factor",
    "classify",
    "witness",
    "GaloisFactorization",
    "QuadExt",
    "factor_n2",
    "solve_coboundary",
    "SearchExhausted",
]
