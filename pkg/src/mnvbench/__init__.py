"""Exact and numerical verification of a blow-up solution of the modified Novikov--Veselov equation."""

from .algebra import GaussRational, Monomial, RationalFn, SparsePoly
from .solution import SolutionBundle, build_solution

__version__ = "0.1.0"

__all__ = ["GaussRational", "Monomial", "RationalFn", "SparsePoly", "SolutionBundle", "build_solution"]
