"""
relconv - relational groupoids, relational Haar systems and their convolution algebras.

This package checks the axioms of finite relational groupoids, reduces
them to their quotient groupoids, classifies relational Haar systems and
computes the convolution product exactly over the Gaussian rationals.
"""

__version__ = "0.1.0"

from relconv.core.convolution import AlgebraElement, convolve, reduce_algebra
from relconv.core.haar import RelationalHaarSystem, RightHaarSystem
from relconv.core.reduction import quotient_groupoid
from relconv.core.relational_groupoid import RelationalGroupoid, check_axioms
from relconv.parser.definition import load_definition, parse_definition

__all__ = [
    "AlgebraElement",
    "RelationalGroupoid",
    "RelationalHaarSystem",
    "RightHaarSystem",
    "__version__",
    "check_axioms",
    "convolve",
    "load_definition",
    "parse_definition",
    "quotient_groupoid",
    "reduce_algebra",
]
