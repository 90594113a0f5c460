"""Exact complex scalars.

Scalars are Gaussian rationals from sympy's ``QQ_I`` domain; weights of
measures stay ``fractions.Fraction`` and are lifted here when they enter a
convolution.
"""

from fractions import Fraction
from typing import Any, Union

from sympy.polys.domains import QQ, QQ_I  # type: ignore[import-untyped,unused-ignore]

Scalar = Any  # sympy GaussianRational
RationalLike = Union[int, Fraction]

ZERO: Scalar = QQ_I(0, 0)
ONE: Scalar = QQ_I(1, 0)


def _qq(value: RationalLike) -> Any:
    f = Fraction(value)
    return QQ(f.numerator, f.denominator)


def _fraction(q: Any) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def scalar(re: RationalLike = 0, im: RationalLike = 0) -> Scalar:
    """Build re + im*i exactly."""
    return QQ_I(_qq(re), _qq(im))


def parts(z: Scalar) -> tuple[Fraction, Fraction]:
    """Real and imaginary parts as Fractions."""
    return _fraction(z.x), _fraction(z.y)


def conjugate(z: Scalar) -> Scalar:
    return QQ_I(z.x, -z.y)


def is_zero(z: Scalar) -> bool:
    return bool(z == ZERO)


def to_complex(z: Scalar) -> complex:
    re, im = parts(z)
    return complex(float(re), float(im))


def format_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def format_scalar(z: Scalar) -> str:
    """Render as "p/q", "p/qi" or "p/q+r/si"."""
    re, im = parts(z)
    if im == 0:
        return format_fraction(re)
    imag = f"{format_fraction(im)}i"
    if re == 0:
        return imag
    sign = "+" if im > 0 else ""
    return f"{format_fraction(re)}{sign}{imag}"
