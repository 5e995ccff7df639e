"""Floating-point backend shared by every transcendental evaluation.

Double precision (``float``/``complex``) is the default.  Inside a
``working_precision(digits)`` block all helpers return mpmath numbers with
the requested number of significant digits instead.
"""
from __future__ import annotations

import cmath
import contextlib
import math
from fractions import Fraction

import mpmath

_digits: int | None = None

EXTENDED_DIGITS = 34


@contextlib.contextmanager
def working_precision(digits: int | None):
    """Temporarily switch to mpmath arithmetic with ``digits`` digits.

    ``None`` (or any value <= 17) selects plain double precision.
    """
    global _digits
    saved = _digits
    if digits is not None and digits <= 17:
        digits = None
    _digits = digits
    try:
        if digits is None:
            yield
        else:
            with mpmath.workdps(digits):
                yield
    finally:
        _digits = saved


def precision_digits() -> int | None:
    return _digits


def is_extended() -> bool:
    return _digits is not None


def num(x):
    """Convert an exact rational (or int/float) to the working real type."""
    if _digits is None:
        return float(x)
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def cnum(x):
    if _digits is None:
        return complex(x)
    if isinstance(x, Fraction):
        return mpmath.mpc(num(x))
    return mpmath.mpc(x)


def pi():
    return math.pi if _digits is None else +mpmath.pi


def sin(x):
    return math.sin(x) if _digits is None else mpmath.sin(x)


def cos(x):
    return math.cos(x) if _digits is None else mpmath.cos(x)


def sqrt(x):
    if _digits is None:
        return cmath.sqrt(x) if isinstance(x, complex) else math.sqrt(x)
    return mpmath.sqrt(x)


def exp(x):
    if _digits is None:
        return cmath.exp(x) if isinstance(x, complex) else math.exp(x)
    return mpmath.exp(x)


def log(x):
    return math.log(x) if _digits is None else mpmath.log(x)


def sin_pi(theta: Fraction):
    """sin(pi*theta) for exact rational theta, exact at multiples of 1/2."""
    theta = theta - 2 * math.floor(theta / 2)
    if (2 * theta).denominator == 1:
        return num([0, 1, 0, -1][int(2 * theta)])
    return sin(pi() * num(theta))


def phase(theta: Fraction):
    """exp(2*pi*i*theta) with theta reduced modulo 1 before evaluation."""
    theta = theta - math.floor(theta)
    if (4 * theta).denominator == 1:
        return cnum([1, 1j, -1, -1j][int(4 * theta)])
    angle = 2 * pi() * num(theta)
    if _digits is None:
        return complex(math.cos(angle), math.sin(angle))
    return mpmath.mpc(mpmath.cos(angle), mpmath.sin(angle))


def i_power(n: int):
    """i**n exactly."""
    return cnum([1, 1j, -1, -1j][n % 4])


def two_pi_i_power(n: int):
    """(2*pi*i)**n with the power of i kept exact."""
    return i_power(n) * (2 * pi()) ** n


def fsum(values):
    """Correctly rounded real sum (order independent in double precision)."""
    if _digits is None:
        return math.fsum(values)
    return mpmath.fsum(values)


def csum(values):
    """Compensated complex sum: real and imaginary parts summed separately."""
    values = list(values)
    re = fsum(complex(v).real if _digits is None else mpmath.mpc(v).real for v in values)
    im = fsum(complex(v).imag if _digits is None else mpmath.mpc(v).imag for v in values)
    if _digits is None:
        return complex(re, im)
    return mpmath.mpc(re, im)


def to_complex(x) -> complex:
    """Downcast any working number to a Python complex."""
    return complex(x)
