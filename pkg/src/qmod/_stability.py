"""Cancellation- and overflow-safe building blocks for complex arithmetic.

Everything here is private to the package.  The two recurring problems
these helpers solve:

* ``e^w - 1`` loses all digits for small ``w`` (the stdlib has no complex
  ``expm1``), and ``1/(e^w - 1)`` overflows long before the quantity it
  feeds becomes negligible;
* products like ``sin(a w) / (e^{i w} - 1)`` pair a hugely growing factor
  with a hugely decaying one.  Rewriting them as differences of single
  exponentials keeps every intermediate bounded whenever the combined
  exponents decay, which is exactly the admissible-cone condition the
  ray sums operate under.
"""

from __future__ import annotations

import cmath

_HALF = 0.5


def cexpm1(w: complex) -> complex:
    """exp(w) - 1 without cancellation near w = 0.

    Uses the identity exp(w) - 1 = 2 exp(w/2) sinh(w/2), accurate for
    all complex w whose result is representable.
    """
    w = complex(w)
    return 2.0 * cmath.exp(0.5 * w) * cmath.sinh(0.5 * w)


def inv_expm1(w: complex) -> complex:
    """1 / (exp(w) - 1), stable for small w and non-overflowing for
    large |Re w|.

    For Re w >= 1/2 the equivalent form exp(-w)/(1 - exp(-w)) is used so
    the intermediate exp never overflows; for Re w <= -1/2 the form
    -1/(1 - exp(w)) avoids cancellation the same way.
    """
    w = complex(w)
    if w.real >= _HALF:
        ew = cmath.exp(-w)
        return ew / (1.0 - ew)
    if w.real <= -_HALF:
        return -1.0 / (1.0 - cmath.exp(w))
    return 1.0 / cexpm1(w)


def sin_ratio(nu: complex, w: complex) -> complex:
    """sin(nu*w) / (exp(i*w) - 1) without overflow.

    Valid wherever the exponents i(nu - 1)w and -i(nu + 1)w both have
    negative real part eventually (the admissible-cone condition); near
    w = 0 the naive form is fine and is used directly.
    """
    if abs(w) * (1.0 + abs(nu)) < 1.0:
        return cmath.sin(nu * w) * inv_expm1(1j * w)
    den = 2j * (1.0 - cmath.exp(-1j * w))
    return (cmath.exp(1j * (nu - 1.0) * w) - cmath.exp(-1j * (nu + 1.0) * w)) / den


def cos_ratio(nu: complex, w: complex) -> complex:
    """cos(nu*w) / (exp(i*w) - 1), same regime as :func:`sin_ratio`."""
    if abs(w) * (1.0 + abs(nu)) < 1.0:
        return cmath.cos(nu * w) * inv_expm1(1j * w)
    den = 2.0 * (1.0 - cmath.exp(-1j * w))
    return (cmath.exp(1j * (nu - 1.0) * w) + cmath.exp(-1j * (nu + 1.0) * w)) / den


def cot(w: complex) -> complex:
    """Complex cotangent that stays finite for large |Im w|.

    Splits on the sign of Im w so the inner exponential always has
    modulus <= 1:  cot w = i(1 + 2/(e^{-2iw} - 1)) for Im w <= 0 and the
    conjugate form otherwise.  Callers are responsible for staying away
    from the poles at pi*k.
    """
    w = complex(w)
    if w.imag <= 0.0:
        return -1j * (1.0 + 2.0 * inv_expm1(-2j * w))
    return 1j * (1.0 + 2.0 * inv_expm1(2j * w))
