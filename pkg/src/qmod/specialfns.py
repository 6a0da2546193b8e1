"""Scalar special functions used by every other module.

Bernoulli numbers (exact-rational Akiyama-Tanigawa, exported as floats),
the exponential-remainder kernel ``fn_B``, the cotangent remainder
``fn_f``, principal-branch log-Gamma and digamma, and a dilogarithm
covering the whole complex plane through its functional equations.

All branches are principal: ``Im log`` lies in (-pi, pi], and inputs on
the dilogarithm's cut [1, oo) evaluate the limit from the upper
half-plane.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import scipy.special as _sp

from ._stability import cot as _cot
from ._stability import inv_expm1 as _inv_expm1
from .errors import DomainError

TWO_PI = 2.0 * math.pi
PI_SQ_OVER_6 = math.pi * math.pi / 6.0

#: switch to the defining series once the exponential's argument is this small
SERIES_RADIUS = 0.5
#: raise rather than evaluate within this distance of a (non-removable) pole
POLE_GUARD = 1e-12
#: highest supported half-index for the Bernoulli table
BERNOULLI_CAP = 200

_TERM_EPS = 1e-18


@dataclass(frozen=True)
class BernoulliTable:
    """Even-index Bernoulli numbers B_2, B_4, ..., B_{2*max_index}."""

    values: tuple[float, ...]

    @property
    def max_index(self) -> int:
        return len(self.values)

    def b2(self, n: int) -> float:
        """Return B_{2n} (1-based: b2(1) = B_2 = 1/6)."""
        return self.values[n - 1]


# Exact rationals B_0, B_1, B_2, ... in the B_1 = +1/2 convention the
# Akiyama-Tanigawa recurrence produces; odd indices > 1 are zero.  The
# working row is kept so the cache can grow incrementally.
_bern_fractions: list[Fraction] = []
_at_row: list[Fraction] = []
_b2_floats: list[float] = []  # B_2, B_4, ... as floats, grown on demand


def _extend_fractions(upto: int) -> None:
    while len(_bern_fractions) <= upto:
        m = len(_bern_fractions)
        _at_row.append(Fraction(1, m + 1))
        for j in range(m, 0, -1):
            _at_row[j - 1] = j * (_at_row[j - 1] - _at_row[j])
        _bern_fractions.append(_at_row[0])


def bernoulli(max_index: int) -> BernoulliTable:
    """Bernoulli numbers B_2 ... B_{2*max_index} as a table of floats.

    Parameters
    ----------
    max_index : int
        Number of even-index values to produce, at most ``BERNOULLI_CAP``.

    Raises
    ------
    DomainError
        If ``max_index`` is not a positive integer within the cap.
    OverflowError
        If a requested value exceeds the double-precision range
        (first happens at B_260, i.e. max_index >= 130).
    """
    if not isinstance(max_index, int) or max_index < 1:
        raise DomainError("max_index must be a positive integer")
    if max_index > BERNOULLI_CAP:
        raise DomainError(f"max_index {max_index} exceeds cap {BERNOULLI_CAP}")
    _extend_fractions(2 * max_index)
    while len(_b2_floats) < max_index:
        n = len(_b2_floats) + 1
        _b2_floats.append(float(_bern_fractions[2 * n]))
    return BernoulliTable(tuple(_b2_floats[:max_index]))


def _b2(n: int) -> float:
    """B_{2n} as a float, for internal series (n modest, well below overflow)."""
    if len(_b2_floats) < n:
        bernoulli(n)
    return _b2_floats[n - 1]


def _bn_float(n: int) -> float:
    """B_n in the B_1 = -1/2 convention, for the dilogarithm expansion."""
    if n == 0:
        return 1.0
    if n == 1:
        return -0.5
    if n % 2:
        return 0.0
    return _b2(n // 2)


def fn_B(t: complex) -> complex:
    """The kernel 1/(e^{2 pi t} - 1) - 1/(2 pi t) + 1/2.

    Odd, with a removable singularity at 0 (handled by the Bernoulli
    series for |2 pi t| < 1/2) and simple poles at t in i*Z \\ {0}.
    """
    t = complex(t)
    k = round(t.imag)
    if k != 0 and abs(t - 1j * k) < POLE_GUARD:
        raise DomainError(f"fn_B pole at t = {1j * k}")
    w = TWO_PI * t
    if abs(w) < SERIES_RADIUS:
        return _fn_B_series(w)
    return _inv_expm1(w) - 1.0 / w + 0.5


def _fn_B_series(w: complex) -> complex:
    # sum_{m>=1} B_{2m} w^{2m-1} / (2m)!
    total = 0.0 + 0.0j
    power = w
    w2 = w * w
    for m in range(1, 40):
        term = _b2(m) * power / math.factorial(2 * m)
        total += term
        if abs(term) < _TERM_EPS:
            break
        power *= w2
    return total


def fn_f(t: complex) -> complex:
    """cot(t/2) - 2/t, the cotangent remainder.

    Odd, removable at 0, simple poles at 2 pi k for nonzero integer k.
    Related to :func:`fn_B` by f(t) = 2i B(it / 2 pi).
    """
    t = complex(t)
    k = round(t.real / TWO_PI)
    if k != 0 and abs(t - TWO_PI * k) < POLE_GUARD:
        raise DomainError(f"fn_f pole at t = {TWO_PI * k}")
    if abs(t) < SERIES_RADIUS:
        # 2 sum_{n>=1} (-1)^n B_{2n} t^{2n-1} / (2n)!
        total = 0.0 + 0.0j
        power = t
        t2 = t * t
        sign = -1.0
        for n in range(1, 40):
            term = 2.0 * sign * _b2(n) * power / math.factorial(2 * n)
            total += term
            if abs(term) < _TERM_EPS:
                break
            power *= t2
            sign = -sign
        return total
    return _cot(0.5 * t) - 2.0 / t


def _reject_gamma_pole(z: complex) -> complex:
    z = complex(z)
    if abs(z.imag) < POLE_GUARD:
        r = round(z.real)
        if r <= 0 and abs(z - r) < POLE_GUARD:
            raise DomainError(f"pole at z = {r}")
    return z


def log_gamma(z: complex) -> complex:
    """Principal-branch log Gamma(z), continuous off the cut (-oo, 0]."""
    return complex(_sp.loggamma(_reject_gamma_pole(z)))


def digamma(z: complex) -> complex:
    """Gamma'(z)/Gamma(z)."""
    return complex(_sp.digamma(_reject_gamma_pole(z)))


def dilog(x: complex) -> complex:
    """Dilogarithm Li2(x) = sum_{n>=1} x^n / n^2, analytically continued.

    Principal branch, cut along [1, oo); real inputs on the cut return
    the upper-side limit (Im Li2(x + i0) = pi log x).  Accuracy ~1e-14
    relative; every region reduces to a series with ratio <= 0.55.
    """
    x = complex(x)
    if x == 0:
        return 0.0 + 0.0j
    if x.imag == 0.0 and x.real >= 1.0:
        return _dilog_cut(x.real)
    return _dilog_off_cut(x)


def _dilog_off_cut(x: complex) -> complex:
    a = abs(x)
    if a <= 0.5:
        return _dilog_series(x)
    if a >= 2.0:
        # inversion: Li2(x) = -pi^2/6 - log(-x)^2 / 2 - Li2(1/x)
        lg = cmath.log(-x)
        return -PI_SQ_OVER_6 - 0.5 * lg * lg - _dilog_series(1.0 / x)
    if abs(1.0 - x) <= 0.5:
        # Euler reflection into the series disk around 1
        return (
            PI_SQ_OVER_6
            - cmath.log(x) * cmath.log(1.0 - x)
            - _dilog_series(1.0 - x)
        )
    return _dilog_u_series(x)


def _dilog_cut(x: float) -> complex:
    # real x >= 1: upper-half-plane limit, log(1-x) -> log(x-1) - i pi
    if x == 1.0:
        return complex(PI_SQ_OVER_6)
    if x <= 2.0:
        log1mx = math.log(x - 1.0) - 1j * math.pi
        inner = _dilog_series(1.0 - x) if x <= 1.5 else _dilog_u_series(1.0 - x)
        return PI_SQ_OVER_6 - math.log(x) * log1mx - inner
    lg = math.log(x) - 1j * math.pi  # log(-x) from above
    return -PI_SQ_OVER_6 - 0.5 * lg * lg - _dilog_series(1.0 / x)


def _dilog_series(x: complex) -> complex:
    total = x
    power = x
    for n in range(2, 400):
        power *= x
        term = power / (n * n)
        total += term
        if abs(term) < _TERM_EPS:
            break
    return total


def _dilog_u_series(x: complex) -> complex:
    # Li2(x) = sum_{n>=0} B_n u^{n+1} / (n+1)!  with u = -log(1-x),
    # B_1 = -1/2; converges for |u| < 2 pi (worst case here |u| ~ pi).
    u = -cmath.log(1.0 - x)
    ratio = abs(u) / TWO_PI
    total = 0.0 + 0.0j
    c = u  # u^{n+1} / (n+1)!
    for n in range(0, 400):
        total += _bn_float(n) * c
        # |B_n| <= 4 n! / (2 pi)^n for n >= 2, so this bounds the tail
        if n >= 4 and 4.0 * abs(u) * ratio**n < _TERM_EPS:
            break
        c *= u / (n + 2)
    return total
