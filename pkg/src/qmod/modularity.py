"""Executable forms of the transformation laws.

Every law is exposed two ways: an evaluator producing the transformed
side, and a residual check returning a :class:`ResidualReport`.  Checks
compare two independently computed routes to the same number, so a
silent branch or sign error anywhere upstream shows up as a residual
jump rather than a wrong answer with no witness.

Residual convention: ``rel = |lhs - rhs| / max(|lhs|, |rhs|, 1e-300)``,
and the pass decision switches to the absolute residual when both sides
are below 1e-8 (relative error is meaningless near a common zero).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from ._stability import cexpm1, inv_expm1
from .errors import DomainError
from .qcore import (
    ModularPoint,
    Truncation,
    euler_series,
    lambert_L1,
    lambert_L2,
    qpochhammer,
    qpochhammer_with_count,
    theta_product_tau,
)
from .raysum import (
    A_n,
    K_N,
    M_almost_modular,
    P_minus,
    P_plus,
    RaySpec,
    big_G,
    dP_dnu,
    dP_dtau,
    integrate_ray,
    pv_M_direct,
    stokes_sum,
)
from .specialfns import TWO_PI, bernoulli, digamma, dilog, fn_f, log_gamma

_TINY = 1e-300
_SMALL_SIDES = 1e-8
_EULER_GAMMA = 0.5772156649015328606

#: Per-identity default tolerances.  Sums-only identities sit at 1e-10
#: (or tighter), one-quadrature identities at 1e-8/1e-9, identities that
#: differentiate a quadrature at 1e-6/1e-7, and the principal-value
#: oracle comparison at its design accuracy of 1e-6.
TOLERANCES: dict[str, float] = {
    "euler-identity": 1e-11,
    "thm29": 1e-8,
    "thm29-variant": 1e-9,
    "ramanujan47": 1e-12,
    "eta-modular": 1e-10,
    "theta-modular": 1e-10,
    "theta-modular-simple": 1e-11,
    "stokes28": 1e-9,
    "reflection34": 1e-10,
    "lambert67": 1e-7,
    "lambert68": 1e-6,
    "lambert71": 1e-7,
    "lambert72": 1e-10,
    "binet74": 1e-10,
    "binet75": 1e-10,
    "M-pv": 1e-6,
}


@dataclass(frozen=True)
class ResidualReport:
    identity_id: str
    inputs: tuple[tuple[str, complex], ...]
    lhs: complex
    rhs: complex
    abs_residual: float
    rel_residual: float
    tolerance: float
    passed: bool
    skipped: bool = False
    skip_reason: str = ""


def compare(
    identity_id: str,
    inputs: dict[str, complex],
    lhs: complex,
    rhs: complex,
    tolerance: float,
) -> ResidualReport:
    lhs = complex(lhs)
    rhs = complex(rhs)
    abs_res = abs(lhs - rhs)
    rel_res = abs_res / max(abs(lhs), abs(rhs), _TINY)
    if max(abs(lhs), abs(rhs)) < _SMALL_SIDES:
        passed = abs_res <= tolerance
    else:
        passed = rel_res <= tolerance
    return ResidualReport(
        identity_id=identity_id,
        inputs=tuple((k, complex(v)) for k, v in inputs.items()),
        lhs=lhs,
        rhs=rhs,
        abs_residual=abs_res,
        rel_residual=rel_res,
        tolerance=tolerance,
        passed=passed,
    )


def skipped_report(
    identity_id: str, inputs: dict[str, complex], tolerance: float, reason: str
) -> ResidualReport:
    nan = float("nan")
    return ResidualReport(
        identity_id=identity_id,
        inputs=tuple((k, complex(v)) for k, v in inputs.items()),
        lhs=complex(nan, nan),
        rhs=complex(nan, nan),
        abs_residual=nan,
        rel_residual=nan,
        tolerance=tolerance,
        passed=False,
        skipped=True,
        skip_reason=reason,
    )


def _tol(identity_id: str, tol: float | None) -> float:
    return TOLERANCES[identity_id] if tol is None else tol


# ---------------------------------------------------------------------------
# (x; q)_oo through the transformed variables


def qpochhammer_modular_with_count(
    point: ModularPoint,
    tr: Truncation | None = None,
    spec: RaySpec | None = None,
) -> tuple[complex, int]:
    """Transformed-side evaluation of (x; q)_oo, plus the number of
    product terms the (tau*, nu*) side actually needed."""
    if not point.admissible_thm29:
        raise DomainError(
            f"point tau={point.tau}, nu={point.nu} outside the transformation domain"
        )
    prod, n_terms = qpochhammer_with_count(
        point.x_star * point.q_star, point.q_star, tr
    )
    pre = cmath.exp(-1j * math.pi * point.tau / 12)  # q^{-1/24}
    expo = dilog(point.x) / point.log_q + big_G(point) + P_minus(point, spec)
    return pre * cmath.sqrt(1.0 - point.x) * prod * cmath.exp(expo), n_terms


def qpochhammer_modular(
    point: ModularPoint,
    tr: Truncation | None = None,
    spec: RaySpec | None = None,
) -> complex:
    return qpochhammer_modular_with_count(point, tr, spec)[0]


def g_star(point: ModularPoint) -> complex:
    """Odd part of G in nu: (G(tau, nu) - G(tau, -nu)) / 2."""
    return 0.5 * (big_G(point) - big_G(ModularPoint(point.tau, -point.nu)))


def qpochhammer_modular_variants(
    point: ModularPoint,
    tr: Truncation | None = None,
    spec: RaySpec | None = None,
) -> complex:
    """The two half-domain restatements built on the odd part of G.

    Which one applies is decided by the sign of Im(nu/tau); the common
    boundary (nu/tau real) belongs to neither and is rejected.  Both use
    the full (x*; q*)_oo product and a single principal square root of
    the displayed ratio/product.
    """
    s = point.s
    if s.imag == 0.0:
        raise DomainError(
            "nu/tau is real: the point sits on the boundary between the "
            "two variant half-domains"
        )
    if not point.admissible_thm29:
        raise DomainError(
            f"point tau={point.tau}, nu={point.nu} outside the transformation domain"
        )
    prod = qpochhammer(point.x_star, point.q_star, tr)
    pre = cmath.exp(-1j * math.pi * point.tau / 12)
    expo = dilog(point.x) / point.log_q + g_star(point) + P_minus(point, spec)
    x, xs = point.x, point.x_star
    if s.imag > 0.0:
        root = cmath.sqrt((1.0 - x) / (1.0 - xs))
    else:
        root = cmath.sqrt((1.0 - x) * (1.0 - 1.0 / xs)) / (1.0 - xs)
    return pre * root * prod * cmath.exp(expo)


def ramanujan_completed(
    point: ModularPoint,
    tr: Truncation | None = None,
    spec: RaySpec | None = None,
) -> complex:
    """The completed product formula with the Stirling factor written out.

    Equivalent to :func:`qpochhammer_modular` because
    exp(G) = sqrt(2 pi s) e^{s log s - s} / Gamma(s+1); the roots are
    taken individually principal (sqrt(2 pi) * sqrt(s) * sqrt(1 - x)),
    which is the combination that stays single-valued on the whole
    domain.
    """
    if not point.admissible_thm29:
        raise DomainError(
            f"point tau={point.tau}, nu={point.nu} outside the transformation domain"
        )
    s = point.s
    prod = qpochhammer(point.q_star * point.x_star, point.q_star, tr)
    pre = cmath.exp(-1j * math.pi * point.tau / 12)
    stirling = cmath.exp(s * (cmath.log(s) - 1.0) - log_gamma(s + 1.0))
    expo = dilog(point.x) / point.log_q + P_minus(point, spec)
    return (
        math.sqrt(TWO_PI)
        * cmath.sqrt(s)
        * cmath.sqrt(1.0 - point.x)
        * pre
        * stirling
        * cmath.exp(expo)
        * prod
    )


def thm29_residual(
    point: ModularPoint,
    tr: Truncation | None = None,
    spec: RaySpec | None = None,
    tol: float | None = None,
) -> ResidualReport:
    lhs = qpochhammer(point.x, point.q, tr)
    rhs = qpochhammer_modular(point, tr, spec)
    return compare(
        "thm29", {"tau": point.tau, "nu": point.nu}, lhs, rhs, _tol("thm29", tol)
    )


def variant_residual(
    point: ModularPoint,
    tr: Truncation | None = None,
    spec: RaySpec | None = None,
    tol: float | None = None,
) -> ResidualReport:
    lhs = qpochhammer_modular(point, tr, spec)
    rhs = qpochhammer_modular_variants(point, tr, spec)
    return compare(
        "thm29-variant",
        {"tau": point.tau, "nu": point.nu},
        lhs,
        rhs,
        _tol("thm29-variant", tol),
    )


def ramanujan_residual(
    point: ModularPoint,
    tr: Truncation | None = None,
    spec: RaySpec | None = None,
    tol: float | None = None,
) -> ResidualReport:
    lhs = qpochhammer_modular(point, tr, spec)
    rhs = ramanujan_completed(point, tr, spec)
    return compare(
        "ramanujan47",
        {"tau": point.tau, "nu": point.nu},
        lhs,
        rhs,
        _tol("ramanujan47", tol),
    )


def euler_residual(
    x: complex,
    q: complex,
    tr: Truncation | None = None,
    tol: float | None = None,
) -> ResidualReport:
    lhs = qpochhammer(x, q, tr)
    rhs = euler_series(x, q, tr)
    return compare(
        "euler-identity", {"x": x, "q": q}, lhs, rhs, _tol("euler-identity", tol)
    )


# ---------------------------------------------------------------------------
# eta and theta


def eta_modular_residual(
    tau: complex, tr: Truncation | None = None, tol: float | None = None
) -> ResidualReport:
    """(q; q)_oo against its inverted-tau expression."""
    tau = complex(tau)
    point = ModularPoint(tau, tau)  # x = q
    lhs = qpochhammer(point.q, point.q, tr)
    rhs = (
        cmath.exp(-1j * math.pi * tau / 12)
        * cmath.sqrt(1j / tau)
        * cmath.exp(1j * math.pi * point.tau_star / 12)
        * qpochhammer(point.q_star, point.q_star, tr)
    )
    return compare("eta-modular", {"tau": tau}, lhs, rhs, _tol("eta-modular", tol))


def theta_modular_residual(
    tau: complex,
    nu: complex,
    tr: Truncation | None = None,
    tol: float | None = None,
    simplified: bool = False,
) -> ResidualReport:
    """Jacobi triple-product theta against its inverted-tau expression.

    The root sqrt(i/(tau x)) is read as sqrt(i/tau) e^{-pi i nu} (the
    nu-defined branch; equal to the principal root for |Re nu| < 1/2).
    With that reading the Gaussian prefactor form and the simplified
    form exp(-(log x)^2 / (2 log q)) are algebraically identical, so the
    two variants differ only by rounding.
    """
    point = ModularPoint(tau, nu)
    lhs = theta_product_tau(point.tau, point.x, tr)
    rhs_theta = theta_product_tau(point.tau_star, point.x_star, tr)
    if simplified:
        ident = "theta-modular-simple"
        log_x = TWO_PI * 1j * point.nu
        rhs = (
            cmath.sqrt(1j / point.tau)
            * cmath.exp(-(log_x**2) / (2.0 * point.log_q))
            * rhs_theta
        )
    else:
        ident = "theta-modular"
        w = TWO_PI * 1j * (point.nu - point.tau / 2.0)  # log(x / sqrt(q))
        rhs = (
            cmath.exp(1j * math.pi * point.tau / 4.0)  # q^{1/8}
            * cmath.sqrt(1j / point.tau)
            * cmath.exp(-1j * math.pi * point.nu)
            * cmath.exp(-(w**2) / (2.0 * point.log_q))
            * rhs_theta
        )
    return compare(ident, {"tau": point.tau, "nu": point.nu}, lhs, rhs, _tol(ident, tol))


# ---------------------------------------------------------------------------
# Stokes and reflection


def stokes_residual(
    point: ModularPoint,
    tr: Truncation | None = None,
    tol: float | None = None,
) -> ResidualReport:
    lhs = P_minus(point) - P_plus(point)
    rhs = stokes_sum(point, tr)
    return compare(
        "stokes28", {"tau": point.tau, "nu": point.nu}, lhs, rhs, _tol("stokes28", tol)
    )


def reflection_residual(
    point: ModularPoint, tol: float | None = None
) -> ResidualReport:
    """G(tau, nu) + G(tau, -nu) against log(1 - e^{+-2 pi i nu/tau}).

    The exponent sign follows the half-plane of nu/tau (the decaying
    exponential on each side); nu/tau real is a branch boundary and is
    rejected.
    """
    s = point.s
    if s.imag == 0.0:
        raise DomainError("nu/tau is real: reflection needs s off the real axis")
    lhs = big_G(point) + big_G(ModularPoint(point.tau, -point.nu))
    if s.imag > 0.0:
        w = cmath.exp(TWO_PI * 1j * s)
    else:
        w = cmath.exp(-TWO_PI * 1j * s)
    rhs = cmath.log(1.0 - w)
    return compare(
        "reflection34",
        {"tau": point.tau, "nu": point.nu},
        lhs,
        rhs,
        _tol("reflection34", tol),
    )


# ---------------------------------------------------------------------------
# Lambert-sum relations


def lambert_relation_residuals(
    point: ModularPoint,
    which: int,
    tr: Truncation | None = None,
    spec: RaySpec | None = None,
    tol: float | None = None,
) -> ResidualReport:
    """The four Lambert-sum transformation relations.

    ``which`` selects the relation: 67/68 involve a generic nu (and the
    nu- resp. tau-derivative of P); 71/72 are their nu = 0 limit cases
    and ignore point.nu.
    """
    if which not in (67, 68, 71, 72):
        raise DomainError(f"unknown Lambert relation {which!r}; expected 67/68/71/72")
    ident = f"lambert{which}"
    tolerance = _tol(ident, tol)
    tau = point.tau
    l2pit = point.log_q  # 2 pi i tau

    if which in (71, 72):
        inputs = {"tau": tau}
        star_pt = ModularPoint(point.tau_star, point.tau_star)
        if which == 72:
            lhs = lambert_L2(ModularPoint(tau, tau), tr)
            rhs = (
                1.0 / 24.0
                + 1.0 / (4j * math.pi * tau)
                - 1.0 / (24.0 * tau * tau)
                + lambert_L2(star_pt, tr) / tau**2
            )
        else:
            lhs = lambert_L1(ModularPoint(tau, tau), tr)
            rhs = (
                cmath.log(-l2pit) / l2pit
                + 0.25
                - _EULER_GAMMA / l2pit
                - dP_dnu(ModularPoint(tau, 0.0), spec) / (2j * math.pi)
                + lambert_L1(star_pt, tr) / tau
            )
        return compare(ident, inputs, lhs, rhs, tolerance)

    s = point.s
    if point.nu == 0 or (s.imag == 0.0 and s.real <= 0.0):
        raise DomainError(f"nu/tau = {s} violates the relation-{which} domain")
    inputs = {"tau": tau, "nu": point.nu}
    x = point.x
    shifted_star = ModularPoint(point.tau_star, point.nu_star + point.tau_star)
    if which == 67:
        lhs = lambert_L1(ModularPoint(tau, point.nu + tau), tr)
        bracket = (
            digamma(s + 1.0)
            - cmath.log(s)
            - tau / (2.0 * point.nu)
            - tau * dP_dnu(point, spec)
        )
        rhs = (
            cmath.log(1.0 - x) / l2pit
            - x / (2.0 * (1.0 - x))
            + lambert_L1(shifted_star, tr) / tau
            + bracket / l2pit
        )
    else:
        lhs = lambert_L2(ModularPoint(tau, point.nu + tau), tr)
        bracket = (
            digamma(s + 1.0)
            - cmath.log(s)
            - tau / (2.0 * point.nu)
            + tau * tau / point.nu * dP_dtau(point, spec)
        )
        rhs = (
            1.0 / 24.0
            - dilog(x) / (4.0 * math.pi**2) / tau**2
            - lambert_L1(shifted_star, tr) * point.nu / tau**2
            + lambert_L2(shifted_star, tr) / tau**2
            - point.nu / (2j * math.pi * tau**2) * bracket
        )
    return compare(ident, inputs, lhs, rhs, tolerance)


# ---------------------------------------------------------------------------
# Binet validation integrals


def binet74_residual(lam: complex, tol: float | None = None) -> ResidualReport:
    """Integral of sin(lam u)/(e^{2 pi u} - 1) over u > 0 vs closed form."""
    lam = complex(lam)
    if abs(lam.imag) >= TWO_PI:
        raise DomainError(f"|Im lam| = {abs(lam.imag)} >= 2 pi: integral diverges")

    def integrand(u: complex) -> complex:
        return cmath.sin(lam * u) * inv_expm1(TWO_PI * u)

    lhs = integrate_ray(integrand, RaySpec(direction_d=0.0)).value
    rhs = 0.25 + 0.5 * (inv_expm1(lam) - 1.0 / lam)
    return compare("binet74", {"lambda": lam}, lhs, rhs, _tol("binet74", tol))


def binet75_residual(lam: complex, tol: float | None = None) -> ResidualReport:
    """Integral of (1 - cos(lam u))/((e^{2 pi u} - 1) u) vs closed form."""
    lam = complex(lam)
    if abs(lam.imag) >= TWO_PI:
        raise DomainError(f"|Im lam| = {abs(lam.imag)} >= 2 pi: integral diverges")

    def integrand(u: complex) -> complex:
        # 1 - cos w = 2 sin^2(w/2): exact, and free of the cancellation
        # that would otherwise drown the u -> 0 end in rounding noise
        return 2.0 * cmath.sin(0.5 * lam * u) ** 2 * inv_expm1(TWO_PI * u) / u

    lhs = integrate_ray(integrand, RaySpec(direction_d=0.0)).value
    rhs = lam / 4.0 + 0.5 * cmath.log(-cexpm1(-lam) / lam)
    return compare("binet75", {"lambda": lam}, lhs, rhs, _tol("binet75", tol))


def mpv_residual(
    alpha: float,
    xi: float,
    n_terms: int = 40,
    tr: Truncation | None = None,
    tol: float | None = None,
) -> ResidualReport:
    """The almost-modular M against the principal-value route."""
    lhs = M_almost_modular(alpha, xi, tr=tr)
    rhs = pv_M_direct(alpha, xi, n_terms=n_terms)
    return compare("M-pv", {"alpha": alpha, "xi": xi}, lhs, rhs, _tol("M-pv", tol))


# ---------------------------------------------------------------------------
# the divergent correction series and its error bound


@dataclass(frozen=True)
class AsymptoticRow:
    tau: complex
    N: int
    theta_partial: complex
    minus_P: complex
    error: float
    bound_rhs: float


_C_SAMPLES = 400
_c_eps_cache: dict[tuple[int, float], float] = {}


def _f_tail_constant(N: int, eps: float) -> float:
    """Empirical constant C with |f(t) - f_N(t)| <= C |t|^{2N+1} / (2pi-eps)^{2N}
    on |t| <= 2pi - eps.

    f_N is the odd Taylor polynomial of f through degree 2N - 1.  The
    poles of f sit on the real axis, so the supremum over any admissible
    ray is dominated by real samples; those are what we scan.
    """
    key = (N, round(eps, 12))
    cached = _c_eps_cache.get(key)
    if cached is not None:
        return cached
    radius = TWO_PI - eps
    table = bernoulli(2 * N) if N >= 1 else None
    best = 0.0
    for j in range(1, _C_SAMPLES + 1):
        r = radius * j / _C_SAMPLES
        partial = 0.0
        for n in range(1, N + 1):
            partial += (
                2.0
                * (-1.0) ** n
                * table.b2(n)
                * r ** (2 * n - 1)
                / math.factorial(2 * n)
            )
        ratio = abs(fn_f(r) - partial) * radius ** (2 * N) / r ** (2 * N + 1)
        best = max(best, ratio)
    _c_eps_cache[key] = best
    return best


def theta_series_table(
    nu: complex,
    tau_list: list[complex],
    n_max: int = 8,
    eps: float = math.pi / 4,
    spec: RaySpec | None = None,
) -> list[AsymptoticRow]:
    """Partial sums of the divergent correction series against -P.

    For each tau and each N = 0..n_max the row records the partial sum
    through N terms, the reference value -P(tau, nu), their distance,
    and the certified bound C_eps K_N(nu) |tau|^{2N+1} / (2pi-eps)^{2N}.
    The series coefficients are tau-independent, so the A_n integrals
    are computed once.
    """
    nu = complex(nu)
    if not 0.0 < eps < 0.5 * math.pi:
        raise DomainError(f"eps must lie in (0, pi/2), got {eps}")
    if abs(nu.real) >= 1.0:
        raise DomainError(f"|Re nu| = {abs(nu.real)} >= 1: K_N diverges")
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    b_table = bernoulli(2 * n_max) if n_max >= 1 else None
    a_vals = [A_n(n, TWO_PI * 1j * nu) for n in range(1, n_max + 1)]
    k_vals = [K_N(N, nu) for N in range(n_max + 1)]
    c_vals = [_f_tail_constant(N, eps) for N in range(n_max + 1)]
    rows: list[AsymptoticRow] = []
    for tau in tau_list:
        tau = complex(tau)
        arg = cmath.phase(tau)
        if not eps < arg < math.pi - eps:
            raise DomainError(
                f"arg tau = {arg:.4f} outside the sector ({eps:.4f}, {math.pi - eps:.4f})"
            )
        point = ModularPoint(tau, nu)
        minus_p = -P_minus(point, spec)
        log_q = point.log_q
        partial = 0.0 + 0.0j
        for N in range(n_max + 1):
            if N >= 1:
                partial += (
                    b_table.b2(N)
                    * a_vals[N - 1]
                    * log_q ** (2 * N - 1)
                    / math.factorial(2 * N)
                )
            bound = (
                c_vals[N]
                * k_vals[N]
                * abs(tau) ** (2 * N + 1)
                / (TWO_PI - eps) ** (2 * N)
            )
            rows.append(
                AsymptoticRow(
                    tau=tau,
                    N=N,
                    theta_partial=partial,
                    minus_P=minus_p,
                    error=abs(minus_p - partial),
                    bound_rhs=bound,
                )
            )
    return rows


# ---------------------------------------------------------------------------
# q -> 1 helpers built on the transformed side


def q_gamma_modular(
    z: complex, tau: complex, tr: Truncation | None = None
) -> complex:
    """Jackson's q-Gamma with both infinite products routed through the
    transformed variables; stays cheap as q -> 1 (tau -> 0 along iR+)."""
    z = complex(z)
    tau = complex(tau)
    num = qpochhammer_modular(ModularPoint(tau, tau), tr)
    den = qpochhammer_modular(ModularPoint(tau, z * tau), tr)
    one_minus_q = -cexpm1(TWO_PI * 1j * tau)
    return num / den * cmath.exp((1.0 - z) * cmath.log(one_minus_q))
