"""Quadrature engine and the integral-defined quantities built on it.

The frozen complex constants below were produced by 50-digit mpmath
quadrature with explicit pole-avoiding breakpoints, cross-run on two
different ray directions; they agree with each other to ~1e-30 and are
quoted here to full double precision.
"""

import cmath
import math

import pytest

from qmod.errors import ConvergenceError, DomainError
from qmod.qcore import ModularPoint
from qmod.raysum import (
    A_n,
    K_N,
    M_almost_modular,
    P_minus,
    P_plus,
    RaySpec,
    admissible_cone,
    big_G,
    choose_ray,
    dP_dnu,
    dP_dtau,
    g_plus,
    integrate_ray,
    pv_M_direct,
    stokes_sum,
)
from qmod.specialfns import fn_B


def rel(got, want):
    got, want = complex(got), complex(want)
    return abs(got - want) / max(abs(want), 1e-300)


# ---------------------------------------------------------------------------
# the engine itself


def test_integrate_ray_known_integrals():
    spec = RaySpec(direction_d=0.0)
    val, err = integrate_ray(lambda t: cmath.exp(-t), spec)
    assert abs(val - 1.0) <= err + 1e-15
    assert err <= spec.rel_tol * abs(val) + 1e-15
    val2, _ = integrate_ray(lambda t: t * cmath.exp(-t), spec)
    assert rel(val2, 1.0) < 1e-11
    # Gaussian: int_0^oo e^{-t^2} = sqrt(pi)/2
    val3, _ = integrate_ray(lambda t: cmath.exp(-t * t), spec)
    assert rel(val3, 0.5 * math.sqrt(math.pi)) < 1e-11


def test_integrate_ray_rotation_invariance():
    # e^{-t} is entire and decays in |arg t| < pi/2, so the rotated ray
    # must reproduce the same value
    for d in (-math.pi / 6.0, math.pi / 8.0, -math.pi / 3.0):
        val, _ = integrate_ray(lambda t: cmath.exp(-t), RaySpec(direction_d=d))
        assert rel(val, 1.0) < 1e-11


def test_integrate_ray_flags_nondecaying():
    with pytest.raises(ConvergenceError):
        integrate_ray(lambda t: 1.0 / (1.0 + t * t), RaySpec(direction_d=0.0, max_panels=30))


def test_rayspec_validation():
    with pytest.raises(DomainError):
        RaySpec(direction_d=0.0, rel_tol=0.0)
    with pytest.raises(DomainError):
        RaySpec(direction_d=0.0, panel_growth=1.0)
    with pytest.raises(DomainError):
        RaySpec(direction_d=0.0, max_panels=0)


# ---------------------------------------------------------------------------
# ray selection


def test_choose_ray_lower_half():
    spec = choose_ray(ModularPoint(1j, 0.25), "lower")
    assert -math.pi < spec.direction_d < 0.0


def test_choose_ray_inside_cone():
    p = ModularPoint(1j, 0.25)
    cone = admissible_cone(p, "lower")
    spec = choose_ray(p, "lower")
    assert cone.d_min <= spec.direction_d <= cone.d_max
    assert cone.margin > 0.0


def test_choose_ray_empty_cone():
    with pytest.raises(DomainError):
        choose_ray(ModularPoint(1j, 1.2), "lower")


def test_choose_ray_bad_half_label():
    with pytest.raises(DomainError):
        choose_ray(ModularPoint(1j, 0.2), "sideways")


# ---------------------------------------------------------------------------
# g^+ and G


def test_g_plus_frozen():
    assert rel(g_plus(1.0), -0.081061466795327258) < 1e-11
    assert rel(g_plus(10.0), -0.0083305634333628713) < 1e-11
    assert rel(g_plus(1 + 1j), -0.042249635750932902 + 0.040912992446230007j) < 1e-11
    assert rel(g_plus(5 - 2j), -0.014360359684293145 - 0.0057311169424152241j) < 1e-11


def test_g_plus_cut():
    with pytest.raises(DomainError):
        g_plus(-1.0)
    with pytest.raises(DomainError):
        g_plus(0.0)


def test_big_G_equals_g_plus():
    # closed Stirling-remainder form against the Laplace integral
    for tau, nu in ((1j, 0.3j), (1j, 0.25), (0.2 + 0.9j, 0.1 + 0.2j), (0.5j, 0.2 + 0.1j)):
        p = ModularPoint(tau, nu)
        assert abs(big_G(p) - g_plus(p.s)) < 1e-10


def test_big_G_frozen_and_domain():
    assert rel(big_G(ModularPoint(1j, 0.3j)), -0.23606490074821558) < 1e-12
    with pytest.raises(DomainError):
        big_G(ModularPoint(1j, -0.3j))  # s = -0.3 on the cut


# ---------------------------------------------------------------------------
# P and friends


def test_P_minus_frozen():
    assert (
        rel(
            P_minus(ModularPoint(1j, 0.3j)),
            -0.083788203310897402 + 0.0017783402628787179j,
        )
        < 1e-10
    )
    assert (
        rel(
            P_minus(ModularPoint(1j, 0.25)),
            0.0043258432497058847 + 0.078272349147541367j,
        )
        < 1e-10
    )
    assert (
        rel(
            P_minus(ModularPoint(0.2 + 0.9j, 0.1 + 0.2j)),
            -0.044693787881103022 + 0.037461840907119918j,
        )
        < 1e-10
    )


def test_P_ray_independence():
    p = ModularPoint(1j, 0.3j)
    a = P_minus(p, RaySpec(direction_d=-math.pi / 3.0))
    b = P_minus(p, RaySpec(direction_d=-math.pi / 5.0))
    assert abs(a - b) < 1e-10


def test_P_odd_in_nu():
    for tau, nu in ((1j, 0.3j), (0.8j, 0.2 + 0.1j), (0.3 + 1.1j, 0.15j)):
        pm = P_minus(ModularPoint(tau, nu))
        mm = P_minus(ModularPoint(tau, -nu))
        assert abs(pm + mm) < 1e-10


def test_P_vanishes_at_zero():
    assert P_minus(ModularPoint(1j, 0)) == 0
    assert P_plus(ModularPoint(0.7j, 0)) == 0


def test_stokes_jump_matches_discrete_sum():
    p = ModularPoint(1j, 0.3j)
    jump = P_minus(p) - P_plus(p)
    assert abs(jump - stokes_sum(p)) < 1e-9


def test_stokes_sum_divergence_guard():
    with pytest.raises(DomainError):
        stokes_sum(ModularPoint(1j, -1.5))  # nu/tau = 1.5i decays too slowly


def test_dP_dnu_matches_finite_difference():
    p = ModularPoint(1j, 0.3j)
    assert (
        rel(dP_dnu(p), -0.0036503250209654966 + 0.24354910549802818j) < 5e-8
    )
    h = 1e-5
    fd = (
        P_minus(ModularPoint(0.8j, 0.2 + h)) - P_minus(ModularPoint(0.8j, 0.2 - h))
    ) / (2.0 * h)
    assert abs(dP_dnu(ModularPoint(0.8j, 0.2)) - fd) < 1e-7


def test_dP_dtau_matches_finite_difference():
    p = ModularPoint(1j, 0.3j)
    assert (
        rel(dP_dtau(p), 0.012283200426329947 + 0.095902661875876106j) < 5e-8
    )
    h = 1e-5
    fd = (
        P_minus(ModularPoint(1j * (1.0 + h), 0.3j))
        - P_minus(ModularPoint(1j * (1.0 - h), 0.3j))
    ) / (2j * h)
    assert abs(dP_dtau(p) - fd) < 1e-7


# ---------------------------------------------------------------------------
# A_n, K_N


def test_A_n_frozen():
    assert rel(A_n(1, 0.1), 0.008331944775049624) < 1e-11
    assert rel(A_n(2, 1.5), -0.010507913575224247) < 1e-11
    assert rel(A_n(1, 2j * math.pi * 0.3), 0.16724521297030401j) < 1e-11
    assert rel(A_n(3, 3 - 2j), 0.0011727430574080582 + 0.0060207215413734799j) < 1e-11


def test_A_1_is_fn_B():
    # the n = 1 moment reproduces B(z/2pi) for |z| < 2 pi
    for z in (0.7, 1.9, 0.5 + 0.5j):
        assert abs(A_n(1, z) - fn_B(z / (2.0 * math.pi))) < 1e-11


def test_A_n_rotated_continuation():
    # |Im z| > 2 pi forces the tilted ray; frozen value from the same
    # 50-digit adjudication as the P constants
    assert rel(A_n(1, 1 + 7j), 0.72457259773197002 - 0.27624721037460656j) < 1e-10


def test_A_n_domain():
    with pytest.raises(DomainError):
        A_n(0, 1.0)
    with pytest.raises(DomainError):
        A_n(1, 7j)  # z^2 on the cut
    with pytest.raises(DomainError):
        A_n(1, 1 + 7j, RaySpec(direction_d=0.0))  # ray misses the sector


def test_K_N_values():
    assert K_N(0, 0.5) == pytest.approx(1.0, rel=1e-11)
    assert K_N(0, 0.3) == pytest.approx(0.52541633241556748, rel=1e-11)
    assert K_N(1, 0.3) == pytest.approx(2.618265179769483, rel=1e-11)
    assert K_N(1, 0.6) == pytest.approx(15.767778172847079, rel=2e-11)
    assert K_N(2, 0.0) == 0.0


def test_K_N_domain():
    with pytest.raises(DomainError):
        K_N(-1, 0.5)
    with pytest.raises(DomainError):
        K_N(0, 1.0)


# ---------------------------------------------------------------------------
# M, two routes


def test_M_frozen():
    assert rel(M_almost_modular(1.0, 0.0), -0.0018726824497685461) < 1e-10
    assert rel(M_almost_modular(1.0, 0.2), -0.058493667858903305) < 1e-10
    assert rel(M_almost_modular(1.0, 0.4), -0.10491384310598428) < 1e-10
    assert rel(M_almost_modular(0.7, 0.2), -0.027646438961262311) < 1e-10


def test_M_routes_agree():
    for alpha, xi in ((1.0, 0.4), (0.7, 0.2)):
        assert abs(M_almost_modular(alpha, xi) - pv_M_direct(alpha, xi)) < 1e-6


def test_M_domain():
    with pytest.raises(DomainError):
        M_almost_modular(0.0, 0.2)
    with pytest.raises(DomainError):
        pv_M_direct(1.0, 0.2, n_terms=0)
    with pytest.raises(DomainError):
        pv_M_direct(1.0, 0.2, delta=1.0)
