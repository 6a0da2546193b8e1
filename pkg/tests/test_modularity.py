"""Identity residual layer: every transformation law as a checked equation.

Most tests here assert a ResidualReport passes at its registered
tolerance; the measured residuals are typically 5 to 8 orders of
magnitude below those tolerances, so failures mean real regressions,
not noise.
"""

import math
import random

import pytest

from qmod.errors import DomainError
from qmod.qcore import ModularPoint, qpochhammer, qpochhammer_with_count
from qmod.raysum import P_minus
from qmod.modularity import (
    TOLERANCES,
    binet74_residual,
    binet75_residual,
    compare,
    eta_modular_residual,
    euler_residual,
    g_star,
    lambert_relation_residuals,
    mpv_residual,
    q_gamma_modular,
    qpochhammer_modular,
    qpochhammer_modular_with_count,
    qpochhammer_modular_variants,
    ramanujan_completed,
    ramanujan_residual,
    reflection_residual,
    skipped_report,
    stokes_residual,
    theta_modular_residual,
    theta_series_table,
    thm29_residual,
    variant_residual,
)

GRID_TAUS = (0.3j, 0.7j, 1j, 0.2 + 0.8j, -0.3 + 1.2j)
GRID_NUS = (0.1j, 0.3j, 0.5j, 0.1 + 0.2j, 0.25)


# ---------------------------------------------------------------------------
# report plumbing


def test_compare_relative_mode():
    r = compare("euler-identity", {"x": 1.0}, 2.0, 2.0 + 1e-14, 1e-11)
    assert r.passed and not r.skipped
    assert r.rel_residual == pytest.approx(5e-15, rel=0.5)


def test_compare_absolute_mode_for_tiny_sides():
    # both sides below 1e-8: relative residual of garbage digits must not
    # fail the check, the absolute residual decides
    r = compare("euler-identity", {}, 1e-13, 3e-13, 1e-11)
    assert r.passed
    r2 = compare("euler-identity", {}, 1e-13, 1e-3, 1e-11)
    assert not r2.passed


def test_skipped_report_shape():
    r = skipped_report("thm29", {"tau": 1j, "nu": 1.0}, 1e-8, "inadmissible")
    assert r.skipped and not r.passed
    assert r.skip_reason == "inadmissible"
    assert math.isnan(r.abs_residual)


# ---------------------------------------------------------------------------
# thm29 residual family: the q-Pochhammer transformation law


def test_thm29_grid():
    valid = 0
    for tau in GRID_TAUS:
        for nu in GRID_NUS:
            p = ModularPoint(tau, nu)
            if not p.admissible_thm29:
                continue
            r = thm29_residual(p)
            assert r.passed, f"tau={tau}, nu={nu}: rel={r.rel_residual:.3e}"
            assert r.rel_residual < 1e-8
            valid += 1
    assert valid >= 15


def test_thm29_inadmissible_raises():
    with pytest.raises(DomainError):
        qpochhammer_modular(ModularPoint(1j, -0.3j))


def test_thm29_near_q_to_one():
    # q ~ 0.73: the transformed product needs almost no terms
    p = ModularPoint(0.05j, 0.015j)
    r = thm29_residual(p)
    assert r.passed and r.rel_residual < 1e-8
    _, n_star_terms = qpochhammer_modular_with_count(p)
    assert n_star_terms <= 1000


def test_variants_match_both_half_planes():
    # Im(nu/tau) < 0 side
    r_minus = variant_residual(ModularPoint(1j, 0.1 + 0.2j))
    assert r_minus.passed and r_minus.rel_residual < 1e-9
    # Im(nu/tau) > 0 side
    r_plus = variant_residual(ModularPoint(1j, -0.1 + 0.2j))
    assert r_plus.passed and r_plus.rel_residual < 1e-9


def test_variants_reject_real_s():
    with pytest.raises(DomainError):
        qpochhammer_modular_variants(ModularPoint(1j, 0.3j))  # s = 0.3 real


def test_g_star_is_odd():
    for tau, nu in ((1j, 0.1 + 0.2j), (0.8j, -0.2 + 0.3j)):
        a = g_star(ModularPoint(tau, nu))
        b = g_star(ModularPoint(tau, -nu))
        assert abs(a + b) < 1e-12 * max(1.0, abs(a))


def test_ramanujan_algebraic_equivalence():
    rng = random.Random(470)
    checked = 0
    while checked < 20:
        tau = complex(rng.uniform(-0.4, 0.4), rng.uniform(0.3, 1.5))
        nu = complex(rng.uniform(-0.25, 0.25), rng.uniform(0.05, 0.45))
        p = ModularPoint(tau, nu)
        if not p.admissible_thm29:
            continue
        r = ramanujan_residual(p)
        assert r.passed and r.rel_residual < 1e-12
        checked += 1


def test_ramanujan_vs_direct_product():
    p = ModularPoint(0.1j, 0.05j)
    direct = qpochhammer(p.x, p.q)
    completed = ramanujan_completed(p)
    assert abs(direct - completed) / abs(direct) < 1e-8


def test_ramanujan_at_s_equal_one():
    # nu = tau makes x = q, so the completed form must reproduce (q;q)_oo
    p = ModularPoint(0.5j, 0.5j)
    direct = qpochhammer(p.q, p.q)
    assert abs(ramanujan_completed(p) - direct) / abs(direct) < 1e-9


def test_euler_residual_report():
    r = euler_residual(1.3 - 0.4j, 0.45 + 0.1j)
    assert r.identity_id == "euler-identity"
    assert r.passed and r.rel_residual < 1e-11


# ---------------------------------------------------------------------------
# eta / theta


def test_eta_modular_examples():
    assert eta_modular_residual(1j).rel_residual < 1e-12
    assert eta_modular_residual(0.3j).passed
    assert eta_modular_residual(0.4 + 0.8j).passed


def test_eta_modular_random():
    rng = random.Random(52)
    for _ in range(10):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.2, 2.0))
        r = eta_modular_residual(tau)
        assert r.passed and r.rel_residual < 1e-10


def test_theta_modular_examples():
    assert theta_modular_residual(1j, 0.0).passed
    assert theta_modular_residual(0.8j, 0.2).passed
    r = theta_modular_residual(0.8j, 0.2, simplified=True)
    assert r.passed and r.rel_residual < 1e-11


def test_theta_modular_random():
    rng = random.Random(58)
    for _ in range(10):
        tau = complex(rng.uniform(-0.3, 0.3), rng.uniform(0.4, 1.5))
        nu = complex(rng.uniform(-0.4, 0.4), rng.uniform(-0.15, 0.15))
        r = theta_modular_residual(tau, nu)
        assert r.passed and r.rel_residual < 1e-10


# ---------------------------------------------------------------------------
# Stokes / reflection


def test_stokes_relation():
    rng = random.Random(28)
    for _ in range(10):
        tau = complex(rng.uniform(-0.3, 0.3), rng.uniform(0.5, 1.5))
        c = rng.uniform(0.05, 0.45)
        r = stokes_residual(ModularPoint(tau, c * tau))
        assert r.passed and r.rel_residual < 1e-9


def test_reflection_both_sides():
    assert reflection_residual(ModularPoint(1j, 0.25)).passed  # Im s < 0
    assert reflection_residual(ModularPoint(1j, -0.25)).passed  # Im s > 0


def test_reflection_random():
    rng = random.Random(34)
    for _ in range(20):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.2, 2.0))
        nu = complex(rng.uniform(-0.4, 0.4), rng.uniform(0.05, 0.5))
        p = ModularPoint(tau, nu)
        if p.s.imag == 0.0:
            continue
        r = reflection_residual(p)
        assert r.passed and r.rel_residual < 1e-10


def test_reflection_boundary_rejected():
    with pytest.raises(DomainError):
        reflection_residual(ModularPoint(1j, 0.3j))  # s real


# ---------------------------------------------------------------------------
# Lambert relations


def test_lambert_72_pure_sums():
    for tau in (0.3j, 0.5j, 0.8j, 1.2j, 2.0j):
        r = lambert_relation_residuals(ModularPoint(tau), 72)
        assert r.passed and r.rel_residual < 1e-10


def test_lambert_71():
    r = lambert_relation_residuals(ModularPoint(0.5j), 71)
    assert r.passed and r.rel_residual < 1e-7


def test_lambert_67_68():
    p = ModularPoint(1j, 0.2j)
    r67 = lambert_relation_residuals(p, 67)
    assert r67.passed and r67.rel_residual < 1e-7
    r68 = lambert_relation_residuals(p, 68)
    assert r68.passed and r68.rel_residual < 1e-6
    p2 = ModularPoint(0.8j, 0.3j)
    assert lambert_relation_residuals(p2, 67).passed
    assert lambert_relation_residuals(p2, 68).passed


def test_lambert_domain():
    with pytest.raises(DomainError):
        lambert_relation_residuals(ModularPoint(1j, 0.2j), 66)
    with pytest.raises(DomainError):
        lambert_relation_residuals(ModularPoint(1j, 0), 67)  # nu = 0
    with pytest.raises(DomainError):
        lambert_relation_residuals(ModularPoint(1j, -0.5j), 68)  # s < 0


# ---------------------------------------------------------------------------
# Binet integrals, M decomposition


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 1 + 1j])
def test_binet_integrals(lam):
    assert binet74_residual(lam).passed
    assert binet75_residual(lam).passed


def test_binet_divergence_guard():
    with pytest.raises(DomainError):
        binet74_residual(7j)
    with pytest.raises(DomainError):
        binet75_residual(-8j)


@pytest.mark.parametrize("alpha", [1.0, 0.7])
@pytest.mark.parametrize("xi", [0.2, 0.4])
def test_m_decomposition(alpha, xi):
    r = mpv_residual(alpha, xi)
    assert r.passed and r.abs_residual < 1e-6


# ---------------------------------------------------------------------------
# asymptotic table


def test_table_error_within_bound():
    rows = theta_series_table(0.3, [0.1j], n_max=4)
    assert len(rows) == 5
    for row in rows:
        assert row.error <= row.bound_rhs


def test_table_scaling_law():
    rows_a = theta_series_table(0.3, [0.1j], n_max=2)
    rows_b = theta_series_table(0.3, [0.05j], n_max=2)
    for N in (1, 2):
        ra = next(r for r in rows_a if r.N == N)
        rb = next(r for r in rows_b if r.N == N)
        expected = 0.5 ** (2 * N + 1)
        assert expected / 2.0 < rb.error / ra.error < expected * 2.0


def test_table_N0_error_linear_in_tau():
    e1 = theta_series_table(0.3, [0.05j], n_max=0)[0].error
    e2 = theta_series_table(0.3, [0.025j], n_max=0)[0].error
    assert 1.4 < e1 / e2 < 2.9


def test_table_divergence_signature():
    rows = theta_series_table(0.5, [0.3j], n_max=8)
    errors = [r.error for r in rows]
    n_star = errors.index(min(errors))
    assert 0 < n_star < 8
    assert errors[-1] > errors[n_star]


def test_table_validation():
    with pytest.raises(DomainError):
        theta_series_table(0.3, [0.1j], eps=2.0)
    with pytest.raises(DomainError):
        theta_series_table(1.5, [0.1j])
    with pytest.raises(DomainError):
        theta_series_table(0.3, [0.1j], n_max=-1)
    with pytest.raises(DomainError):
        # arg tau = pi/2 is fine, but eps close to pi/2 excludes it
        theta_series_table(0.3, [1.0 + 0.01j], eps=1.0)


# ---------------------------------------------------------------------------
# q -> 1 limits through the transformed side


def test_q_gamma_limit_z_15():
    tau = 0.02j  # q = e^{-0.04 pi} ~ 0.8819
    got = q_gamma_modular(1.5, tau)
    want = math.gamma(1.5)
    assert abs(got - want) / want < 0.01


def test_q_gamma_limit_z_25():
    # Stated bound: within 1% of Gamma(2.5) already at q = e^{-0.04 pi}.
    # Measured deviation is 2.26% (the limit in z = 2.5 converges more
    # slowly in alpha); kept at the stated bound, see the repo notes on
    # intentionally failing checks.
    tau = 0.02j
    got = q_gamma_modular(2.5, tau)
    want = math.gamma(2.5)
    assert abs(got - want) / want < 0.01


def test_q_gamma_limit_tightens_as_alpha_shrinks():
    want = math.gamma(2.5)
    devs = [
        abs(q_gamma_modular(2.5, 1j * alpha) - want) / want
        for alpha in (0.04, 0.02, 0.01)
    ]
    assert devs[0] > devs[1] > devs[2]


def test_P_vanishes_linearly_in_alpha():
    # fixed nu: the N = 0 bound is C K_0(nu) |tau|, so halving alpha
    # should roughly halve |P|
    vals = [abs(P_minus(ModularPoint(1j * a, 0.3))) for a in (0.08, 0.04, 0.02)]
    assert vals[0] > vals[1] > vals[2]
    assert 1.5 < vals[0] / vals[1] < 2.5
    assert 1.5 < vals[1] / vals[2] < 2.5


def test_log_expansion_near_q_one():
    # log (x;q)_oo approaches log sqrt(1-x) - Li2(x)/(2 pi alpha)
    from qmod.specialfns import dilog

    x = 0.5
    gaps = []
    for alpha in (0.01, 0.005):
        q = math.exp(-2.0 * math.pi * alpha)
        lead = 0.5 * math.log(1.0 - x) - dilog(x) / (2.0 * math.pi * alpha)
        gaps.append(abs(math.log(qpochhammer(x, q).real) - lead))
    assert gaps[0] < 1e-2
    assert gaps[1] < gaps[0]


def test_modular_route_is_cheap_where_direct_is_not():
    p = ModularPoint(0.01j, 0.003j)
    _, n_direct = qpochhammer_with_count(p.x, p.q)
    _, n_modular = qpochhammer_modular_with_count(p)
    assert n_direct > 100 * max(n_modular, 1)


def test_tolerance_registry_covers_cli_targets():
    for key in (
        "euler-identity",
        "thm29",
        "ramanujan47",
        "eta-modular",
        "theta-modular",
        "stokes28",
        "reflection34",
        "lambert67",
        "lambert68",
        "lambert71",
        "lambert72",
        "binet74",
        "binet75",
        "M-pv",
    ):
        assert key in TOLERANCES
