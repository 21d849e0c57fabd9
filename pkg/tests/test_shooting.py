import math

import numpy as np
import pytest

import config
from core.errors import BracketExhausted, DomainError, SeriesInvalid
from core.geodesics import clairaut_start, integrate_t, leaf_r, leaf_slope_at_focus
from core.metrics import eval_profile
from core.profiles import C1CosineProfile, ProductProfile, ReflectedProfile, SmoothCompliantProfile
from core.shooting import (boundary_coverage, contact_second_derivative, continue_to_boundary,
                           crossing_angle_curve, find_double_contacts, middle_strip_phase,
                           shoot_from_boundary, strip_phase)

SMOOTH = SmoothCompliantProfile()
STRIP = ReflectedProfile(0.3, SmoothCompliantProfile())
PRODUCT = ProductProfile()


def _exact_epsilon(phi0, alpha, n):
    reference = strip_phase(phi0, alpha, 1.0)
    return reference.first_return + (n - 1) * reference.period


# --- shooting ------------------------------------------------------------------

@pytest.mark.parametrize("kappa", [math.pi / 6, math.pi / 4, math.pi / 3])
def test_c1cosine_shot_follows_the_leaf(kappa):
    res = shoot_from_boundary(C1CosineProfile(), kappa)
    phis = np.linspace(0.2, min(0.5 * math.pi, res.crossing.phi0), 300)
    assert np.max(np.abs(res.trajectory.dense(phis)[0] - leaf_r(kappa, phis))) <= 1e-5
    assert res.crossing.phi0 == pytest.approx(0.5 * math.pi, abs=1e-6)
    assert res.crossing.alpha == pytest.approx(leaf_slope_at_focus(kappa), abs=1e-5)
    assert res.certificates.barrier_ok
    assert abs(res.barrier_worst) < 1e-7


def test_smooth_shot_certificates():
    res = shoot_from_boundary(SMOOTH, 0.3)
    assert res.certificates.all_ok
    assert res.barrier_worst < 0.0
    assert res.crossing.alpha < 0.0
    assert res.trajectory.stop_reason == "stop_r"
    assert res.trajectory.chart == "phi"
    assert res.trajectory.r[-1] == pytest.approx(0.0, abs=1e-10)


def test_barrier_holds_for_small_r0():
    for r0 in np.geomspace(0.001, 0.9, 30):
        res = shoot_from_boundary(SMOOTH, float(r0))
        assert res.certificates.barrier_ok, f"r0={r0:.4g}: worst margin {res.barrier_worst:.3g}"


@pytest.mark.parametrize("r0", [0.1, 0.3])
def test_contact_second_derivative_is_half_the_slope(r0):
    half_slope = 0.5 * eval_profile(SMOOTH, r0)[1]
    for phi_start in (config.PHI_START, 0.5 * config.PHI_START):
        value = shoot_from_boundary(SMOOTH, r0, phi_start=phi_start).contact_second_derivative
        assert value == pytest.approx(half_slope, abs=1e-6)
        assert value < -math.cos(r0) * math.sin(r0)


def test_contact_second_derivative_uses_the_integrated_solution():
    res = shoot_from_boundary(SMOOTH, 0.3)
    assert contact_second_derivative(res.trajectory, 0.3) == res.contact_second_derivative
    # a solution started off the contact point does not reproduce λ′/2
    shifted = contact_second_derivative(res.trajectory, 0.3 + 1e-6)
    assert abs(shifted - res.contact_second_derivative) > 1e-3
    with pytest.raises(DomainError):
        contact_second_derivative(integrate_t(PRODUCT, clairaut_start(0.5), 1.0), 0.0)


def test_start_angle_does_not_move_the_crossing():
    full = shoot_from_boundary(SMOOTH, 0.2).crossing
    halved = shoot_from_boundary(SMOOTH, 0.2, phi_start=5e-4).crossing
    assert halved.phi0 == pytest.approx(full.phi0, abs=1e-7)
    assert halved.alpha == pytest.approx(full.alpha, abs=1e-7)


def test_non_compliant_profile_fails_the_barrier():
    res = shoot_from_boundary(SmoothCompliantProfile(eta=-0.01), 0.3)
    assert not res.certificates.barrier_ok
    assert res.barrier_worst > 0.0


def test_product_has_no_boundary_shots():
    with pytest.raises(DomainError):
        shoot_from_boundary(ProductProfile(), 0.3)


def test_shot_rejects_non_positive_r0():
    with pytest.raises(DomainError):
        shoot_from_boundary(SMOOTH, 0.0)


def test_large_start_angle_invalidates_the_series():
    with pytest.raises(SeriesInvalid):
        shoot_from_boundary(SMOOTH, 0.3, phi_start=0.5)


def test_shoot_result_serializes():
    data = shoot_from_boundary(SMOOTH, 0.3).to_dict()
    assert set(data["certificates"]) == {"barrier_ok", "monotone_ok", "second_deriv_ok", "convex_near_boundary_ok"}
    assert data["crossing"]["metric_angle"] == pytest.approx(math.atan(abs(data["crossing"]["alpha"])))


def test_crossing_angles_shrink_with_r0():
    curve = crossing_angle_curve(SMOOTH, [0.3, 0.2, 0.1])
    assert curve["bound_ok"].all()
    alphas = curve["alpha"].abs().tolist()
    assert alphas[0] > alphas[1] > alphas[2]


def test_boundary_coverage():
    table = boundary_coverage(SMOOTH, [0.05, 0.2, 0.5])
    assert table["reached"].all()
    assert (table["alpha"] < 0.0).all()


# --- middle strip ------------------------------------------------------------

def test_strip_phase_is_integer_at_an_exact_return():
    for n in (1, 2, 3):
        eps = _exact_epsilon(1.2, -0.4, n)
        assert strip_phase(1.2, -0.4, eps).phase == pytest.approx(n, abs=1e-12)


def test_strip_phase_uses_the_clairaut_constant():
    phase = strip_phase(1.2, -0.4, 0.3)
    assert phase.c == pytest.approx(0.4 * math.sin(1.2) / math.sqrt(1.16))
    assert 0.0 <= phase.fraction < 1.0


@pytest.mark.parametrize("alpha, epsilon", [(0.0, 0.3), (0.2, 0.3), (-0.4, 0.0)])
def test_strip_phase_rejects_bad_input(alpha, epsilon):
    with pytest.raises(DomainError):
        strip_phase(1.2, alpha, epsilon)


@pytest.mark.parametrize("phi0", [1.2, 1.9])
def test_exact_return_arrives_mirrored(phi0):
    alpha = -0.4
    eps = _exact_epsilon(phi0, alpha, 1)
    strip = middle_strip_phase(phi0, alpha, eps)
    assert strip.arrival_phi == pytest.approx(phi0, abs=1e-6)
    assert strip.arrival_slope == pytest.approx(-alpha, abs=1e-6)


def test_arrival_slope_obeys_clairaut():
    phi0, alpha = 1.2, -0.4
    reference = strip_phase(phi0, alpha, 1.0)
    eps = reference.first_return + 1.5 * reference.period
    strip = middle_strip_phase(phi0, alpha, eps)
    c = reference.c
    expected = c * c / (math.sin(strip.arrival_phi) ** 2 - c * c)
    assert strip.arrival_slope ** 2 == pytest.approx(expected, rel=1e-6)
    assert strip.half_periods == 2


def test_phase_straddles_one_across_the_bracket():
    phases = []
    for r0 in (0.1, 0.003):
        crossing = shoot_from_boundary(STRIP, r0).crossing
        phases.append(strip_phase(crossing.phi0, crossing.alpha, 0.3).phase)
    assert (phases[0] - 1.0) * (phases[1] - 1.0) < 0.0


def test_bracket_without_roots_is_exhausted():
    with pytest.raises(BracketExhausted):
        find_double_contacts(STRIP, 0.3, (0.2, 0.3), n_targets=1, scan_n=4)


def test_double_contacts_need_a_reflected_profile():
    with pytest.raises(DomainError):
        find_double_contacts(SMOOTH, 0.3)


def test_double_contacts_check_epsilon():
    with pytest.raises(DomainError):
        find_double_contacts(STRIP, 0.2)


@pytest.mark.slow
def test_first_three_double_contacts():
    contacts = find_double_contacts(STRIP, 0.3, n_targets=3)
    assert len(contacts) == 3
    assert [c.periods_in_strip for c in contacts] == [1, 2, 3]
    r0s = [c.r0 for c in contacts]
    assert r0s == sorted(r0s, reverse=True)
    for c in contacts:
        assert c.residual <= 1e-6
        assert c.landing_r == pytest.approx(-0.3 - c.r0, abs=1e-5)
    index = [c.index_estimate for c in contacts]
    assert index[0] < index[1] < index[2]
    assert all(c.index_estimate >= c.periods_in_strip for c in contacts)


@pytest.mark.slow
def test_double_contact_is_mirror_symmetric():
    eps = STRIP.epsilon
    contact = find_double_contacts(STRIP, eps, n_targets=1, full_continuation=False)[0]
    shot = shoot_from_boundary(STRIP, contact.r0)
    strip = middle_strip_phase(contact.phi0, contact.alpha, eps, profile=STRIP)
    _, tail = continue_to_boundary(STRIP, strip, eps)
    phis = np.linspace(0.05, min(contact.phi0, strip.arrival_phi) - 1e-3, 200)
    mirrored = shot.trajectory.dense(phis)[0] + tail.dense(phis)[0]
    np.testing.assert_allclose(mirrored, -eps, atol=1e-6)
