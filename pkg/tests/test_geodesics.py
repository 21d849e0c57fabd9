import math

import numpy as np
import pytest

import config
from core.errors import BoundaryApproach, DegeneracyError, DomainError, SlopeBlowup
from core.geodesics import (clairaut_start, closed_form_leaf, geodesic_rhs, half_period_length, heading_of,
                            integrate_geodesic, integrate_phi, integrate_t, join_segments, leaf_r,
                            leaf_slope_at_focus, measured_period, period_bound, quarter_period, r_advance,
                            slope_state, small_c_period, speed, turning_start, unit_state)
from core.models import GeodesicState, PhiState
from core.profiles import C1CosineProfile, ProductProfile, SmoothCompliantProfile

PRODUCT = ProductProfile()
C1 = C1CosineProfile()
HALF_PI = 0.5 * math.pi


@pytest.fixture(scope="module")
def turning_orbit():
    """c = 0.5 from the turning point, a little over two periods."""
    return integrate_t(PRODUCT, turning_start(0.5), 2 * 2 * half_period_length(0.5) + 0.3)


# --- right-hand side -----------------------------------------------------------

def test_equator_is_a_geodesic():
    rdd, pdd = geodesic_rhs(PRODUCT, GeodesicState(0.0, HALF_PI, 1.0, 0.0))
    assert rdd == pytest.approx(0.0, abs=1e-15)
    assert pdd == pytest.approx(0.0, abs=1e-15)


def test_product_vertical_acceleration():
    rdd, pdd = geodesic_rhs(PRODUCT, GeodesicState(0.0, math.pi / 4, 0.0, math.sqrt(2.0)))
    assert rdd == pytest.approx(0.0, abs=1e-15)
    assert pdd == pytest.approx(-2.0)


def test_c1cosine_radial_acceleration():
    rdd, pdd = geodesic_rhs(C1, GeodesicState(math.pi / 4, HALF_PI, math.sqrt(2.0), 0.0))
    assert rdd == pytest.approx(2.0)
    assert pdd == pytest.approx(0.0, abs=1e-12)


def test_rhs_rejects_the_boundary():
    with pytest.raises(DegeneracyError):
        geodesic_rhs(PRODUCT, GeodesicState(0.0, 0.0, 1.0, 0.0))


# --- start states --------------------------------------------------------------

@pytest.mark.parametrize("heading", [0.0, 0.4, -2.0, 3.0])
def test_unit_state_has_unit_speed(heading):
    p = SmoothCompliantProfile()
    s = unit_state(p, 0.3, 1.1, heading)
    assert speed(p, s) == pytest.approx(1.0, rel=1e-14)
    assert heading_of(p, s) == pytest.approx(heading)


def test_clairaut_and_turning_starts():
    s = clairaut_start(0.5)
    assert (s.rdot, s.phidot) == pytest.approx((0.5, -math.sqrt(0.75)))
    t = turning_start(0.5)
    assert t.phi == pytest.approx(math.pi / 6)
    assert speed(PRODUCT, t) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        clairaut_start(1.5)
    with pytest.raises(DomainError):
        turning_start(0.0)


# --- t chart -------------------------------------------------------------------

def test_equator_geodesic_is_a_straight_line():
    traj = integrate_t(PRODUCT, GeodesicState(0.0, HALF_PI, 1.0, 0.0), 5.0)
    np.testing.assert_allclose(traj.r, traj.t, atol=1e-9)
    np.testing.assert_allclose(traj.phi, HALF_PI, atol=1e-9)
    assert traj.events_of("turning_point") == []
    assert traj.clairaut_c == pytest.approx(1.0)


def test_turning_orbit_conserves(turning_orbit):
    assert turning_orbit.speed_drift < 1e-8
    assert turning_orbit.clairaut_drift < 1e-8
    assert turning_orbit.confinement_margin > -1e-8
    assert float(np.min(np.sin(turning_orbit.phi))) == pytest.approx(0.5, abs=1e-6)


def test_turning_orbit_period_matches_quadrature(turning_orbit):
    period_r, period_t = measured_period(turning_orbit)
    assert period_r == pytest.approx(4 * quarter_period(0.5), abs=1e-6)
    assert period_t == pytest.approx(2 * half_period_length(0.5), abs=1e-6)


def test_states_one_period_apart_agree():
    c = 0.3
    period = 2 * half_period_length(c)
    traj = integrate_t(PRODUCT, clairaut_start(c), 2 * period + 0.1, tol=1e-12)
    for t in np.linspace(0.0, period, 7):
        a, b = traj.state_at(float(t)), traj.state_at(float(t) + period)
        np.testing.assert_allclose([b.phi, b.rdot, b.phidot], [a.phi, a.rdot, a.phidot],
                                   atol=10 * config.ODE_TOL)
        assert b.r - a.r == pytest.approx(4 * quarter_period(c), abs=1e-8)
        # half a period later the path is mirrored in the equator
        m = traj.state_at(float(t) + 0.5 * period)
        np.testing.assert_allclose([m.phi, m.rdot, m.phidot], [math.pi - a.phi, a.rdot, -a.phidot],
                                   atol=10 * config.ODE_TOL)


def test_small_c_period_matches_integration():
    c = 0.01
    traj = integrate_t(PRODUCT, clairaut_start(c), 2 * half_period_length(c) + 0.5)
    period_r, _ = measured_period(traj)
    assert period_r == pytest.approx(4 * quarter_period(c), abs=1e-6)


def test_turning_orbit_events(turning_orbit):
    crossings = turning_orbit.events_of("equator_crossing")
    assert len(crossings) == 4
    assert [e.direction for e in crossings] == [1, -1, 1, -1]
    for e in crossings:
        assert e.state.phi == pytest.approx(HALF_PI, abs=1e-10)
    turns = turning_orbit.events_of("turning_point")
    assert len(turns) >= 3
    for e in turns:
        assert math.sin(e.state.phi) == pytest.approx(0.5, abs=1e-8)


def test_state_at_follows_dense_output(turning_orbit):
    t = 0.5 * (turning_orbit.t_start + turning_orbit.t_end)
    s = turning_orbit.state_at(t)
    assert speed(PRODUCT, s) == pytest.approx(1.0, abs=1e-8)


def test_stop_r_is_terminal():
    traj = integrate_t(PRODUCT, clairaut_start(0.3, r=-1.0), 100.0, stop_r=0.0)
    assert traj.stop_reason == "stop_r"
    assert traj.r[-1] == pytest.approx(0.0, abs=1e-10)
    assert traj.events[-1].kind == "midline_crossing"


def test_vertical_geodesic_hits_the_boundary():
    s0 = GeodesicState(0.0, HALF_PI, 0.0, -1.0)
    with pytest.raises(BoundaryApproach):
        integrate_t(PRODUCT, s0, 5.0)
    traj = integrate_t(PRODUCT, s0, 5.0, stop_at_boundary=True)
    assert traj.stop_reason == "boundary"
    assert traj.events[-1].kind == "boundary_contact"


def test_integrate_t_rejects_bad_starts():
    with pytest.raises(DomainError):
        integrate_t(PRODUCT, GeodesicState(0.0, HALF_PI, 2.0, 0.0), 1.0)
    with pytest.raises(DomainError):
        integrate_t(PRODUCT, clairaut_start(0.5), 0.0)


def test_phi_window_is_terminal():
    traj = integrate_t(PRODUCT, clairaut_start(0.5), 6.0, phi_window=(1.0, math.pi - 0.1))
    assert traj.stop_reason == "phi_end"
    assert traj.phi[-1] == pytest.approx(1.0, abs=1e-10)


def test_phi_levels_are_reported():
    traj = integrate_t(PRODUCT, clairaut_start(0.5), 6.0, phi_levels=(1.0,))
    levels = traj.events_of("phi_level", level=1.0)
    assert levels
    for e in levels:
        assert e.state.phi == pytest.approx(1.0, abs=1e-10)


# --- φ chart -------------------------------------------------------------------

def test_c1cosine_leaf_is_reproduced():
    kappa = math.pi / 4
    traj = integrate_phi(C1, PhiState(0.0, -1.0, HALF_PI), (HALF_PI, 0.2))
    phis = np.linspace(0.2, HALF_PI, 200)
    np.testing.assert_allclose(traj.dense(phis)[0], leaf_r(kappa, phis), atol=1e-5)


def test_c1cosine_leaf_reaches_its_contact_point():
    kappa = math.pi / 6
    phi_mid, slope = closed_form_leaf(kappa, 0.0)
    traj = integrate_phi(C1, PhiState(0.0, slope, phi_mid), (phi_mid, 1e-3))
    assert traj.r[-1] == pytest.approx(kappa, abs=1e-5)


def test_vertical_line_in_the_phi_chart():
    traj = integrate_phi(PRODUCT, PhiState(0.0, 0.0, HALF_PI), (HALF_PI, 0.1))
    np.testing.assert_allclose(traj.r, 0.0, atol=1e-14)
    # |ds/dφ| = sinφ on the vertical
    assert traj.arc_length == pytest.approx(math.cos(0.1), rel=1e-8)


def test_phi_chart_slope_blowup():
    # the product geodesic from the equator with c = 0.5 turns at φ = π/6
    with pytest.raises(SlopeBlowup):
        integrate_phi(PRODUCT, PhiState(0.0, 0.5 / math.sqrt(0.75), HALF_PI), (HALF_PI, 0.1))


def test_both_charts_trace_the_same_path():
    c = 0.5
    in_t = integrate_t(PRODUCT, clairaut_start(c), 2.0, phi_levels=(0.6,))
    t_star = in_t.events_of("phi_level", level=0.6)[0].t
    in_phi = integrate_phi(PRODUCT, PhiState(0.0, -c / math.sqrt(1 - c * c), HALF_PI), (HALF_PI, 0.6))
    r, phi = in_t.dense(np.linspace(0.0, t_star, 400))[:2]
    assert np.max(np.abs(r - in_phi.dense(phi)[0])) <= 1e-6
    assert in_phi.arc_length == pytest.approx(t_star, abs=1e-6)


def test_steep_stretch_switches_to_the_t_chart():
    # c = 0.5 from the equator: down to the turning point at φ = π/6 and back up
    c = 0.5
    traj = integrate_geodesic(PRODUCT, clairaut_start(c), (0.1, math.pi - 0.1), stop_r=2 * quarter_period(c))
    assert traj.stop_reason == "stop_r"
    assert [s.chart for s in traj.segments] == ["phi", "t", "phi"]
    assert traj.chart == "mixed"
    assert traj.phi[-1] == pytest.approx(HALF_PI, abs=1e-6)
    assert traj.t[-1] == pytest.approx(half_period_length(c), abs=1e-6)
    assert traj.speed_drift < 1e-8
    assert traj.clairaut_drift < 1e-8
    turns = traj.segments[1].events_of("turning_point")
    assert len(turns) == 1
    assert math.sin(turns[0].state.phi) == pytest.approx(c, abs=1e-8)
    assert np.all(np.abs(traj.segments[0].drdphi) <= config.SLOPE_SWITCH + 1e-6)


def test_gentle_path_stays_in_the_phi_chart():
    start = slope_state(C1, PhiState(0.0, -1.0, HALF_PI), sigma=-1.0)
    traj = integrate_geodesic(C1, start, (0.2, 2.5))
    assert traj.chart == "phi"
    assert traj.segments == ()
    assert traj.stop_reason == "phi_end"
    assert join_segments([traj]) is traj


def test_slope_state_has_unit_speed():
    s = slope_state(PRODUCT, PhiState(0.2, -3.0, 1.0), sigma=-1.0)
    assert speed(PRODUCT, s) == pytest.approx(1.0, rel=1e-14)
    assert s.rdot / s.phidot == pytest.approx(-3.0)
    assert s.phidot < 0.0


def test_switching_needs_a_window_around_the_start():
    with pytest.raises(DomainError):
        integrate_geodesic(PRODUCT, clairaut_start(0.5), (0.1, 1.0))


def test_phi_chart_rejects_guard_band():
    with pytest.raises(DegeneracyError):
        integrate_phi(PRODUCT, PhiState(0.0, 0.0, 0.5), (0.5, 0.0))


# --- closed forms --------------------------------------------------------------

def test_quarter_period_examples():
    assert quarter_period(0.5) < math.pi * math.sqrt(0.5 / 3.0)
    assert quarter_period(0.01) < math.pi * math.sqrt(0.01 / 2.02)
    assert quarter_period(0.999) == pytest.approx(HALF_PI, abs=2e-3)


@pytest.mark.parametrize("c", [0.5, 0.2, 0.1, 0.05, 0.01])
def test_period_below_bound(c):
    assert 4 * quarter_period(c) < period_bound(c)


def test_small_c_asymptote():
    assert 4 * quarter_period(1e-4) == pytest.approx(small_c_period(1e-4), rel=1e-3)


def test_r_advance_is_incomplete_quarter_period():
    assert r_advance(0.3, HALF_PI) == pytest.approx(quarter_period(0.3), rel=1e-12)
    assert r_advance(0.3, math.asin(0.3)) == pytest.approx(0.0, abs=1e-15)
    assert 0.0 < r_advance(0.3, 1.0) < quarter_period(0.3)
    with pytest.raises(DomainError):
        r_advance(0.3, 0.1)


@pytest.mark.parametrize("c", [0.01, 0.3, 0.7, 0.99])
def test_half_period_length_at_least_two(c):
    assert half_period_length(c) >= 2.0 - 1e-9


def test_half_period_length_limit():
    assert half_period_length(0.999999) == pytest.approx(math.pi, abs=1e-5)


def test_half_period_length_matches_integrated_arc():
    traj = integrate_t(PRODUCT, clairaut_start(0.5), 10.0)
    first_return = traj.events_of("equator_crossing")[0]
    assert first_return.t == pytest.approx(half_period_length(0.5), abs=1e-6)


@pytest.mark.parametrize("c", [0.0, 1.0, -0.2])
def test_quadratures_reject_bad_c(c):
    with pytest.raises(DomainError):
        quarter_period(c)


def test_closed_form_leaf_examples():
    phi, slope = closed_form_leaf(math.pi / 4, 0.0)
    assert phi == pytest.approx(HALF_PI)
    assert slope == pytest.approx(-1.0)
    phi, _ = closed_form_leaf(math.pi / 3, math.pi / 6)
    assert phi == pytest.approx(math.acos(1.0 / 3.0))
    phi, _ = closed_form_leaf(0.5, 0.5 - 1e-12)
    assert phi == pytest.approx(0.0, abs=1e-5)
    assert leaf_slope_at_focus(math.pi / 4) == pytest.approx(-1.0)
    with pytest.raises(DomainError):
        closed_form_leaf(0.5, 0.9)
