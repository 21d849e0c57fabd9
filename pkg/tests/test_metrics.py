import math

import numpy as np
import pytest

from core.errors import DegeneracyError, DomainError
from core.geodesics import geodesic_rhs
from core.metrics import (SurfaceMetric, barrier_discriminant, check_point, christoffel, curvature_fd,
                          gaussian_curvature, ricci_diagonal, validate_profile)
from core.models import GeodesicState
from core.profiles import C1CosineProfile, ProductProfile, SmoothCompliantProfile


PRODUCT = ProductProfile()
C1 = C1CosineProfile()
SMOOTH = SmoothCompliantProfile()


def test_metric_coefficients():
    m = SurfaceMetric(C1)
    E, G = m.coefficients(math.pi / 4, math.pi / 2)
    assert E == pytest.approx(0.5)
    assert G == pytest.approx(0.25)
    assert m.norm(math.pi / 4, math.pi / 2, 1.0, 0.0) == pytest.approx(math.sqrt(0.5))


@pytest.mark.parametrize("phi", [0.0, 1e-7, math.pi])
def test_guard_band_is_rejected(phi):
    with pytest.raises(DegeneracyError):
        check_point(PRODUCT, 0.0, phi)


def test_guard_band_can_be_allowed():
    assert check_point(PRODUCT, 0.0, 0.0, allow_boundary=True) == (1.0, 0.0, 0.0)


def test_vanishing_lambda_is_rejected():
    with pytest.raises(DegeneracyError):
        check_point(SMOOTH, SMOOTH.r_zero, 1.0)


@pytest.mark.parametrize("phi, expected", [(math.pi / 2, 1.0), (math.pi / 4, 4.0)])
def test_product_curvature(phi, expected):
    assert gaussian_curvature(SurfaceMetric(PRODUCT), 0.7, phi) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("profile", [C1, SMOOTH])
@pytest.mark.parametrize("r, phi", [(0.3, 1.0), (0.8, 0.4), (1.0, 2.5)])
def test_curvature_matches_finite_differences(profile, r, phi):
    m = SurfaceMetric(profile)
    assert gaussian_curvature(m, r, phi) == pytest.approx(curvature_fd(m, r, phi), rel=1e-5)


def test_curvature_in_the_flattening_region():
    m = SurfaceMetric(SMOOTH)
    assert gaussian_curvature(m, 1.3, 1.2) == pytest.approx(curvature_fd(m, 1.3, 1.2), rel=1e-5)


@pytest.mark.parametrize("r, phi, rdot, phidot", [
    (0.2, 1.1, 0.7, -0.3),
    (0.9, 0.5, -0.2, 1.4),
    (-0.4, 2.0, 1.0, 0.1),
])
def test_christoffel_contraction_is_the_geodesic_rhs(r, phi, rdot, phidot):
    g = christoffel(SurfaceMetric(SMOOTH), r, phi)
    rdd = -(g.r_rr * rdot ** 2 + 2 * g.r_rphi * rdot * phidot + g.r_phiphi * phidot ** 2)
    pdd = -(g.phi_rr * rdot ** 2 + 2 * g.phi_rphi * rdot * phidot + g.phi_phiphi * phidot ** 2)
    expected = geodesic_rhs(SMOOTH, GeodesicState(r, phi, rdot, phidot))
    np.testing.assert_allclose((rdd, pdd), expected, rtol=1e-12, atol=1e-14)


def test_barrier_discriminant_on_the_product():
    assert barrier_discriminant(PRODUCT, 0.0, math.pi / 4) == pytest.approx(-3.0)
    assert barrier_discriminant(PRODUCT, 0.0, math.pi / 2) == pytest.approx(0.0, abs=1e-30)


def test_ricci_product_is_exact():
    assert ricci_diagonal(PRODUCT, -1.0) == (0.0, 1.0, 1.0)


def test_ricci_c1cosine():
    np.testing.assert_allclose(ricci_diagonal(C1, math.pi / 4), (2.0, 2.0, 2.0), rtol=1e-12)


def test_ricci_smooth_non_negative():
    grid = np.linspace(1e-3, 1.0, 1000)
    entries = np.array([ricci_diagonal(SMOOTH, float(r)) for r in grid])
    assert np.all(entries >= 0.0)


def test_ricci_pole_at_zero_of_lambda():
    with pytest.raises(DegeneracyError):
        ricci_diagonal(SMOOTH, SMOOTH.r_zero)


def test_validate_smooth_default():
    report = validate_profile(SMOOTH, 1.0, 1000)
    assert report.compliant
    barrier = report.check("barrier")
    assert barrier.worst_margin < 0.0
    assert not barrier.saturated


def test_validate_c1cosine_is_saturated():
    report = validate_profile(C1, 1.0, 1000)
    barrier = report.check("barrier")
    assert not barrier.holds
    assert barrier.saturated
    assert barrier.worst_margin == pytest.approx(0.0, abs=1e-15)
    assert not report.compliant
    assert report.weakly_compliant


def test_validate_product_fails_barrier_everywhere():
    report = validate_profile(PRODUCT, 1.0, 1000)
    barrier = report.check("barrier")
    assert barrier.violations == 1000
    assert not report.weakly_compliant


def test_validate_report_serializes():
    data = validate_profile(SMOOTH, 1.0, 50).to_dict()
    assert data["compliant"] is True
    assert [c["name"] for c in data["checks"]] == ["barrier", "second_derivative", "flat_zero"]


def test_validate_beyond_the_domain_is_not_compliant():
    report = validate_profile(C1, 2.0, 1000)
    assert not report.compliant
    assert not report.weakly_compliant
    domain = report.check("domain")
    assert domain.worst_at > 0.5 * math.pi
    assert domain.worst_at == pytest.approx(0.5 * math.pi, abs=2.0 / 1000)
    assert domain.violations == 1000 - 785
    assert report.check("second_derivative").worst_at <= 0.5 * math.pi


def test_validate_smooth_past_its_zero():
    report = validate_profile(SMOOTH, 2.0, 100)
    assert report.check("domain").worst_at > SMOOTH.r_zero
    assert [c.name for c in report.checks][-1] == "domain"


@pytest.mark.parametrize("r_max, grid_n", [(1.0, 1), (0.0, 100)])
def test_validate_rejects_bad_grid(r_max, grid_n):
    with pytest.raises(DomainError):
        validate_profile(SMOOTH, r_max, grid_n)
