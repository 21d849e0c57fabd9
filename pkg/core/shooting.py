"""Boundary geodesics by series-started shooting from φ = 0, and double contacts."""
import logging
import math
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

import config
from .errors import BracketExhausted, DomainError, NoCrossing, SeriesInvalid
from .geodesics import (half_period_length, integrate_geodesic, integrate_phi, integrate_t, leaf_r, phi_chart_rhs,
                        quarter_period, r_advance, slope_state)
from .interfaces import BaseProfile
from .metrics import barrier_discriminant, eval_profile
from .models import (Certificates, Crossing, DoubleContact, GeodesicState, MiddleStripPhase, PhiState,
                     ShootResult, StripPhase, Trajectory)
from .morse import PRODUCT, jacobi_zeros
from .profiles import ReflectedProfile

logger = logging.getLogger(__name__)

CROSSING_COLUMNS = ["r0", "phi0", "alpha", "bound", "bound_ok", "metric_angle"]
COVERAGE_COLUMNS = ["r0", "reached", "phi0", "alpha"]


def _require_boundary_profile(p: BaseProfile) -> None:
    if p.is_product:
        raise DomainError("the product profile has no boundary geodesics with r0>0 besides verticals",
                          kind=p.kind)


def _series(dlam0: float, r0: float, phi: float) -> Tuple[float, float]:
    return r0 + 0.25 * dlam0 * phi * phi, 0.5 * dlam0 * phi


def contact_second_derivative(traj: Trajectory, r0: float, h: float = config.CONTACT_FD_STEP) -> float:
    """d²r/dφ² at the contact, measured on the integrated φ-chart solution.

    r is even in φ, so D(h) = 2(r(h) − r0)/h² = r″(0) + a·h² + b·h⁴ + ...;
    two Richardson steps over h, 2h and 4h remove the h² and h⁴ terms.
    """
    if traj.chart != "phi" or traj.dense is None:
        raise DomainError("contact_second_derivative needs a φ-chart trajectory with dense output",
                          chart=traj.chart)
    lo, hi = sorted((float(traj.phi[0]), float(traj.phi[-1])))
    h = max(h, lo)
    if 4.0 * h > hi:
        raise DomainError(f"trajectory ends at φ={hi:.4g}, before 4h={4.0 * h:.4g}", h=h)
    d = [2.0 * (traj.r_at_phi(k * h) - r0) / (k * h) ** 2 for k in (1.0, 2.0, 4.0)]
    first = [(4.0 * d[0] - d[1]) / 3.0, (4.0 * d[1] - d[2]) / 3.0]
    return (16.0 * first[0] - first[1]) / 15.0


def _certificates(p: BaseProfile, traj: Trajectory, r0: float) -> Tuple[bool, bool, bool, float]:
    inside = (traj.r >= 0.0) & (traj.r < r0)
    margin = traj.r[inside] - leaf_r(r0, traj.phi[inside])
    worst = float(np.max(margin)) if margin.size else -math.inf
    # margin is O(r0³) near the contact; roundoff dominates for small r0
    limit = config.SATURATION_TOL if p.saturates_barrier else config.CERT_TOL
    barrier_ok = worst <= limit

    nonneg = traj.r >= 0.0
    monotone_ok = bool(np.all(traj.drdphi[nonneg] <= config.CERT_TOL))
    second_ok = True
    for phi, r, q in zip(traj.phi[nonneg], traj.r[nonneg], traj.drdphi[nonneg]):
        if not math.isfinite(q):
            continue
        dlam = p.derivatives(float(r))[1]
        if not phi_chart_rhs(p, float(phi), float(r), float(q)) > dlam - config.CERT_TOL:
            second_ok = False
            break
    return barrier_ok, monotone_ok, second_ok, worst


def shoot_from_boundary(p: BaseProfile, r0: float, phi_start: float = config.PHI_START,
                        tol: float = config.ODE_TOL) -> ShootResult:
    _require_boundary_profile(p)
    if r0 <= 0.0:
        raise DomainError(f"boundary point must have r0>0, got {r0}", r0=r0)
    lam0, dlam0, _ = eval_profile(p, r0)
    if lam0 <= config.LAMBDA_MIN:
        raise DomainError(f"λ vanishes at r0={r0}", r0=r0)

    r_s, q_s = _series(dlam0, r0, phi_start)
    remainder = abs(phi_chart_rhs(p, phi_start, r_s, q_s) - 0.5 * dlam0) * phi_start ** 2 / 6.0
    if remainder > tol:
        raise SeriesInvalid(f"series remainder {remainder:.3g} exceeds tol={tol:g}; reduce phi_start",
                            phi_start=phi_start, remainder=remainder)

    phi_end = 0.5 * math.pi + config.NO_CROSSING_MARGIN
    start = slope_state(p, PhiState(r_s, q_s, phi_start))
    traj = integrate_geodesic(p, start, (max(config.PHI_MIN, 0.5 * phi_start), phi_end), tol, stop_r=0.0)
    if traj.stop_reason != "stop_r":
        raise NoCrossing(f"boundary geodesic from r0={r0} did not reach r=0 inside φ<{phi_end:.4g} "
                         f"(stop={traj.stop_reason})", r0=r0, phi=float(traj.phi[-1]))

    end = traj.final_state
    crossing = Crossing(phi0=end.phi, alpha=float(traj.drdphi[-1]))
    barrier_ok, monotone_ok, second_ok, worst = _certificates(p, traj, r0)
    first_piece = traj.segments[0] if traj.segments else traj
    second = contact_second_derivative(first_piece, r0)
    provisional = ShootResult(r0=r0, phi_start=phi_start, trajectory=traj, crossing=crossing,
                              certificates=Certificates(barrier_ok, monotone_ok, second_ok, False),
                              barrier_worst=worst, contact_second_derivative=second)
    convex_ok = convexity_check(p, provisional)
    result = ShootResult(r0=r0, phi_start=phi_start, trajectory=traj, crossing=crossing,
                         certificates=Certificates(barrier_ok, monotone_ok, second_ok, convex_ok),
                         barrier_worst=worst, contact_second_derivative=second)
    logger.debug(f"shoot r0={r0:g}: phi0={crossing.phi0:.8g}, alpha={crossing.alpha:.8g}, "
                 f"segments={len(traj.segments) or 1}, certificates={result.certificates}")
    return result


def convexity_check(p: BaseProfile, result: ShootResult, phi_band: float = 0.2) -> bool:
    _require_boundary_profile(p)
    traj = result.trajectory
    for phi, r, q in zip(traj.phi, traj.r, traj.drdphi):
        if phi > phi_band:
            continue
        if phi_chart_rhs(p, float(phi), float(r), float(q)) > config.CERT_TOL:
            return False
        if not barrier_discriminant(p, float(r), float(phi)) < 0.0:
            return False
    return True


def _max_slope_bound(p: BaseProfile, r0: float) -> float:
    grid = np.linspace(0.0, r0, 201)
    slopes = np.array([p.derivatives(float(r))[1] for r in grid])
    return float(slopes[np.argmax(np.abs(slopes))]) * 0.5 * math.pi


def crossing_angle_curve(p: BaseProfile, r0_list: Iterable[float], tol: float = config.ODE_TOL) -> pd.DataFrame:
    rows = []
    for r0 in r0_list:
        res = shoot_from_boundary(p, float(r0), tol=tol)
        bound = _max_slope_bound(p, float(r0))
        alpha = res.crossing.alpha
        rows.append({"r0": float(r0), "phi0": res.crossing.phi0, "alpha": alpha, "bound": bound,
                     "bound_ok": bool(bound < alpha < 0.0), "metric_angle": res.crossing.metric_angle})
    return pd.DataFrame(rows, columns=CROSSING_COLUMNS)


def boundary_coverage(p: BaseProfile, r0_grid: Iterable[float], tol: float = config.ODE_TOL) -> pd.DataFrame:
    rows = []
    for r0 in r0_grid:
        try:
            res = shoot_from_boundary(p, float(r0), tol=tol)
            rows.append({"r0": float(r0), "reached": True, "phi0": res.crossing.phi0, "alpha": res.crossing.alpha})
        except NoCrossing as e:
            logger.info(f"no crossing from r0={r0:g}: {e}")
            rows.append({"r0": float(r0), "reached": False, "phi0": math.nan, "alpha": math.nan})
    return pd.DataFrame(rows, columns=COVERAGE_COLUMNS)


# --- middle strip ------------------------------------------------------------

def strip_phase(phi0: float, alpha: float, epsilon: float) -> StripPhase:
    """Phase of the product geodesic leaving (0, φ0) with slope α<0 toward r=−ε.

    The geodesic returns to φ0 with slope −α at r = −d, −d−P, −d−2P, ...;
    `phase` = (ε−d)/P + 1 is continuous in (φ0, α) and equals n exactly when
    the n-th return lands on r = −ε.
    """
    if not alpha < 0.0:
        raise DomainError(f"alpha must be negative, got {alpha}", alpha=alpha)
    if not epsilon > 0.0:
        raise DomainError(f"epsilon must be positive, got {epsilon}", epsilon=epsilon)
    c = abs(alpha) * math.sin(phi0) / math.sqrt(1.0 + alpha * alpha)
    quarter = quarter_period(c)
    period = 4.0 * quarter
    advance = r_advance(c, phi0)
    first_return = 2.0 * (2.0 * quarter - advance) if phi0 < 0.5 * math.pi else 2.0 * advance
    phase = (epsilon - first_return) / period + 1.0
    branch = int(math.floor(phase)) if phase >= 1.0 else 0
    return StripPhase(c=c, period=period, first_return=first_return, phase=phase,
                      branch=branch, fraction=phase - math.floor(phase))


def middle_strip_phase(phi0: float, alpha: float, epsilon: float, tol: float = config.ODE_TOL,
                       profile: Optional[BaseProfile] = None) -> MiddleStripPhase:
    phase = strip_phase(phi0, alpha, epsilon)
    p = profile or PRODUCT
    phidot = 1.0 / (math.sin(phi0) * math.sqrt(1.0 + alpha * alpha))
    s0 = GeodesicState(0.0, phi0, alpha * phidot, phidot)
    t_end = (max(phase.phase, 0.0) + 2.0) * 2.0 * half_period_length(phase.c) + 1.0
    traj = integrate_t(p, s0, t_end, tol, stop_r=-epsilon, epsilon=epsilon, phi_levels=(phi0,))
    if traj.stop_reason != "stop_r":
        raise DomainError(f"geodesic did not reach r=-{epsilon} by t={t_end:.4g}", phi0=phi0, alpha=alpha)
    end = traj.final_state
    slope = end.rdot / end.phidot if end.phidot != 0.0 else math.copysign(math.inf, end.rdot)
    passes = [e for e in traj.events_of("phi_level", level=phi0, direction=-1) if e.state.r > -epsilon]
    return MiddleStripPhase(arrival_phi=end.phi, arrival_slope=slope, half_periods=len(passes),
                            trajectory=traj, phase=phase)


def continue_to_boundary(p: BaseProfile, strip: MiddleStripPhase, epsilon: float,
                         tol: float = config.ODE_TOL,
                         phi_stop: float = config.PHI_START) -> Tuple[float, Trajectory]:
    """Follow the geodesic past r=−ε down to φ_stop and extrapolate its boundary point."""
    start = PhiState(-epsilon, strip.arrival_slope, strip.arrival_phi)
    traj = integrate_phi(p, start, (strip.arrival_phi, phi_stop), tol)
    r_end = float(traj.r[-1])
    _, dlam, _ = eval_profile(p, r_end)
    return r_end - 0.25 * dlam * phi_stop ** 2, traj


def find_double_contacts(p: BaseProfile, epsilon: Optional[float] = None,
                         r0_bracket: Tuple[float, float] = config.DOUBLE_BRACKET,
                         n_targets: int = 3, tol: float = config.ODE_TOL,
                         scan_n: int = config.DOUBLE_SCAN_N,
                         full_continuation: bool = True) -> List[DoubleContact]:
    if not isinstance(p, ReflectedProfile):
        raise DomainError("double contacts need a reflected profile", kind=p.kind)
    eps = p.epsilon
    if epsilon is not None and abs(epsilon - eps) > 1e-15:
        raise DomainError(f"epsilon={epsilon} differs from the profile's {eps}")
    if n_targets < 1:
        raise DomainError("n_targets must be at least 1")
    lo, hi = sorted(float(x) for x in r0_bracket)
    if lo <= 0.0:
        raise DomainError("r0 bracket must be positive", bracket=r0_bracket)

    cache: Dict[float, Tuple[Crossing, StripPhase]] = {}

    def phase_of(r0: float) -> float:
        if r0 not in cache:
            crossing = shoot_from_boundary(p, r0, tol=tol).crossing
            cache[r0] = (crossing, strip_phase(crossing.phi0, crossing.alpha, eps))
        return cache[r0][1].phase

    grid = np.geomspace(hi, lo, scan_n)
    values = [phase_of(float(r)) for r in grid]

    # root of phase(r0) = n for each integer n ≥ 1 crossed by the scan
    roots: Dict[int, float] = {}
    for (a, ha), (b, hb) in zip(zip(grid[:-1], values[:-1]), zip(grid[1:], values[1:])):
        for n in range(max(1, math.ceil(min(ha, hb))), math.floor(max(ha, hb)) + 1):
            if ha == n:
                root = float(a)
            elif hb == n:
                root = float(b)
            else:
                root = brentq(lambda r, k=n: phase_of(r) - k, float(b), float(a), xtol=1e-15, rtol=1e-13)
            roots.setdefault(n, root)
    ordered = []
    for n in sorted(roots):
        if not ordered or roots[n] < ordered[-1][1]:
            ordered.append((n, roots[n]))
    logger.info(f"double-contact scan on [{lo:g}, {hi:g}]: branches {[n for n, _ in ordered]}")

    contacts: List[DoubleContact] = []
    for n, r0 in ordered:
        if len(contacts) == n_targets:
            break
        crossing = shoot_from_boundary(p, r0, tol=tol).crossing
        strip = middle_strip_phase(crossing.phi0, crossing.alpha, eps, tol, profile=p)
        residual = math.hypot(strip.arrival_phi - crossing.phi0, strip.arrival_slope + crossing.alpha)
        if residual > config.ROOT_TOL:
            logger.warning(f"root r0={r0:.12g} (n={n}) rejected: residual {residual:.3g}")
            continue
        index = jacobi_zeros(strip.trajectory, tol, sub_arc_only=True).index
        landing = continue_to_boundary(p, strip, eps, tol)[0] if full_continuation else None
        contacts.append(DoubleContact(r0=r0, epsilon=eps, phi0=crossing.phi0, alpha=crossing.alpha,
                                      residual=residual, periods_in_strip=n, index_estimate=index,
                                      landing_r=landing))
        logger.info(f"double contact n={n}: r0={r0:.12g}, residual={residual:.3g}, index={index}")

    if len(contacts) < n_targets:
        raise BracketExhausted(f"found {len(contacts)} of {n_targets} double contacts in [{lo:g}, {hi:g}]",
                               found=len(contacts), wanted=n_targets)
    return contacts
