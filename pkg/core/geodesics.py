"""Geodesics of the quotient metric in the t chart (unit speed) and the φ chart."""
import logging
import math
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import bisect

import config
from .errors import (BoundaryApproach, DegeneracyError, DomainError, GeolabError,
                     SlopeBlowup, StepFailure)
from .interfaces import BaseProfile
from .metrics import SurfaceMetric, check_point
from .models import Event, EventKind, GeodesicState, PhiState, Trajectory

logger = logging.getLogger(__name__)

HALF_PI = 0.5 * math.pi


def _accelerations(lam: float, dlam: float, phi: float, rdot: float, phidot: float) -> Tuple[float, float]:
    cot = math.cos(phi) / math.sin(phi)
    rddot = -2.0 * cot * rdot * phidot - dlam / (2.0 * lam) * rdot * rdot + dlam * phidot * phidot
    phiddot = cot * (rdot * rdot / lam - phidot * phidot) - 2.0 * dlam / lam * rdot * phidot
    return rddot, phiddot


def _phi_chart_rhs(lam: float, dlam: float, phi: float, slope: float) -> float:
    cot = math.cos(phi) / math.sin(phi)
    return (-cot * slope ** 3 / lam + 1.5 * dlam / lam * slope * slope
            - cot * slope + dlam)


def geodesic_rhs(p: BaseProfile, s: GeodesicState) -> Tuple[float, float]:
    lam, dlam, _ = check_point(p, s.r, s.phi)
    return _accelerations(lam, dlam, s.phi, s.rdot, s.phidot)


def phi_chart_rhs(p: BaseProfile, phi: float, r: float, drdphi: float) -> float:
    """d²r/dφ² of the φ-parametrized geodesic equation."""
    lam, dlam, _ = check_point(p, r, phi)
    return _phi_chart_rhs(lam, dlam, phi, drdphi)


def speed(p: BaseProfile, s: GeodesicState) -> float:
    lam = p.derivatives(s.r)[0]
    return (s.rdot ** 2 + lam * s.phidot ** 2) * lam * math.sin(s.phi) ** 2


# --- start states -----------------------------------------------------------

def unit_state(p: BaseProfile, r: float, phi: float, heading: float, t: float = 0.0) -> GeodesicState:
    """Unit-speed state; heading is measured from ∂r in the orthonormal frame."""
    check_point(p, r, phi)
    E, G = SurfaceMetric(p).coefficients(r, phi)
    return GeodesicState(r, phi, math.cos(heading) / math.sqrt(E), math.sin(heading) / math.sqrt(G), t)


def heading_of(p: BaseProfile, s: GeodesicState) -> float:
    E, G = SurfaceMetric(p).coefficients(s.r, s.phi)
    return math.atan2(s.phidot * math.sqrt(G), s.rdot * math.sqrt(E))


def clairaut_start(c: float, r: float = 0.0, direction: int = -1) -> GeodesicState:
    """Product-profile state on the equator with Clairaut constant c."""
    if not -1.0 <= c <= 1.0:
        raise DomainError(f"|c| must not exceed 1, got {c}", c=c)
    return GeodesicState(r, HALF_PI, c, math.copysign(math.sqrt(1.0 - c * c), direction))


def turning_start(c: float, r: float = 0.0) -> GeodesicState:
    """Product-profile state at the lower turning point sinφ = c."""
    if not 0.0 < c <= 1.0:
        raise DomainError(f"c must lie in (0, 1], got {c}", c=c)
    return GeodesicState(r, math.asin(c), 1.0 / c, 0.0)


def slope_state(p: BaseProfile, s: PhiState, sigma: float = 1.0, t: float = 0.0) -> GeodesicState:
    """Unit-speed state of a φ-chart point moving with sign(φ̇) = sigma."""
    lam = check_point(p, s.r, s.phi)[0]
    pd = sigma / (math.sin(s.phi) * math.sqrt(lam) * math.sqrt(s.drdphi ** 2 + lam))
    return GeodesicState(s.r, s.phi, s.drdphi * pd, pd, t)


# --- event location ----------------------------------------------------------

def refined_grid(ts: Sequence[float], subdivisions: int = config.EVENT_SUBDIVISIONS) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    if len(ts) < 2:
        return ts
    frac = np.arange(subdivisions) / subdivisions
    inner = (ts[:-1, None] + np.diff(ts)[:, None] * frac[None, :]).ravel()
    return np.append(inner, ts[-1])


def sign_change_roots(func: Callable[[float], float], grid: np.ndarray, values: np.ndarray,
                      xtol: float) -> List[float]:
    """Roots bracketed by sign changes between nonzero samples; exact zeros are skipped."""
    nonzero = np.flatnonzero(values != 0.0)
    roots = []
    for i, j in zip(nonzero[:-1], nonzero[1:]):
        if values[i] * values[j] < 0.0:
            roots.append(float(bisect(func, grid[i], grid[j], xtol=xtol)))
    return roots


def _event_specs(r_levels: Iterable[float], phi_levels: Iterable[float]):
    # (kind, level, index into the state vector, offset)
    specs: List[Tuple[EventKind, Optional[float], int, float]] = [
        ("equator_crossing", HALF_PI, 1, HALF_PI),
        ("turning_point", None, 3, 0.0),
    ]
    specs += [("midline_crossing", float(lv), 0, float(lv)) for lv in r_levels]
    specs += [("phi_level", float(lv), 1, float(lv)) for lv in phi_levels]
    return specs


def _locate_t_events(p: BaseProfile, dense, ts: np.ndarray, r_levels, phi_levels,
                     event_tol: float) -> List[Event]:
    grid = refined_grid(ts)
    Y = dense(grid)
    events: List[Event] = []
    for kind, level, idx, offset in _event_specs(r_levels, phi_levels):
        values = Y[idx] - offset
        roots = sign_change_roots(lambda t, i=idx, o=offset: float(dense(t)[i]) - o,
                                  grid, values, event_tol)
        for t in roots:
            y = dense(t)
            state = GeodesicState(float(y[0]), float(y[1]), float(y[2]), float(y[3]), t)
            if kind == "turning_point":
                lam, dlam, _ = p.derivatives(state.r)
                rate = _accelerations(lam, dlam, state.phi, state.rdot, state.phidot)[1]
            elif idx == 0:
                rate = state.rdot
            else:
                rate = state.phidot
            # tangential touches are not crossings
            if abs(rate) <= config.TRANSVERSAL_MIN:
                continue
            events.append(Event(kind, t, state, level, 1 if rate > 0 else -1))
    return events


# --- t chart -----------------------------------------------------------------

def integrate_t(p: BaseProfile, s0: GeodesicState, t_end: float, tol: float = config.ODE_TOL, *,
                stop_r: Optional[float] = None,
                stop_at_boundary: bool = False,
                epsilon: Optional[float] = None,
                phi_levels: Sequence[float] = (),
                phi_window: Optional[Tuple[float, float]] = None,
                slope_return: Optional[float] = None,
                max_step: float = config.MAX_STEP,
                event_tol: float = config.EVENT_TOL) -> Trajectory:
    """Unit-speed integration in t.

    `phi_window` stops the run when φ leaves (lo, hi); `slope_return` stops it
    once |ṙ/φ̇| falls below the given value (stop_reason "slope").
    """
    check_point(p, s0.r, s0.phi)
    drift = abs(speed(p, s0) - 1.0)
    if drift > 1e-6:
        raise DomainError(f"start state is not unit speed (|speed-1|={drift:.3g})", drift=drift)
    if t_end <= s0.t:
        raise DomainError(f"t_end={t_end} must exceed the start t={s0.t}")
    if stop_r is not None and s0.r == stop_r:
        raise DomainError("start already lies on the stop level", r=s0.r)
    if epsilon is None:
        epsilon = getattr(p, "epsilon", None)

    def fun(t, y):
        lam, dlam, _ = p.derivatives(y[0])
        rdd, pdd = _accelerations(lam, dlam, y[1], y[2], y[3])
        return [y[2], y[3], rdd, pdd]

    named: List[Tuple[str, Callable]] = [
        ("boundary", lambda t, y: y[1] - config.PHI_MIN),
        ("boundary", lambda t, y: (math.pi - config.PHI_MIN) - y[1]),
    ]
    if not p.is_product:
        named.append(("boundary", lambda t, y: p.derivatives(y[0])[0] - config.LAMBDA_MIN))
    if phi_window is not None:
        lo, hi = float(phi_window[0]), float(phi_window[1])
        named.append(("phi_end", lambda t, y: y[1] - lo))
        named.append(("phi_end", lambda t, y: hi - y[1]))
    for _, g in named:
        g.terminal, g.direction = True, -1
    if stop_r is not None:
        stop = lambda t, y: y[0] - stop_r
        stop.terminal, stop.direction = True, 0
        named.append(("stop_r", stop))
    if slope_return is not None:
        back = lambda t, y: (slope_return * y[3]) ** 2 - y[2] ** 2
        back.terminal, back.direction = True, 1
        named.append(("slope", back))

    try:
        sol = solve_ivp(fun, (s0.t, t_end), s0.as_array(), method="DOP853", rtol=tol,
                        atol=tol * config.ATOL_RATIO, dense_output=True, events=[g for _, g in named],
                        max_step=max_step)
    except GeolabError as e:
        raise StepFailure(f"integration left the profile domain: {e}", **e.context) from e
    if sol.status == -1:
        raise StepFailure(f"integration failed: {sol.message}", t=float(sol.t[-1]))

    stop_reason = "t_end"
    if sol.status == 1:
        hit = {name for (name, _), te in zip(named, sol.t_events) if len(te)}
        stop_reason = next(name for name in ("stop_r", "boundary", "phi_end", "slope") if name in hit)
    if stop_reason == "boundary" and not stop_at_boundary:
        raise BoundaryApproach(f"geodesic entered the guard band at t={sol.t[-1]:.6g}",
                               t=float(sol.t[-1]), r=float(sol.y[0, -1]), phi=float(sol.y[1, -1]))

    r_levels = [0.0] + ([-epsilon] if epsilon else [])
    found = _locate_t_events(p, sol.sol, sol.t, r_levels, phi_levels, event_tol)
    t_last = float(sol.t[-1])
    last = GeodesicState(*(float(v) for v in sol.y[:, -1]), t_last)
    if stop_reason == "stop_r":
        found = [e for e in found
                 if not (e.kind == "midline_crossing" and e.level == stop_r and e.t > t_last - 1e-9)]
        found.append(Event("midline_crossing", t_last, last, float(stop_r), 1 if last.rdot > 0 else -1))
    elif stop_reason == "boundary":
        found.append(Event("boundary_contact", t_last, last))
    found.sort(key=lambda e: e.t)

    clairaut_c = s0.rdot * math.sin(s0.phi) ** 2 if p.is_product else None
    traj = Trajectory(profile=p, chart="t", t=sol.t, r=sol.y[0], phi=sol.y[1], rdot=sol.y[2],
                      phidot=sol.y[3], events=tuple(found), clairaut_c=clairaut_c,
                      dense=sol.sol, stop_reason=stop_reason)
    logger.debug(f"integrate_t {p.kind}: {len(sol.t)} samples, nfev={sol.nfev}, "
                 f"{len(found)} events, stop={stop_reason}")
    return traj


# --- φ chart -----------------------------------------------------------------

def integrate_phi(p: BaseProfile, s0: PhiState, phi_span: Tuple[float, float], tol: float = config.ODE_TOL, *,
                  stop_r: Optional[float] = None,
                  epsilon: Optional[float] = None,
                  slope_limit: float = config.SLOPE_SWITCH,
                  stop_at_blowup: bool = False,
                  s_start: float = 0.0,
                  max_step: float = config.MAX_STEP,
                  event_tol: float = config.EVENT_TOL) -> Trajectory:
    phi_a, phi_b = float(phi_span[0]), float(phi_span[1])
    if abs(s0.phi - phi_a) > 1e-15:
        raise DomainError(f"start φ={s0.phi} does not match the span start {phi_a}")
    for phi in (phi_a, phi_b):
        if not config.PHI_MIN <= phi <= math.pi - config.PHI_MIN:
            raise DegeneracyError(f"φ span endpoint {phi} is inside the guard band", phi=phi)
    check_point(p, s0.r, s0.phi)
    if abs(s0.drdphi) > slope_limit:
        raise SlopeBlowup(f"start slope {s0.drdphi} already exceeds {slope_limit}", drdphi=s0.drdphi)
    if phi_a == phi_b:
        raise DomainError("empty φ span")
    sigma = 1.0 if phi_b > phi_a else -1.0
    if epsilon is None:
        epsilon = getattr(p, "epsilon", None)

    def fun(phi, y):
        lam, dlam, _ = p.derivatives(y[0])
        ds = sigma * math.sin(phi) * math.sqrt(lam) * math.sqrt(y[1] * y[1] + lam)
        return [y[1], _phi_chart_rhs(lam, dlam, phi, y[1]), ds]

    blowup = lambda phi, y: abs(y[1]) - slope_limit
    blowup.terminal, blowup.direction = True, 1
    events = [blowup]
    if not p.is_product:
        lam_guard = lambda phi, y: p.derivatives(y[0])[0] - config.LAMBDA_MIN
        lam_guard.terminal, lam_guard.direction = True, -1
        events.append(lam_guard)
    if stop_r is not None:
        stop = lambda phi, y: y[0] - stop_r
        stop.terminal, stop.direction = True, 0
        events.append(stop)

    try:
        sol = solve_ivp(fun, (phi_a, phi_b), [s0.r, s0.drdphi, s_start], method="DOP853", rtol=tol,
                        atol=tol * config.ATOL_RATIO, dense_output=True, events=events,
                        max_step=max_step)
    except GeolabError as e:
        raise StepFailure(f"integration left the profile domain: {e}", **e.context) from e
    if sol.status == -1:
        raise StepFailure(f"integration failed: {sol.message}", phi=float(sol.t[-1]))

    phi_arr, r_arr, q_arr, s_arr = sol.t, sol.y[0], sol.y[1], sol.y[2]
    stop_reason = "phi_end"
    if sol.status == 1:
        if len(sol.t_events[0]) and not stop_at_blowup:
            raise SlopeBlowup(f"|dr/dφ| exceeded {slope_limit} at φ={phi_arr[-1]:.6g}",
                              phi=float(phi_arr[-1]), r=float(r_arr[-1]), drdphi=float(q_arr[-1]))
        if not p.is_product and len(sol.t_events[1]):
            raise DegeneracyError(f"λ vanished at r={r_arr[-1]:.6g}", r=float(r_arr[-1]))
        stop_reason = "slope" if len(sol.t_events[0]) else "stop_r"

    lam_arr = np.array([p.derivatives(float(r))[0] for r in r_arr])
    phidot = sigma / (np.sin(phi_arr) * np.sqrt(lam_arr) * np.sqrt(q_arr ** 2 + lam_arr))
    rdot = q_arr * phidot

    dense = sol.sol

    def state_at_phi(phi: float) -> GeodesicState:
        r, q, s = (float(v) for v in dense(phi))
        lam = p.derivatives(r)[0]
        pd = sigma / (math.sin(phi) * math.sqrt(lam) * math.sqrt(q * q + lam))
        return GeodesicState(r, phi, q * pd, pd, s)

    found: List[Event] = []
    lo, hi = min(phi_a, phi_arr[-1]), max(phi_a, phi_arr[-1])
    if lo < HALF_PI < hi:
        st = state_at_phi(HALF_PI)
        found.append(Event("equator_crossing", st.t, st, HALF_PI, int(sigma)))
    grid = refined_grid(phi_arr)
    rows = dense(grid)
    for level in [0.0] + ([-epsilon] if epsilon else []):
        roots = sign_change_roots(lambda ph, lv=level: float(dense(ph)[0]) - lv, grid, rows[0] - level, event_tol)
        for ph in roots:
            if stop_reason == "stop_r" and level == stop_r and abs(ph - phi_arr[-1]) < 1e-9:
                continue
            st = state_at_phi(ph)
            found.append(Event("midline_crossing", st.t, st, level, 1 if st.rdot > 0 else -1))
    if stop_reason == "stop_r":
        st = state_at_phi(float(phi_arr[-1]))
        found.append(Event("midline_crossing", st.t, st, float(stop_r), 1 if st.rdot > 0 else -1))
    found.sort(key=lambda e: e.t)

    clairaut_c = float(rdot[0] * math.sin(phi_a) ** 2) if p.is_product else None
    traj = Trajectory(profile=p, chart="phi", t=s_arr, r=r_arr, phi=phi_arr, rdot=rdot, phidot=phidot,
                      events=tuple(found), clairaut_c=clairaut_c, drdphi=q_arr, dense=dense,
                      stop_reason=stop_reason)
    logger.debug(f"integrate_phi {p.kind}: {len(phi_arr)} samples, stop={stop_reason}")
    return traj


# --- chart switching ---------------------------------------------------------

def _slopes(seg: Trajectory) -> np.ndarray:
    if seg.drdphi is not None:
        return seg.drdphi
    with np.errstate(divide="ignore", invalid="ignore"):
        return seg.rdot / seg.phidot


def join_segments(segments: Sequence[Trajectory]) -> Trajectory:
    """One sampled trajectory from consecutive chart segments (shared end points kept once)."""
    if len(segments) == 1:
        return segments[0]
    first, last = segments[0], segments[-1]

    def cat(values):
        return np.concatenate([values[0]] + [v[1:] for v in values[1:]])

    return Trajectory(
        profile=first.profile, chart="mixed",
        t=cat([s.t for s in segments]), r=cat([s.r for s in segments]), phi=cat([s.phi for s in segments]),
        rdot=cat([s.rdot for s in segments]), phidot=cat([s.phidot for s in segments]),
        events=tuple(e for s in segments for e in s.events), clairaut_c=first.clairaut_c,
        drdphi=cat([_slopes(s) for s in segments]), stop_reason=last.stop_reason,
        segments=tuple(segments),
    )


def integrate_geodesic(p: BaseProfile, s0: GeodesicState, phi_window: Tuple[float, float],
                       tol: float = config.ODE_TOL, *,
                       stop_r: Optional[float] = None,
                       epsilon: Optional[float] = None,
                       s_max: float = config.ARC_BUDGET,
                       slope_switch: float = config.SLOPE_SWITCH,
                       slope_return: float = config.SLOPE_RETURN,
                       max_switches: int = config.MAX_CHART_SWITCHES) -> Trajectory:
    """Unit-speed geodesic that runs in the φ chart while |dr/dφ| ≤ `slope_switch`
    and in the t chart until the slope drops back below `slope_return`.

    Stops at `stop_r`, when φ leaves `phi_window`, at the guard band, or once a
    t-chart piece exhausts the arc budget `s_max`. A single-chart run comes back
    as that chart's trajectory (with dense output); otherwise the pieces are
    joined into a "mixed" trajectory whose `segments` keep their dense output.
    """
    lo, hi = float(phi_window[0]), float(phi_window[1])
    if not config.PHI_MIN <= lo < s0.phi < hi <= math.pi - config.PHI_MIN:
        raise DomainError(f"start φ={s0.phi} must lie inside the window ({lo}, {hi})", phi=s0.phi)
    if not 0.0 < slope_return < slope_switch:
        raise DomainError("slope_return must lie in (0, slope_switch)",
                          slope_return=slope_return, slope_switch=slope_switch)

    s_end = s0.t + s_max
    state = s0
    segments: List[Trajectory] = []
    steep = abs(state.rdot) > slope_switch * abs(state.phidot)
    for _ in range(max_switches + 1):
        if steep:
            seg = integrate_t(p, state, s_end, tol, stop_r=stop_r, stop_at_boundary=True, epsilon=epsilon,
                              phi_window=(lo, hi), slope_return=slope_return)
        else:
            target = hi if state.phidot > 0 else lo
            seg = integrate_phi(p, PhiState(state.r, state.rdot / state.phidot, state.phi), (state.phi, target),
                                tol, stop_r=stop_r, epsilon=epsilon, slope_limit=slope_switch,
                                stop_at_blowup=True, s_start=state.t)
        segments.append(seg)
        if seg.stop_reason != "slope":
            break
        state = seg.final_state
        steep = not steep
        if state.t >= s_end:
            break
    else:
        raise StepFailure(f"more than {max_switches} chart switches", s=state.t)

    traj = join_segments(segments)
    logger.debug(f"integrate_geodesic {p.kind}: {len(segments)} segments "
                 f"({'/'.join(s.chart for s in segments)}), stop={traj.stop_reason}")
    return traj


# --- closed forms and quadratures -------------------------------------------

def _check_c(c: float) -> None:
    if not 0.0 < c < 1.0:
        raise DomainError(f"Clairaut constant must lie in (0, 1), got {c}", c=c)


def _advance_integral(c: float, beta: float) -> float:
    # sinφ = √(c² + (1−c²) sin²β) removes the turning-point singularity
    integrand = lambda b: 1.0 / math.sqrt(c * c + (1.0 - c * c) * math.sin(b) ** 2)
    value, _ = quad(integrand, 0.0, beta, limit=200, epsabs=1e-14, epsrel=1e-13)
    return c * value


def quarter_period(c: float) -> float:
    """r-advance from a turning point (sinφ = c) to the equator."""
    _check_c(c)
    return _advance_integral(c, HALF_PI)


def r_advance(c: float, phi: float) -> float:
    """r-advance from the turning point on the same side of the equator to φ."""
    _check_c(c)
    s = math.sin(phi)
    if s < c - 1e-15:
        raise DomainError(f"sinφ={s} lies beyond the turning point sinφ=c={c}", phi=phi, c=c)
    ratio = min(1.0, max(0.0, (s * s - c * c) / (1.0 - c * c)))
    return _advance_integral(c, math.asin(math.sqrt(ratio)))


def half_period_length(c: float) -> float:
    """ds-length of the piece from the equator down to the turning point and back."""
    _check_c(c)
    value, _ = quad(lambda a: math.sqrt(math.cos(a) ** 2 + c * c * math.sin(a) ** 2),
                    0.0, HALF_PI, limit=200, epsabs=1e-14, epsrel=1e-13)
    return 2.0 * value


def period_bound(c: float) -> float:
    return 2.0 * math.pi * math.sqrt(2.0 * c / (1.0 + c))


def small_c_period(c: float) -> float:
    """Leading small-c asymptote of the full period in r."""
    return 4.0 * c * math.log(4.0 / c)


def closed_form_leaf(kappa: float, r: float) -> Tuple[float, float]:
    """Leaf cosφ = tan r / tan κ of the C¹ foliation and its slope dr/dφ."""
    if not 0.0 < kappa < HALF_PI:
        raise DomainError(f"κ must lie in (0, π/2), got {kappa}", kappa=kappa)
    ratio = math.tan(r) / math.tan(kappa)
    if abs(ratio) > 1.0:
        raise DomainError(f"tan r/tan κ={ratio} is outside [-1, 1]", r=r, kappa=kappa)
    phi = math.acos(ratio)
    return phi, -math.sin(phi) * math.cos(r) ** 2 * math.tan(kappa)


def leaf_r(kappa: float, phi):
    """r on the leaf through (κ, 0) at the given φ (scalar or array)."""
    return np.arctan(np.cos(phi) * math.tan(kappa))


def leaf_slope_at_focus(kappa: float) -> float:
    """Slope dr/dφ of the leaf through (κ, 0) at the focal point (0, π/2)."""
    return -math.tan(kappa)


def measured_period(traj: Trajectory) -> Tuple[float, float]:
    """(r-advance, t-elapsed) over one full oscillation, from equator crossings."""
    crossings = traj.events_of("equator_crossing")
    on_equator = abs(float(traj.phi[0]) - HALF_PI) < 1e-12
    if on_equator:
        if len(crossings) < 2:
            raise DomainError("trajectory is shorter than one period")
        end = crossings[1]
        return end.state.r - float(traj.r[0]), end.t - traj.t_start
    if len(crossings) < 3:
        raise DomainError("trajectory is shorter than one period")
    return crossings[2].state.r - crossings[0].state.r, crossings[2].t - crossings[0].t
