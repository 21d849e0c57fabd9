"""Jacobi fields, conjugate points and Morse index along surface geodesics."""
import logging
import math
from typing import Iterable, List, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import solve_ivp

import config
from .errors import CurvatureEvaluationError, DomainError, GeolabError
from .geodesics import (clairaut_start, half_period_length, heading_of, integrate_t,
                        quarter_period, refined_grid, sign_change_roots, unit_state)
from .metrics import SurfaceMetric, gaussian_curvature
from .models import ConjugateReport, GapCheck, IndexBounds, Trajectory
from .profiles import ProductProfile

logger = logging.getLogger(__name__)

INDEX_TABLE_COLUMNS = ["c", "period_r", "crossings", "index"]
PRODUCT = ProductProfile()


def jacobi_zeros(traj: Trajectory, tol: float = config.ODE_TOL, *, sub_arc_only: bool = False,
                 max_step: float = config.MAX_STEP) -> ConjugateReport:
    """Solve J″ + K(γ(t)) J = 0, J(0)=0, J′(0)=1 and count its zeros in (t0, t_end)."""
    if traj.chart != "t" or traj.dense is None:
        raise DomainError("jacobi_zeros needs a unit-speed t-chart trajectory")
    metric = SurfaceMetric(traj.profile)
    dense = traj.dense

    def curvature(t: float) -> float:
        y = dense(t)
        try:
            return gaussian_curvature(metric, float(y[0]), float(y[1]))
        except GeolabError as e:
            raise CurvatureEvaluationError(f"curvature not evaluable at t={t:.6g}: {e}", t=t) from e

    t0, T = traj.t_start, traj.t_end
    sol = solve_ivp(lambda t, y: [y[1], -curvature(t) * y[0]], (t0, T), [0.0, 1.0],
                    method="DOP853", rtol=tol, atol=tol * config.ATOL_RATIO,
                    dense_output=True, max_step=max_step)
    if sol.status == -1:
        raise CurvatureEvaluationError(f"Jacobi integration failed: {sol.message}")

    grid = refined_grid(sol.t)
    zeros = sign_change_roots(lambda t: float(sol.sol(t)[0]), grid, sol.sol(grid)[0], config.EVENT_TOL)
    inside = tuple(z for z in zeros if t0 < z < T - config.NULLITY_TOL)
    j_end, dj_end = (float(v) for v in sol.sol(T))
    nullity = len(inside) < len(zeros) or abs(j_end) <= config.NULLITY_TOL * abs(dj_end)
    if nullity:
        logger.warning(f"conjugate point at the endpoint t={T:.6g}; perturb t_end for a non-degenerate index")

    min_k = min(curvature(float(t)) for t in traj.t)
    crossings = len(traj.events_of("equator_crossing"))
    report = ConjugateReport(geodesic=traj, jacobi_zeros=inside, index=len(inside),
                             equator_crossings=crossings, nullity_flag=nullity,
                             min_curvature=float(min_k), jacobi=sol.sol, sub_arc_only=sub_arc_only)
    logger.debug(f"jacobi_zeros: index={report.index}, crossings={crossings}, min K={min_k:.4g}")
    return report


def _require_product(traj: Trajectory) -> None:
    if not traj.profile.is_product:
        raise DomainError("index bounds are stated for product-profile geodesics", kind=traj.profile.kind)


def index_vs_crossings(traj: Trajectory, tol: float = config.ODE_TOL) -> IndexBounds:
    _require_product(traj)
    c = abs(traj.clairaut_c or 0.0)
    if not 0.0 < c <= 1.0 + 1e-12:
        raise DomainError(f"Clairaut constant must lie in (0, 1], got {c}", c=c)
    report = jacobi_zeros(traj, tol)
    crossings = report.equator_crossings
    bounds = IndexBounds(index=report.index, crossings=crossings,
                         half_bound_ok=report.index >= crossings // 2,
                         full_bound_ok=report.index >= crossings)
    if not bounds.full_bound_ok:
        logger.warning(f"index {report.index} is below the crossing count {crossings} (c={c:.4g})")
    return bounds


def _period_lengths(traj: Trajectory) -> List[float]:
    crossings = [(e.t, e.direction) for e in traj.events_of("equator_crossing")]
    if abs(float(traj.phi[0]) - 0.5 * math.pi) < 1e-12 and abs(float(traj.phidot[0])) > config.TRANSVERSAL_MIN:
        crossings.insert(0, (traj.t_start, 1 if traj.phidot[0] > 0 else -1))
    lengths = []
    for direction in (1, -1):
        times = [t for t, d in crossings if d == direction]
        lengths += [b - a for a, b in zip(times[:-1], times[1:])]
    return sorted(lengths)


def conjugate_gap_check(report: ConjugateReport, tol: float = config.RAUCH_TOL) -> GapCheck:
    traj = report.geodesic
    _require_product(traj)
    points = [traj.t_start, *report.jacobi_zeros]
    gaps = [b - a for a, b in zip(points[:-1], points[1:])]
    # the trailing stretch bounds the next gap from below
    gaps.append(traj.t_end - points[-1])
    max_gap = max(gaps)
    lengths = _period_lengths(traj)
    return GapCheck(max_gap=max_gap, rauch_ok=max_gap <= math.pi + tol,
                    period_lengths=tuple(lengths), lengths_ok=all(l > 4.0 for l in lengths))


def growth_run(c: float, r_window: float, tol: float = config.ODE_TOL) -> Tuple[dict, ConjugateReport]:
    """Equator start at r=−r_window heading down, integrated until r=0."""
    period_r = 4.0 * quarter_period(c)
    t_period = 2.0 * half_period_length(c)
    t_end = (r_window / period_r) * t_period * 1.1 + 2.0 * math.pi
    traj = integrate_t(PRODUCT, clairaut_start(c, r=-r_window, direction=-1), t_end, tol, stop_r=0.0)
    if traj.stop_reason != "stop_r":
        raise DomainError(f"geodesic with c={c} did not cross the window", c=c)
    report = jacobi_zeros(traj, tol)
    row = {"c": float(c), "period_r": period_r, "crossings": report.equator_crossings, "index": report.index}
    logger.info(f"index row c={c:g}: period_r={period_r:.6g}, crossings={row['crossings']}, index={row['index']}")
    return row, report


def index_growth_runs(c_list: Iterable[float], r_window: float = 5.0,
                      tol: float = config.ODE_TOL) -> Tuple[pd.DataFrame, List[ConjugateReport]]:
    runs = [growth_run(float(c), r_window, tol) for c in c_list]
    table = pd.DataFrame([row for row, _ in runs], columns=INDEX_TABLE_COLUMNS)
    ordered = table.sort_values("c", ascending=False)
    if not (ordered["period_r"].is_monotonic_decreasing and ordered["index"].is_monotonic_increasing):
        logger.warning("index growth table is not monotone in c")
    return table, [report for _, report in runs]


def index_growth_table(c_list: Iterable[float], r_window: float = 5.0,
                       tol: float = config.ODE_TOL) -> pd.DataFrame:
    return index_growth_runs(c_list, r_window, tol)[0]


def jacobi_fd(report: ConjugateReport, delta: float = 1e-6, tol: float = 1e-12) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Normal displacement between γ and the geodesic rotated by δ at the start, divided by δ."""
    traj = report.geodesic
    p = traj.profile
    s0 = traj.samples[0]
    heading = heading_of(p, s0)
    base = integrate_t(p, unit_state(p, s0.r, s0.phi, heading, s0.t), traj.t_end, tol)
    moved = integrate_t(p, unit_state(p, s0.r, s0.phi, heading + delta, s0.t), traj.t_end, tol)
    metric = SurfaceMetric(p)

    ts = traj.t[1:]
    fd = np.empty_like(ts)
    for i, t in enumerate(ts):
        r, phi, rdot, phidot = base.dense(t)
        r2, phi2, _, _ = moved.dense(t)
        E, G = metric.coefficients(r, phi)
        n_r = -math.sqrt(G / E) * phidot
        n_phi = math.sqrt(E / G) * rdot
        fd[i] = (E * (r2 - r) * n_r + G * (phi2 - phi) * n_phi) / delta
    j = report.jacobi(ts)[0]
    return ts, j, fd
