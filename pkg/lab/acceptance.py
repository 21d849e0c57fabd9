import logging
import math
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

# Local imports
import config
from core.errors import GeolabError
from core.geodesics import clairaut_start, half_period_length, integrate_t, quarter_period
from core.metrics import eval_profile
from core.morse import PRODUCT, conjugate_gap_check, growth_run, index_growth_table, jacobi_fd, jacobi_zeros
from core.profiles import C1CosineProfile, ReflectedProfile, SmoothCompliantProfile
from core.services import LabService
from core.shooting import crossing_angle_curve, find_double_contacts, shoot_from_boundary
from .config import ACCEPT_DIR, DEFAULT_C_LIST, DEFAULT_EPSILON, DEFAULT_INDEX_C, DEFAULT_R0_LIST, DEFAULT_R_MAX
from .interface import BaseCommand, CommandOutput
from .runconfig import RunConfig

logger = logging.getLogger(__name__)

ACCEPT_COLUMNS = ["number", "name", "passed", "detail"]
Outcome = Tuple[bool, str]


def check_period_bound(service: LabService, tol: float) -> Outcome:
    table = service.period_table(DEFAULT_C_LIST, tol)
    agree = float((table["measured"] - table["quadrature"]).abs().max())
    below = bool(table["below_bound"].all())
    return below and agree <= 1e-6, f"max |measured-quadrature|={agree:.3g}, all below bound={below}"


def check_conservation(service: LabService, tol: float) -> Outcome:
    worst = {"speed": 0.0, "clairaut": 0.0, "confinement": math.inf}
    for c in (0.5, 0.1):
        t_end = 10 * 2.0 * half_period_length(c) + 0.5
        traj = integrate_t(PRODUCT, clairaut_start(c), t_end, tol)
        worst["speed"] = max(worst["speed"], traj.speed_drift)
        worst["clairaut"] = max(worst["clairaut"], traj.clairaut_drift)
        worst["confinement"] = min(worst["confinement"], traj.confinement_margin)
    ok = worst["speed"] <= 1e-8 and worst["clairaut"] <= 1e-8 and worst["confinement"] >= -1e-8
    return ok, ", ".join(f"{k}={v:.3g}" for k, v in worst.items())


def check_c1_oracle(service: LabService, tol: float) -> Outcome:
    deviations = [service.oracle_c1(k, tol)["sup_deviation"] for k in (math.pi / 6, math.pi / 4, math.pi / 3)]
    return max(deviations) <= 1e-5, "sup deviations " + ", ".join(f"{d:.3g}" for d in deviations)


def _window_run(c: float, crossings: int, tol: float):
    # equator crossings sit every half period after the start at r=−window
    window = (0.5 * crossings + 0.25) * 4.0 * quarter_period(c)
    return growth_run(c, window, tol)


def check_index_bound(service: LabService, tol: float) -> Outcome:
    details, ok = [], True
    for c in (0.3, 0.1):
        ok = ok and half_period_length(c) >= 2.0 - 1e-9
        for crossings in (2, 4, 8, 16):
            _, report = _window_run(c, crossings, tol)
            gaps = conjugate_gap_check(report)
            ok = ok and (report.equator_crossings == crossings and report.index >= crossings // 2
                         and gaps.rauch_ok and gaps.lengths_ok)
            details.append(f"c={c:g}/{report.equator_crossings}:{report.index}")
    return ok, "crossings:index " + " ".join(details)


def check_index_growth(service: LabService, tol: float) -> Outcome:
    table = index_growth_table(DEFAULT_INDEX_C, 5.0, tol)
    index = table.sort_values("c", ascending=False)["index"].tolist()
    increasing = all(b > a for a, b in zip(index[:-1], index[1:]))
    return increasing and index[-1] >= 20, f"index column {index}"


def check_boundary_data(service: LabService, tol: float) -> Outcome:
    p = SmoothCompliantProfile()
    slope_errors, drift = [], []
    for r0 in (0.1, 0.3):
        half_slope = 0.5 * eval_profile(p, r0)[1]
        full = shoot_from_boundary(p, r0, config.PHI_START, tol)
        halved = shoot_from_boundary(p, r0, 0.5 * config.PHI_START, tol)
        slope_errors += [abs(full.contact_second_derivative - half_slope),
                         abs(halved.contact_second_derivative - half_slope)]
        drift += [abs(full.crossing.phi0 - halved.crossing.phi0), abs(full.crossing.alpha - halved.crossing.alpha)]
    ok = max(slope_errors) <= 1e-6 and max(drift) <= 1e-7
    return ok, f"r'' error {max(slope_errors):.3g}, phi_start drift {max(drift):.3g}"


def check_certificates(service: LabService, tol: float) -> Outcome:
    p = SmoothCompliantProfile()
    failing = [r0 for r0 in (0.05, 0.1, 0.2, 0.3) if not shoot_from_boundary(p, r0, tol=tol).certificates.all_ok]
    rogue = shoot_from_boundary(SmoothCompliantProfile(eta=-0.01), 0.3, tol=tol)
    return (not failing and not rogue.certificates.barrier_ok,
            f"failing r0={failing}, non-compliant barrier worst={rogue.barrier_worst:.3g}")


def check_small_angles(service: LabService, tol: float) -> Outcome:
    curve = crossing_angle_curve(SmoothCompliantProfile(), DEFAULT_R0_LIST, tol)
    alphas = curve.sort_values("r0", ascending=False)["alpha"].abs().tolist()
    decreasing = all(b < a for a, b in zip(alphas[:-1], alphas[1:]))
    return decreasing and bool(curve["bound_ok"].all()), "|alpha| " + ", ".join(f"{a:.4g}" for a in alphas)


def check_double_contacts(service: LabService, tol: float) -> Outcome:
    p = ReflectedProfile(DEFAULT_EPSILON, SmoothCompliantProfile())
    contacts = find_double_contacts(p, DEFAULT_EPSILON, config.DOUBLE_BRACKET, 3, tol)
    residual_ok = all(c.residual <= 1e-6 for c in contacts)
    landing = max(abs(c.landing_r - (-p.epsilon - c.r0)) for c in contacts)
    index = [c.index_estimate for c in contacts]
    increasing = all(b > a for a, b in zip(index[:-1], index[1:]))
    bounded = all(c.index_estimate >= c.periods_in_strip for c in contacts)
    ok = len(contacts) >= 3 and residual_ok and landing <= 1e-5 and increasing and bounded
    return ok, f"roots={[round(c.r0, 10) for c in contacts]}, landing error={landing:.3g}, index={index}"


def check_ricci(service: LabService, tol: float) -> Outcome:
    minima = {}
    for p in (SmoothCompliantProfile(), C1CosineProfile()):
        table = service.ricci_table(p, DEFAULT_R_MAX / config.GRID_N, DEFAULT_R_MAX, config.GRID_N)
        minima[p.kind] = float(table[["rr", "t1", "t2"]].to_numpy().min())
    product = service.ricci_table(PRODUCT, -1.0, 1.0, config.GRID_N)
    deviation = float(np.max(np.abs(product[["rr", "t1", "t2"]].to_numpy() - [0.0, 1.0, 1.0])))
    ok = min(minima.values()) >= 0.0 and deviation <= 1e-12
    return ok, f"minima {minima}, product deviation={deviation:.3g}"


def check_jacobi_oracle(service: LabService, tol: float) -> Outcome:
    c = 0.3
    traj = integrate_t(PRODUCT, clairaut_start(c), 2.0 * half_period_length(c), tol)
    _, j, fd = jacobi_fd(jacobi_zeros(traj, tol))
    rel = float(np.max(np.abs(j - fd)) / np.max(np.abs(j)))
    return rel <= 1e-3, f"relative error {rel:.3g}"


CRITERIA: List[Tuple[int, str, Callable[[LabService, float], Outcome]]] = [
    (1, "period bound", check_period_bound),
    (2, "conservation", check_conservation),
    (3, "C1 closed-form oracle", check_c1_oracle),
    (4, "index lower bound", check_index_bound),
    (5, "index growth", check_index_growth),
    (6, "boundary data", check_boundary_data),
    (7, "certificates", check_certificates),
    (8, "small angles", check_small_angles),
    (9, "double contacts", check_double_contacts),
    (10, "Ricci non-negativity", check_ricci),
    (11, "Jacobi oracle", check_jacobi_oracle),
]


class AcceptCommand(BaseCommand):
    """Kabul kriterlerinin tamamı; başarısız kriterler ihlal sayılır"""

    name = "accept"

    def default_outputs(self, cfg: RunConfig) -> Dict[str, Optional[Path]]:
        return {"csv": ACCEPT_DIR / "accept.csv", "svg": None, "json": ACCEPT_DIR / "accept.json"}

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        tol = cfg.tolerances.ode_tol
        rows = []
        for number, name, check in CRITERIA:
            started = time.perf_counter()
            try:
                passed, detail = check(service, tol)
            except GeolabError as e:
                passed, detail = False, f"{type(e).__name__}: {e}"
            logger.info(f"[{number}] {name}: {'✅' if passed else '❌'} {detail} "
                        f"({time.perf_counter() - started:.1f} s)")
            rows.append({"number": number, "name": name, "passed": bool(passed), "detail": detail})

        table = pd.DataFrame(rows, columns=ACCEPT_COLUMNS)
        violations = [f"criterion {r['number']} ({r['name']}) failed: {r['detail']}" for r in rows if not r["passed"]]
        return CommandOutput(table=table, payload={"criteria": rows}, violations=violations,
                             summary={"passed": int(table["passed"].sum()), "total": len(table)})
