import logging
import math
from typing import Any, Iterable, Mapping, Optional

import numpy as np
import pandas as pd

import config
from .geodesics import (clairaut_start, half_period_length, integrate_t, leaf_r, leaf_slope_at_focus, measured_period,
                        period_bound, quarter_period, small_c_period)
from .interfaces import BaseProfile
from .metrics import ricci_diagonal, validate_profile
from .models import ValidationReport
from .profiles import C1CosineProfile, ProductProfile, default_registry
from .registry import ProfileRegistry
from .shooting import shoot_from_boundary

logger = logging.getLogger(__name__)

PERIOD_COLUMNS = ["c", "bound", "quadrature", "measured", "period_t", "asymptote", "below_bound"]
RICCI_COLUMNS = ["r", "rr", "t1", "t2"]
ORACLE_COLUMNS = ["phi", "r", "leaf_r", "deviation"]


class LabService:
    """Compositions of the core operations used by the command runner."""

    def __init__(self, registry: Optional[ProfileRegistry] = None):
        self._reg = registry or default_registry()

    def profile(self, spec: Mapping[str, Any]) -> BaseProfile:
        return self._reg.from_dict(spec)

    def period_table(self, c_list: Iterable[float], tol: float = config.ODE_TOL) -> pd.DataFrame:
        rows = []
        product = ProductProfile()
        for c in c_list:
            c = float(c)
            quadrature = 4.0 * quarter_period(c)
            t_end = 2.0 * half_period_length(c) * 1.25 + 1.0
            traj = integrate_t(product, clairaut_start(c), t_end, tol)
            measured, period_t = measured_period(traj)
            bound = period_bound(c)
            rows.append({"c": c, "bound": bound, "quadrature": quadrature, "measured": measured,
                         "period_t": period_t, "asymptote": small_c_period(c),
                         "below_bound": bool(measured < bound and quadrature < bound)})
            logger.info(f"period c={c:g}: measured={measured:.12g}, quadrature={quadrature:.12g}, bound={bound:.6g}")
        return pd.DataFrame(rows, columns=PERIOD_COLUMNS)

    def ricci_table(self, p: BaseProfile, r_min: float, r_max: float, grid_n: int = config.GRID_N) -> pd.DataFrame:
        grid = np.linspace(r_min, r_max, grid_n)
        rows = [(float(r), *ricci_diagonal(p, float(r))) for r in grid]
        return pd.DataFrame(rows, columns=RICCI_COLUMNS)

    def validate(self, p: BaseProfile, r_max: float, grid_n: int = config.GRID_N) -> ValidationReport:
        return validate_profile(p, r_max, grid_n)

    def oracle_c1(self, kappa: float, tol: float = config.ODE_TOL, phi_low: float = 0.2) -> dict:
        """Sup-norm deviation of the shot C¹ boundary geodesic from the leaf through (κ, 0)."""
        result = shoot_from_boundary(C1CosineProfile(), kappa, tol=tol)
        traj = result.trajectory
        phis = np.linspace(phi_low, min(0.5 * math.pi, float(traj.phi[-1])), 401)
        shot = traj.dense(phis)[0]
        leaf = leaf_r(kappa, phis)
        table = pd.DataFrame({"phi": phis, "r": shot, "leaf_r": leaf, "deviation": np.abs(shot - leaf)},
                             columns=ORACLE_COLUMNS)
        deviation = float(table["deviation"].max())
        return {"kappa": kappa, "sup_deviation": deviation, "samples": len(phis), "table": table,
                "phi0": result.crossing.phi0, "alpha": result.crossing.alpha,
                "leaf_slope_at_focus": leaf_slope_at_focus(kappa), "result": result}
