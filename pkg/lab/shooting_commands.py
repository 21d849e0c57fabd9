import logging

import pandas as pd

# Local imports
from core.artifacts import StripPlot, trajectory_frame
from core.errors import ConfigError
from core.profiles import ReflectedProfile
from core.services import LabService
from core.shooting import (continue_to_boundary, crossing_angle_curve, find_double_contacts,
                           middle_strip_phase, shoot_from_boundary)
from .config import DEFAULT_LEAF_KAPPA
from .interface import BaseCommand, CommandOutput
from .runconfig import RunConfig

logger = logging.getLogger(__name__)

CONTACT_COLUMNS = ["r0", "epsilon", "phi0", "alpha", "residual", "periods_in_strip",
                   "index_estimate", "landing_r"]
LANDING_TOL = 1e-5


class ShootCommand(BaseCommand):
    """Sınırdan (r0, 0) atış: tek r0 için yörünge, liste için kesişme açısı eğrisi"""

    name = "shoot"

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        p = service.profile(cfg.profile)
        tol = cfg.tolerances.ode_tol

        if cfg.r0_list:
            return self._curve(cfg, p, tol)

        result = shoot_from_boundary(p, float(cfg.r0), tol=tol)
        logger.info(f"Atış r0={result.r0:g}: phi0={result.crossing.phi0:.10g}, alpha={result.crossing.alpha:.10g}")
        violations = []
        for name, ok in vars(result.certificates).items():
            if not ok:
                violations.append(f"r0={result.r0:g}: certificate {name} failed")

        def svg() -> str:
            s = result.trajectory.samples[0]
            return (StripPlot(f"shoot ({p.kind}), r0={result.r0:g}")
                    .leaves(DEFAULT_LEAF_KAPPA + [result.r0])
                    .trajectory(result.trajectory, label="boundary geodesic")
                    .points([result.r0, s.r], [0.0, s.phi], marker="s", label="contact")
                    .points([0.0], [result.crossing.phi0], marker="o", color="C2", label="midline")
                    .svg())

        payload = {"profile": p.to_dict(), **result.to_dict()}
        return CommandOutput(table=trajectory_frame(result.trajectory), payload=payload, svg=svg,
                             violations=violations,
                             summary={"phi0": result.crossing.phi0, "alpha": result.crossing.alpha,
                                      "certificates_ok": result.certificates.all_ok})

    def _curve(self, cfg: RunConfig, p, tol: float) -> CommandOutput:
        r0_list = [float(r) for r in cfg.r0_list]
        curve = crossing_angle_curve(p, r0_list, tol)

        violations = []
        ordered = curve.sort_values("r0", ascending=False)
        steps = ordered["alpha"].abs().diff().dropna()
        if not steps.lt(0).all():
            violations.append(f"|alpha| is not strictly decreasing with r0: {ordered['alpha'].tolist()}")
        for row in curve.to_dict(orient="records"):
            if not row["bound_ok"]:
                violations.append(f"r0={row['r0']:g}: alpha={row['alpha']:.6g} outside ({row['bound']:.6g}, 0)")

        def svg() -> str:
            plot = StripPlot(f"crossing angles ({p.kind})").leaves(r0_list)
            for i, r0 in enumerate(r0_list):
                res = shoot_from_boundary(p, r0, tol=tol)
                plot.trajectory(res.trajectory, color=f"C{i % 10}", label=f"r0={r0:g}")
            return plot.points(r0_list, [0.0] * len(r0_list), marker="s", label="contacts").svg()

        payload = {"profile": p.to_dict(), "rows": curve.to_dict(orient="records")}
        return CommandOutput(table=curve, payload=payload, svg=svg, violations=violations,
                             summary={"rows": len(curve)})


class FindDoubleCommand(BaseCommand):
    """Yansıtılmış profilde çift temaslı jeodezikler"""

    name = "find-double"

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        p = service.profile(cfg.profile)
        if not isinstance(p, ReflectedProfile):
            raise ConfigError("find-double needs a reflected profile", kind=p.kind)
        tol = cfg.tolerances.ode_tol
        contacts = find_double_contacts(p, None, cfg.r0_bracket, cfg.n_targets, tol)
        table = pd.DataFrame([c.to_dict() for c in contacts], columns=CONTACT_COLUMNS)
        logger.info(f"{len(contacts)} çift temas bulundu (epsilon={p.epsilon:g})")

        violations = []
        for c in contacts:
            if c.residual > cfg.tolerances.root_tol:
                violations.append(f"r0={c.r0:.12g}: residual {c.residual:.3g} exceeds {cfg.tolerances.root_tol:g}")
            target = -p.epsilon - c.r0
            if c.landing_r is None or abs(c.landing_r - target) > LANDING_TOL:
                violations.append(f"r0={c.r0:.12g}: continuation lands at {c.landing_r} instead of {target:.12g}")
            if c.index_estimate < c.periods_in_strip:
                violations.append(f"r0={c.r0:.12g}: index {c.index_estimate} is below the {c.periods_in_strip} strip periods")
        indices = [c.index_estimate for c in contacts]
        if any(b <= a for a, b in zip(indices[:-1], indices[1:])):
            violations.append(f"index estimates are not strictly increasing: {indices}")

        def svg() -> str:
            plot = StripPlot(f"double contacts, epsilon={p.epsilon:g}")
            plot.ax.axvline(-p.epsilon, color="0.8", linewidth=0.6)
            for i, c in enumerate(contacts):
                color = f"C{i % 10}"
                shot = shoot_from_boundary(p, c.r0, tol=tol)
                strip = middle_strip_phase(c.phi0, c.alpha, p.epsilon, tol, profile=p)
                landing, tail = continue_to_boundary(p, strip, p.epsilon, tol)
                plot.trajectory(shot.trajectory, color=color, label=f"n={c.periods_in_strip}")
                plot.trajectory(strip.trajectory, color=color)
                plot.trajectory(tail, color=color)
                plot.points([c.r0, landing], [0.0, 0.0], marker="s", color=color)
            return plot.svg()

        payload = {"profile": p.to_dict(), "r0_bracket": list(cfg.r0_bracket),
                   "contacts": [c.to_dict() for c in contacts]}
        return CommandOutput(table=table, payload=payload, svg=svg, violations=violations,
                             summary={"contacts": len(contacts), "r0": [c.r0 for c in contacts]})
