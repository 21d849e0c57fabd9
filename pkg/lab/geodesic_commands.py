import logging
import math

# Local imports
import config
from core.artifacts import StripPlot, events_frame, trajectory_frame
from core.errors import ConfigError
from core.geodesics import clairaut_start, integrate_t, unit_state
from core.services import LabService
from .config import DEFAULT_C_LIST
from .interface import BaseCommand, CommandOutput
from .runconfig import RunConfig

logger = logging.getLogger(__name__)

# Korunum eşiği (gevşek tol verilirse ölçeklenir)
CONSERVATION_TOL = config.CERT_TOL
PERIOD_AGREEMENT = 1e-6
ORACLE_TOL = 1e-5


def conservation_limit(tol: float) -> float:
    return max(CONSERVATION_TOL, 100.0 * tol)


class TraceCommand(BaseCommand):
    """Tek jeodezik izi: yörünge CSV'si + olay CSV'si"""

    name = "trace"

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        p = service.profile(cfg.profile)
        if cfg.start is not None:
            try:
                s0 = unit_state(p, float(cfg.start["r"]), float(cfg.start["phi"]),
                                float(cfg.start.get("heading", 0.0)))
            except KeyError as e:
                raise ConfigError(f"start state is missing {e}")
        else:
            if not p.is_product:
                raise ConfigError("'c' starts are defined for the product profile; give a start state instead")
            s0 = clairaut_start(float(cfg.c))

        tol = cfg.tolerances.ode_tol
        traj = integrate_t(p, s0, cfg.t_end, tol, stop_at_boundary=True,
                           event_tol=cfg.tolerances.event_tol)
        logger.info(f"İz tamamlandı: {len(traj)} örnek, {len(traj.events)} olay, durma={traj.stop_reason}")
        limit = conservation_limit(tol)

        violations = []
        if traj.speed_drift > limit:
            violations.append(f"speed drift {traj.speed_drift:.3g} exceeds {limit:g}")
        if traj.clairaut_drift is not None and traj.clairaut_drift > limit:
            violations.append(f"Clairaut drift {traj.clairaut_drift:.3g} exceeds {limit:g}")
        if traj.confinement_margin is not None and traj.confinement_margin < -limit:
            violations.append(f"confinement sin(phi) >= |c| broken by {-traj.confinement_margin:.3g}")

        payload = {
            "profile": p.to_dict(),
            "start": {"r": s0.r, "phi": s0.phi, "rdot": s0.rdot, "phidot": s0.phidot},
            "t_end": traj.t_end,
            "stop_reason": traj.stop_reason,
            "arc_length": traj.arc_length,
            "speed_drift": traj.speed_drift,
            "clairaut_c": traj.clairaut_c,
            "clairaut_drift": traj.clairaut_drift,
            "confinement_margin": traj.confinement_margin,
            "events": len(traj.events),
        }

        def svg() -> str:
            marks = traj.events_of("equator_crossing") + traj.events_of("turning_point")
            return (StripPlot(f"trace ({p.kind})").trajectory(traj)
                    .points([e.state.r for e in marks], [e.state.phi for e in marks], label="events")
                    .svg())

        return CommandOutput(table=trajectory_frame(traj), extra_tables={"_events": events_frame(traj)},
                             payload=payload, svg=svg, violations=violations,
                             summary={"samples": len(traj), "events": len(traj.events),
                                      "stop_reason": traj.stop_reason})


class PeriodTableCommand(BaseCommand):
    """Ürün metriğinde periyot tablosu: ölçülen, kuadratür ve üst sınır"""

    name = "period-table"

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        p = service.profile(cfg.profile)
        if not p.is_product:
            raise ConfigError("period-table runs on the product profile", kind=p.kind)
        c_list = cfg.c_list or ([cfg.c] if cfg.c is not None else DEFAULT_C_LIST)
        table = service.period_table(c_list, cfg.tolerances.ode_tol)

        violations = []
        for row in table.itertuples(index=False):
            if not row.below_bound:
                violations.append(f"c={row.c:g}: period {row.measured:.12g} not below bound {row.bound:.12g}")
            if abs(row.measured - row.quadrature) > PERIOD_AGREEMENT:
                violations.append(f"c={row.c:g}: measured and quadrature differ by "
                                  f"{abs(row.measured - row.quadrature):.3g}")

        payload = {"c_list": [float(c) for c in c_list], "rows": table.to_dict(orient="records")}
        return CommandOutput(table=table, payload=payload, violations=violations,
                             summary={"rows": len(table)})


class OracleC1Command(BaseCommand):
    """C¹ profilde atış sonucu ile kapalı form yaprağın karşılaştırması"""

    name = "oracle-c1"

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        kappa = float(cfg.kappa)
        if not 0.0 < kappa < 0.5 * math.pi:
            raise ConfigError(f"kappa must lie in (0, pi/2), got {kappa}")
        report = service.oracle_c1(kappa, cfg.tolerances.ode_tol)
        result = report.pop("result")
        table = report.pop("table")

        violations = []
        if report["sup_deviation"] > ORACLE_TOL:
            violations.append(f"sup deviation {report['sup_deviation']:.3g} exceeds {ORACLE_TOL:g}")

        def svg() -> str:
            return (StripPlot(f"C1 oracle, kappa={kappa:.6g}").leaves([kappa])
                    .trajectory(result.trajectory, label="shot")
                    .svg())

        return CommandOutput(table=table, payload=report, svg=svg, violations=violations,
                             summary={"sup_deviation": report["sup_deviation"]})
