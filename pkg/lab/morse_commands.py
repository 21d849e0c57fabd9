import logging

# Local imports
from core.artifacts import StripPlot
from core.errors import ConfigError
from core.morse import conjugate_gap_check, index_growth_runs
from core.services import LabService
from .config import DEFAULT_INDEX_C
from .interface import BaseCommand, CommandOutput
from .runconfig import RunConfig

logger = logging.getLogger(__name__)


class IndexTableCommand(BaseCommand):
    """Sabit r-penceresinde c küçüldükçe Morse indeksinin büyümesi"""

    name = "index-table"

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        p = service.profile(cfg.profile)
        if not p.is_product:
            raise ConfigError("index-table runs on the product profile", kind=p.kind)
        c_list = cfg.c_list or ([cfg.c] if cfg.c is not None else DEFAULT_INDEX_C)
        if any(not 0.0 < c < 1.0 for c in c_list):
            raise ConfigError(f"every c must lie in (0, 1), got {c_list}")

        table, reports = index_growth_runs(c_list, cfg.r_window, cfg.tolerances.ode_tol)
        logger.info(f"İndeks tablosu: {len(table)} satır, en büyük indeks {int(table['index'].max())}")
        gaps = [conjugate_gap_check(report) for report in reports]
        table = table.assign(
            half_bound_ok=table["index"] >= table["crossings"] // 2,
            max_gap=[g.max_gap for g in gaps],
            rauch_ok=[g.rauch_ok for g in gaps],
        )

        violations = []
        ordered = table.sort_values("c", ascending=False)
        if not ordered["index"].diff().dropna().gt(0).all():
            violations.append(f"index is not strictly increasing as c decreases: {ordered['index'].tolist()}")
        for row in table.to_dict(orient="records"):
            if not row["half_bound_ok"]:
                violations.append(f"c={row['c']:g}: index {row['index']} below half the crossings {row['crossings']}")
            if not row["rauch_ok"]:
                violations.append(f"c={row['c']:g}: conjugate gap {row['max_gap']:.6g} exceeds pi")

        payload = {
            "r_window": cfg.r_window,
            "rows": table.to_dict(orient="records"),
            "reports": [r.to_dict() for r in reports],
        }

        def svg() -> str:
            plot = StripPlot(f"index growth, r in [-{cfg.r_window:g}, 0]")
            for i, report in enumerate(reports):
                plot.trajectory(report.geodesic, color=f"C{i % 10}", label=f"c={c_list[i]:g}")
                plot.conjugate_points(report)
            return plot.svg()

        return CommandOutput(table=table, payload=payload, svg=svg, violations=violations,
                             summary={"rows": len(table), "max_index": int(table["index"].max())})
