import logging
from dataclasses import asdict

import pandas as pd

# Local imports
from core.services import LabService
from .interface import BaseCommand, CommandOutput
from .runconfig import RunConfig

logger = logging.getLogger(__name__)

RICCI_TOL = 1e-12
CHECK_COLUMNS = ["name", "holds", "saturated", "worst_margin", "worst_at", "violations"]


class RicciCheckCommand(BaseCommand):
    """Yapılmış 3-metriğin Ricci köşegeni: negatif girdi olmamalı"""

    name = "ricci-check"

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        p = service.profile(cfg.profile)
        if p.is_product:
            r_min, r_max = -cfg.r_max, cfg.r_max
        else:
            # r=0'daki kıvrım hariç
            r_min, r_max = cfg.r_max / cfg.grid_n, cfg.r_max
        table = service.ricci_table(p, r_min, r_max, cfg.grid_n)
        entries = table[["rr", "t1", "t2"]]

        violations = []
        negative = table[(entries < -RICCI_TOL).any(axis=1)]
        if len(negative):
            first = negative.iloc[0]
            violations.append(f"{len(negative)} grid points with a negative entry, first at r={first['r']:.6g}")
        if p.is_product:
            deviation = float((entries - [0.0, 1.0, 1.0]).abs().to_numpy().max())
            if deviation > RICCI_TOL:
                violations.append(f"product region deviates from (0, 1, 1) by {deviation:.3g}")

        payload = {
            "profile": p.to_dict(),
            "r_min": float(r_min),
            "r_max": float(r_max),
            "grid_n": cfg.grid_n,
            "min_entries": {k: float(v) for k, v in entries.min().items()},
        }
        return CommandOutput(table=table, payload=payload, violations=violations,
                             summary={"rows": len(table), "min_entry": float(entries.to_numpy().min())})


class ValidateProfileCommand(BaseCommand):
    """Profil kısıtlarının (bariyer, ikinci türev, düz sıfır) ızgara üzerinde kontrolü"""

    name = "validate-profile"

    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        p = service.profile(cfg.profile)
        report = service.validate(p, cfg.r_max, cfg.grid_n)
        table = pd.DataFrame([asdict(c) for c in report.checks], columns=CHECK_COLUMNS)
        for c in report.checks:
            logger.info(f"{c.name}: {'tamam' if c.holds else 'başarısız'} "
                        f"(en kötü {c.worst_margin:.3g} @ r={c.worst_at:.4g})")

        violations = [f"profile is undefined for r >= {c.worst_at:.6g} ({c.violations} grid points)"
                      for c in report.checks if c.name == "domain"]
        payload = {"profile": p.to_dict(), **report.to_dict()}
        return CommandOutput(table=table, payload=payload, violations=violations,
                             summary={"compliant": report.compliant,
                                      "weakly_compliant": report.weakly_compliant})
