from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional
import logging

import pandas as pd

# Local imports
from core.artifacts import csv_text, json_text
from core.services import LabService
from .runconfig import RunConfig
from .utils import sibling_path, write_text_atomic

logger = logging.getLogger(__name__)


@dataclass
class CommandOutput:
    """Bir komutun ürettiği tablolar, JSON yükü ve (tembel) SVG çizimi"""

    table: Optional[pd.DataFrame] = None
    extra_tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    payload: Dict[str, Any] = field(default_factory=dict)
    svg: Optional[Callable[[], str]] = None
    violations: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)


class BaseCommand(ABC):
    """Tüm lab komutları için base interface"""

    name: str

    @abstractmethod
    def execute(self, cfg: RunConfig, service: LabService) -> CommandOutput:
        """Komuta özgü hesaplama"""
        pass

    def default_outputs(self, cfg: RunConfig) -> Dict[str, Optional[Path]]:
        """Çıktı yolu verilmediyse hiçbir şey yazılmaz"""
        return {"csv": None, "svg": None, "json": None}

    def run(self, cfg: RunConfig, service: Optional[LabService] = None) -> Dict[str, Any]:
        """Ana komut akışı"""
        service = service or LabService()
        logger.info(f"Komut çalıştırılıyor: {self.name} (profil: {cfg.profile.get('kind')})")
        output = self.execute(cfg, service)

        defaults = self.default_outputs(cfg)
        csv_path = Path(cfg.outputs.csv_path) if cfg.outputs.csv_path else defaults["csv"]
        svg_path = Path(cfg.outputs.svg_path) if cfg.outputs.svg_path else defaults["svg"]
        json_path = Path(cfg.outputs.json_path) if cfg.outputs.json_path else defaults["json"]
        written: Dict[str, str] = {}

        if csv_path is not None and output.table is not None:
            written["csv_path"] = str(write_text_atomic(csv_path, csv_text(output.table)))
            for suffix, table in output.extra_tables.items():
                written[f"csv{suffix}"] = str(write_text_atomic(sibling_path(csv_path, suffix), csv_text(table)))

        if svg_path is not None and output.svg is not None:
            written["svg_path"] = str(write_text_atomic(svg_path, output.svg()))

        if json_path is not None:
            payload = dict(output.payload)
            payload["violations"] = list(output.violations)
            written["json_path"] = str(write_text_atomic(json_path, json_text(payload)))

        # Değişmez ihlalleri
        for v in output.violations:
            logger.warning(f"İhlal ({self.name}): {v}")

        return {
            "command": self.name,
            "profile": cfg.profile,
            "ok": not output.violations,
            "violations": list(output.violations),
            **output.summary,
            **written,
        }
