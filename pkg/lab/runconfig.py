from __future__ import annotations
import json
import logging
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import config
from core.errors import ConfigError
from .config import DEFAULT_EPSILON, DEFAULT_PROFILES, DEFAULT_R_MAX, DEFAULT_R_WINDOW, DEFAULT_T_END

logger = logging.getLogger(__name__)

COMMAND_NAMES = ("trace", "period-table", "index-table", "shoot", "find-double",
                 "ricci-check", "validate-profile", "oracle-c1", "accept")

# Komut başına zorunlu parametreler (biri yeterli)
REQUIRED = {
    "shoot": ("r0", "r0_list"),
    "oracle-c1": ("kappa",),
}


@dataclass(frozen=True)
class Tolerances:
    ode_tol: float = config.ODE_TOL
    event_tol: float = config.EVENT_TOL
    root_tol: float = config.ROOT_TOL


@dataclass(frozen=True)
class Outputs:
    csv_path: Optional[str] = None
    svg_path: Optional[str] = None
    json_path: Optional[str] = None


@dataclass(frozen=True)
class RunConfig:
    command: str
    profile: Dict[str, Any] = field(default_factory=dict)
    tolerances: Tolerances = field(default_factory=Tolerances)
    outputs: Outputs = field(default_factory=Outputs)
    c: Optional[float] = None
    c_list: Optional[List[float]] = None
    kappa: Optional[float] = None
    r0: Optional[float] = None
    r0_list: Optional[List[float]] = None
    epsilon: Optional[float] = None
    start: Optional[Dict[str, float]] = None
    t_end: float = DEFAULT_T_END
    r_window: float = DEFAULT_R_WINDOW
    n_targets: int = 3
    r0_bracket: Tuple[float, float] = config.DOUBLE_BRACKET
    r_max: float = DEFAULT_R_MAX
    grid_n: int = config.GRID_N

    def validate(self) -> "RunConfig":
        if self.command not in COMMAND_NAMES:
            raise ConfigError(f"Unknown command: {self.command}", command=self.command)
        for name, value in vars(self.tolerances).items():
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"tolerance {name} must be positive, got {value!r}")
        required = REQUIRED.get(self.command)
        if required and all(getattr(self, key) is None for key in required):
            raise ConfigError(f"'{self.command}' requires one of: {', '.join(required)}")
        if self.command == "trace" and self.c is None and self.start is None:
            raise ConfigError("'trace' requires c or a start state {r, phi, heading}")
        if self.grid_n < 2:
            raise ConfigError(f"grid_n must be at least 2, got {self.grid_n}")
        if self.n_targets < 1:
            raise ConfigError(f"n_targets must be at least 1, got {self.n_targets}")
        if not isinstance(self.profile, dict) or "kind" not in self.profile:
            raise ConfigError("profile must be an object with a 'kind' field")
        return self


def _float_list(value: Any, key: str) -> List[float]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    try:
        return [float(v) for v in value]
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be a list of numbers, got {value!r}")


def _read_json(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"Config dosyası bulunamadı: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config JSON okunamadı ({path}): {e}")
    if not isinstance(data, dict):
        raise ConfigError(f"Config kökü bir JSON nesnesi olmalı: {path}")
    return data


def load_run_config(command: str, config_path: Optional[str] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """JSON config + CLI override'larından RunConfig üret"""
    data: Dict[str, Any] = _read_json(Path(config_path)) if config_path else {}
    file_command = data.pop("command", None)
    if file_command and file_command != command:
        logger.warning(f"Config komutu '{file_command}' yerine '{command}' kullanılıyor")

    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    tol_data = dict(data.pop("tolerances", {}) or {})
    if "tol" in overrides:
        tol_data["ode_tol"] = overrides.pop("tol")
    out_data = dict(data.pop("outputs", {}) or {})
    for key in ("csv_path", "svg_path", "json_path"):
        if key in overrides:
            out_data[key] = overrides.pop(key)
    file_out_dir = data.pop("out_dir", None)
    out_dir = overrides.pop("out_dir", None) or file_out_dir
    if out_dir:
        # --out-dir: verilmeyen çıktılar <dir>/<komut>.<uzantı>
        for key, ext in (("csv_path", "csv"), ("svg_path", "svg"), ("json_path", "json")):
            out_data.setdefault(key, str(Path(out_dir) / f"{command}.{ext}"))
    data.update(overrides)

    known = {f for f in RunConfig.__dataclass_fields__} - {"command", "tolerances", "outputs"}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"Bilinmeyen config alanları: {', '.join(sorted(unknown))}")

    for key in ("c_list", "r0_list"):
        if key in data:
            data[key] = _float_list(data[key], key)
    if "r0_bracket" in data:
        bracket = _float_list(data["r0_bracket"], "r0_bracket")
        if len(bracket) != 2:
            raise ConfigError("r0_bracket must have two entries")
        data["r0_bracket"] = tuple(bracket)

    try:
        cfg = RunConfig(command=command, tolerances=Tolerances(**tol_data), outputs=Outputs(**out_data), **data)
    except TypeError as e:
        raise ConfigError(f"Geçersiz config: {e}")

    profile = dict(cfg.profile or DEFAULT_PROFILES.get(command, {"kind": "product"}))
    if command == "find-double":
        if profile.get("kind") != "reflected":
            profile = {"kind": "reflected", "epsilon": cfg.epsilon or DEFAULT_EPSILON, "inner": profile}
        if cfg.epsilon is not None:
            profile["epsilon"] = cfg.epsilon
    cfg = replace(cfg, profile=profile)
    return cfg.validate()
