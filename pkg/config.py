#!/usr/bin/env python3
# -*- coding: utf-8 -*-

import os
from pathlib import Path


BASE_DIR   = Path(__file__).resolve().parent
OUTPUT_DIR = BASE_DIR / "out"

# İntegrasyon ayarları
ODE_TOL    = 1e-10   # göreli tolerans (solve_ivp rtol)
ATOL_RATIO = 1e-2    # atol = ODE_TOL * ATOL_RATIO
EVENT_TOL  = 1e-12   # olay zamanları için bisection toleransı
ROOT_TOL   = 1e-6    # çift temas kökleri için artık toleransı
MAX_STEP   = 0.05    # adım üst sınırı, olay aralıkları ince kalsın
EVENT_SUBDIVISIONS = 4

# Dejenerelik koruması
PHI_MIN         = 1e-6
LAMBDA_MIN      = 1e-10
TRANSVERSAL_MIN = 1e-8   # |φ̇|, |φ̈|, |ṙ| bunun altındaysa kesişim sayılmaz
SLOPE_SWITCH    = 50.0   # |dr/dφ| bu değeri aşınca t-haritasına geçilir
SLOPE_RETURN    = 25.0   # t-haritasından φ-haritasına dönüş eşiği (histerezis)
MAX_CHART_SWITCHES = 40
ARC_BUDGET      = 20.0   # harita değiştiren sürücü için ds üst sınırı

# Atış ayarları
PHI_START      = 1e-3
CERT_TOL       = 1e-8
CONTACT_FD_STEP = 0.02  # r″(0) ölçümü için φ adımı (h, 2h, 4h)
SATURATION_TOL = 1e-7    # bariyer eşitlik durumunda zayıf eşitsizlik payı
NO_CROSSING_MARGIN = 0.25

# Jacobi / Morse ayarları
NULLITY_TOL = 1e-9
RAUCH_TOL   = 1e-6

# Profil doğrulama
GRID_N        = 1000
ZERO_LAMBDA_TOL = 1e-12
FLAT_ZERO_TOL   = 1e-8

# Varsayılan uyumlu profil: cos²r − η·exp(−a/r), r_flat sonrası düzleştirme
DEFAULT_ETA        = 0.05
DEFAULT_FLAT_SCALE = 0.15
DEFAULT_R_FLAT     = 1.2
DEFAULT_FLAT_WIDTH = 0.2

# Çift temas taraması
DOUBLE_SCAN_N   = 28
DOUBLE_BRACKET  = (0.002, 0.1)

# Çıktı ayarları
FLOAT_FORMAT  = "%.17g"
CSV_ENCODING  = "utf-8"
SVG_HASHSALT  = "geolab"
SVG_R_LIMITS   = (-2.0, 2.0)
SVG_PHI_LIMITS = (0.0, 3.141592653589793)

# Logging ayarları
LOG_LEVEL      = "INFO"
LOG_FORMAT     = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_DATE_FORMAT= "%H:%M:%S"


def get_env_or_default(env_var: str, default_value):
    """Environment variable'dan değer al, yoksa default kullan."""
    env_value = os.getenv(env_var)
    if env_value is None:
        return default_value

    # Boolean conversion
    if isinstance(default_value, bool):
        return env_value.lower() in ('true', '1', 'yes', 'on')

    # Numeric conversion
    if isinstance(default_value, (int, float)):
        try:
            return type(default_value)(env_value)
        except ValueError:
            return default_value

    return env_value


ODE_TOL      = get_env_or_default("GEOLAB_ODE_TOL", ODE_TOL)
EVENT_TOL    = get_env_or_default("GEOLAB_EVENT_TOL", EVENT_TOL)
ROOT_TOL     = get_env_or_default("GEOLAB_ROOT_TOL", ROOT_TOL)
MAX_STEP     = get_env_or_default("GEOLAB_MAX_STEP", MAX_STEP)
PHI_MIN      = get_env_or_default("GEOLAB_PHI_MIN", PHI_MIN)
SLOPE_SWITCH = get_env_or_default("GEOLAB_SLOPE_SWITCH", SLOPE_SWITCH)
PHI_START    = get_env_or_default("GEOLAB_PHI_START", PHI_START)
GRID_N       = get_env_or_default("GEOLAB_GRID_N", GRID_N)
LOG_LEVEL    = get_env_or_default("GEOLAB_LOG_LEVEL", LOG_LEVEL)

CUSTOM_OUTPUT_DIR = os.getenv("GEOLAB_OUTPUT_DIR")
if CUSTOM_OUTPUT_DIR:
    OUTPUT_DIR = Path(CUSTOM_OUTPUT_DIR)
