import config

# Çıktı klasörleri
OUTPUT_DIR = config.OUTPUT_DIR
ACCEPT_DIR = OUTPUT_DIR / "accept"

# Geçici dosya son eki (atomik yazma için)
TMP_SUFFIX = ".tmp"

# Komut başına varsayılan profil
DEFAULT_PROFILES = {
    "trace": {"kind": "product"},
    "period-table": {"kind": "product"},
    "index-table": {"kind": "product"},
    "shoot": {"kind": "smooth"},
    "find-double": {"kind": "reflected", "epsilon": 0.3, "inner": {"kind": "smooth"}},
    "ricci-check": {"kind": "smooth"},
    "validate-profile": {"kind": "smooth"},
    "oracle-c1": {"kind": "c1cosine"},
    "accept": {"kind": "smooth"},
}

# Varsayılan sweep listeleri
DEFAULT_C_LIST     = [0.5, 0.2, 0.1, 0.05, 0.01]
DEFAULT_INDEX_C    = [0.5, 0.1, 0.02, 0.005]
DEFAULT_R0_LIST    = [0.2, 0.1, 0.05, 0.025, 0.0125]
DEFAULT_LEAF_KAPPA = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4]
DEFAULT_EPSILON    = 0.3
DEFAULT_T_END      = 20.0
DEFAULT_R_WINDOW   = 5.0
DEFAULT_R_MAX      = 1.0
