import argparse
import logging
from typing import List, Optional

# Absolute imports for module execution (python -m lab.run_lab)
import config
from core.artifacts import json_text
from core.errors import GeolabError
from lab.acceptance import AcceptCommand
from lab.geodesic_commands import OracleC1Command, PeriodTableCommand, TraceCommand
from lab.morse_commands import IndexTableCommand
from lab.profile_commands import RicciCheckCommand, ValidateProfileCommand
from lab.runconfig import COMMAND_NAMES, load_run_config
from lab.shooting_commands import FindDoubleCommand, ShootCommand

# Komut registry
COMMANDS = {
    "trace": TraceCommand(),
    "period-table": PeriodTableCommand(),
    "index-table": IndexTableCommand(),
    "shoot": ShootCommand(),
    "find-double": FindDoubleCommand(),
    "ricci-check": RicciCheckCommand(),
    "validate-profile": ValidateProfileCommand(),
    "oracle-c1": OracleC1Command(),
    "accept": AcceptCommand(),
}

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2


def setup_logging(level: str) -> None:
    """Logging yapılandırması"""
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=config.LOG_FORMAT,
        datefmt=config.LOG_DATE_FORMAT,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geolab",
        description="Dejenere bölüm metriklerinde jeodezik laboratuvarı",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Kullanım örnekleri:

  # Ürün metriğinde periyot tablosu
  python geolab.py period-table --c-list 0.5,0.1,0.02 --out-csv out/period.csv

  # C¹ profilde kapalı form karşılaştırması
  python geolab.py oracle-c1 --kappa 0.7853981 --out-json out/oracle.json

  # Çift temas araması (ε=0.3) ve tüm çıktılar tek klasörde
  python geolab.py find-double --epsilon 0.3 --out-dir out/

  # Tüm kabul kriterleri
  python geolab.py accept --log WARNING
        """
    )

    # Zorunlu parametre
    parser.add_argument("command", choices=COMMAND_NAMES, help="Çalıştırılacak komut")
    parser.add_argument("--config", default=None, help="RunConfig JSON dosyası")

    # Komut parametreleri (config üzerine yazar)
    parser.add_argument("--c", type=float, default=None, help="Clairaut sabiti")
    parser.add_argument("--c-list", default=None, help='c listesi (örn: "0.5,0.1,0.02")')
    parser.add_argument("--kappa", type=float, default=None, help="Yaprak parametresi κ")
    parser.add_argument("--r0", type=float, default=None, help="Sınır temas noktası r0")
    parser.add_argument("--r0-list", default=None, help='r0 listesi (örn: "0.2,0.1,0.05")')
    parser.add_argument("--epsilon", type=float, default=None, help="Orta şerit genişliği ε")
    parser.add_argument("--t-end", type=float, default=None, help="trace için bitiş parametresi")
    parser.add_argument("--tol", type=float, default=None, help="ODE toleransı (ode_tol)")

    # Çıktılar
    parser.add_argument("--out-csv", default=None, help="CSV çıktı yolu")
    parser.add_argument("--out-svg", default=None, help="SVG çıktı yolu")
    parser.add_argument("--out-json", default=None, help="JSON çıktı yolu")
    parser.add_argument("--out-dir", default=None, help="Verilmeyen çıktılar için klasör")

    parser.add_argument("--log", default=config.LOG_LEVEL,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Log seviyesi")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """CLI ana fonksiyon"""
    args = build_parser().parse_args(argv)

    # Logging setup
    setup_logging(args.log)

    overrides = {
        "c": args.c,
        "c_list": args.c_list,
        "kappa": args.kappa,
        "r0": args.r0,
        "r0_list": args.r0_list,
        "epsilon": args.epsilon,
        "t_end": args.t_end,
        "tol": args.tol,
        "csv_path": args.out_csv,
        "svg_path": args.out_svg,
        "json_path": args.out_json,
        "out_dir": args.out_dir,
    }

    try:
        cfg = load_run_config(args.command, args.config, overrides)
        result = COMMANDS[args.command].run(cfg)
    except (GeolabError, OSError) as e:
        logging.error(f"İşlem başarısız: {e}")
        print(f"❌ {e}")
        return EXIT_ERROR
    except Exception as e:
        logging.exception(f"Beklenmeyen hata: {e}")
        print(f"❌ Beklenmeyen hata: {type(e).__name__}: {e}")
        return EXIT_ERROR

    # Sonucu JSON olarak yazdır
    print(json_text(result), end="")
    return EXIT_OK if result["ok"] else EXIT_VIOLATION


if __name__ == "__main__":
    raise SystemExit(main())
