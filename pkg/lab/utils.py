from pathlib import Path
import os
import shutil
import logging

from .config import TMP_SUFFIX

logger = logging.getLogger(__name__)


def atomic_replace(src: Path, dst: Path) -> None:
    """Atomik dosya değiştirme (mümkünse os.replace, değilse fallback)"""
    src = Path(src)
    dst = Path(dst)

    # Hedef klasörü oluştur
    dst.parent.mkdir(parents=True, exist_ok=True)

    try:
        # Aynı file system'de atomik
        os.replace(src, dst)
        logger.debug(f"Atomik replace: {src} → {dst}")
    except OSError:
        # Farklı file system fallback
        logger.warning("Farklı disk, fallback kullanılıyor")
        if dst.exists():
            dst.unlink()
        shutil.move(str(src), str(dst))
        logger.debug(f"Fallback move: {src} → {dst}")


def write_text_atomic(path: Path, text: str) -> Path:
    """Metni geçici dosyaya yaz, sonra yerine taşı"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + TMP_SUFFIX)
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    atomic_replace(tmp, path)
    logger.info(f"Yazıldı: {path}")
    return path


def sibling_path(path: Path, suffix: str) -> Path:
    """out/trace.csv + '_events' → out/trace_events.csv"""
    path = Path(path)
    return path.with_name(f"{path.stem}{suffix}{path.suffix}")

