import sys
from pathlib import Path

# Testler kök dizinden çalışır (python -m ile aynı düzen)
ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))
