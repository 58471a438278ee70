"""
Lanzador de polyprec desde la raíz del repositorio.

Uso:
    python scripts/polyprec.py run scenarios/laplace2d_golden.toml
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
