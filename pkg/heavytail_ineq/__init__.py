"""
Functional inequalities for heavy-tailed measures.

Isoperimetric profiles, Lyapunov certificates, weighted and weak Cheeger and
Poincare constants, with numerical checks of every emitted bound.

:copyright: (c) 2025 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

import json
import logging
import os
from pathlib import Path
from typing import Sequence

try:
    _manifest_path = Path(__file__).parent.parent / "manifest.json"
    with open(_manifest_path, "r", encoding="utf-8") as f:
        __version__ = json.load(f).get("version", "0.0.0")
except (FileNotFoundError, json.JSONDecodeError):
    __version__ = "0.0.0"


def main(argv: Sequence[str] | None = None) -> int:
    from heavytail_ineq import cli
    from heavytail_ineq.const import ENV_LOG_LEVEL

    level = os.getenv(ENV_LOG_LEVEL, "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format="%(asctime)s | %(levelname)-8s | %(name)-25s | %(message)s",
    )
    logging.captureWarnings(True)
    logging.getLogger("py.warnings").setLevel(logging.WARNING)

    _LOG = logging.getLogger(__name__)
    _LOG.info("Starting heavytail-ineq v%s", __version__)
    return cli.main(argv)


if __name__ == "__main__":
    raise SystemExit(main())
