"""Rewrite the golden outputs of the bundled configs.

Run after an intentional output change: ``python3 tests/regen_golden.py``.
"""

import shutil
from pathlib import Path

from polariton_engine.cli import main

CONFIG_DIR = Path(__file__).resolve().parents[1] / "src" / "polariton_engine" / "configs"
GOLDEN_DIR = Path(__file__).resolve().parent / "golden"


def regenerate() -> None:
    for cfg in sorted(CONFIG_DIR.glob("*.json")):
        out = GOLDEN_DIR / cfg.stem
        shutil.rmtree(out, ignore_errors=True)
        command = "fit" if cfg.stem.startswith("fit") else cfg.stem
        code = main([command, "--config", str(cfg), "--out", str(out)])
        if code != 0:
            raise SystemExit(f"{cfg.name}: exit {code}")


if __name__ == "__main__":
    regenerate()
