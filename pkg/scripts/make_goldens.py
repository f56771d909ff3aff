#!/usr/bin/env python3
"""Regenerate the golden CLI outputs pinned by the test suite.

Run after intentional schema changes, then review the diff:
    python scripts/make_goldens.py
"""

from pathlib import Path

from ttspin.cli import main

GOLDEN_DIR = Path(__file__).resolve().parent.parent / "tests" / "golden"


def build():
    GOLDEN_DIR.mkdir(exist_ok=True)
    target = GOLDEN_DIR / "map_small.csv"
    code = main(["map", "--grid-m", "350:500:6", "--grid-theta", "5", "--out", str(target)])
    if code != 0:
        raise SystemExit(code)
    print(f"wrote {target}")


if __name__ == "__main__":
    build()
