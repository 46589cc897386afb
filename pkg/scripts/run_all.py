#!/usr/bin/env python3
"""Run every example config in configs/ and report the exit status of each."""

import argparse
import sys
from pathlib import Path

from zenolab.cli import run

ROOT = Path(__file__).resolve().parents[1]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(ROOT / "results"))
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    failures = 0
    for cfg in sorted((ROOT / "configs").glob("*.ini")):
        # one subdirectory per config since two configs may share an experiment name
        code = run(cfg, Path(args.out) / cfg.stem, workers=args.workers)
        print(f"{cfg.name:28s} exit {code}")
        failures += code != 0
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
