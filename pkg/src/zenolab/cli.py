"""Command-line experiment runner.

    zenolab --config run.ini [--out DIR] [--format csv|json] [--workers N] [--seed INT]

Writes ``<out>/<experiment>.<csv|json>`` and ``<out>/<experiment>.meta.json``.
Exit status: 0 success, 2 invalid configuration, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ExperimentConfig, load_config
from .experiments import COLUMNS, plan
from .gibbs import ENTROPY_SIGN
from .zeno import AZC_CONVENTION

log = logging.getLogger("zenolab")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

OUT_ENV = "ZENOLAB_OUT"
JW_ORDERING = "strings over sites strictly left; smallest site = most significant tensor factor"


class NumericalFailure(ArithmeticError):
    pass


def _call(job):
    run, cfg, index, arg = job
    return run(cfg, index, arg)


def compute_rows(cfg: ExperimentConfig, workers: int = 1) -> list[tuple]:
    p = plan(cfg)
    jobs = [(p.run, cfg, i, arg) for i, arg in enumerate(p.tasks)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_call, jobs))
    else:
        chunks = [_call(job) for job in jobs]
    rows = [row for chunk in chunks for row in chunk]
    for row in rows:
        if any(isinstance(v, float) and math.isnan(v) for v in row):
            raise NumericalFailure(f"NaN in result row {row}")
    return rows


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def render(columns, rows, fmt: str) -> str:
    clean = [[_cell(v) for v in row] for row in rows]
    if fmt == "json":
        return json.dumps({"columns": list(columns), "rows": clean}, indent=1) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in clean:
        writer.writerow([repr(v) for v in row])
    return buf.getvalue()


def metadata(cfg: ExperimentConfig, columns, seconds: float, workers: int) -> dict:
    return {
        "experiment": cfg.experiment.name,
        "config_hash": cfg.fingerprint,
        "seed": cfg.seed,
        "columns": list(columns),
        "format": cfg.output.format,
        "conventions": {
            "azc_constant": AZC_CONVENTION,
            "jw_ordering": JW_ORDERING,
            "entropy_sign": ENTROPY_SIGN,
        },
        "versions": {"zenolab": __version__, "numpy": np.__version__, "python": sys.version.split()[0]},
        "timing": {"seconds": seconds, "workers": workers},
    }


def run(config_path, out=None, fmt=None, workers: int = 1, seed: int | None = None) -> int:
    """Run one configured experiment; returns the process exit status."""
    try:
        cfg = load_config(config_path)
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if fmt is not None:
            if fmt not in ("csv", "json"):
                raise ConfigError(f"unknown output format {fmt!r}")
            cfg = replace(cfg, output=replace(cfg.output, format=fmt))
        if workers < 1:
            raise ConfigError("workers must be positive")
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG

    out_dir = Path(out or os.environ.get(OUT_ENV) or cfg.output.directory)
    name = cfg.experiment.name
    columns = COLUMNS[name]
    start = time.perf_counter()
    try:
        rows = compute_rows(cfg, workers)
    except ConfigError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (ArithmeticError, np.linalg.LinAlgError, FloatingPointError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    seconds = time.perf_counter() - start

    out_dir.mkdir(parents=True, exist_ok=True)
    ext = cfg.output.format
    (out_dir / f"{name}.{ext}").write_text(render(columns, rows, ext))
    meta = metadata(cfg, columns, seconds, workers)
    (out_dir / f"{name}.meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True) + "\n")
    log.info("wrote %d rows to %s", len(rows), out_dir / f"{name}.{ext}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="zenolab", description="Run a Zeno-dynamics experiment from a config file.")
    ap.add_argument("--config", required=True, help="path to the experiment config (INI)")
    ap.add_argument("--out", default=None, help=f"output directory (env {OUT_ENV}, else config)")
    ap.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default csv)")
    ap.add_argument("--workers", type=int, default=1, help="worker processes (default 1)")
    ap.add_argument("--seed", type=int, default=None, help="random seed (default: config, else 0)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    return run(args.config, args.out, args.format, args.workers, args.seed)


if __name__ == "__main__":
    sys.exit(main())
