"""Experiment runner: every acceptance experiment as a subcommand.

Writes one CSV per recorded series plus a single summary.json with per-check
pass/fail entries.  Outputs are bitwise deterministic for a fixed
configuration (fixed seeds, fixed summation orders); wall-clock timings are
therefore reported on stderr only.

Exit codes: 0 all checks passed, 1 at least one check failed, 2 configuration
error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .config import ConfigError, data_from_kv, load_kv, params_from_kv
from .datagen import DataTriple
from .experiments import EXPERIMENTS, ExperimentReport, run_all
from .params import CANON, ParameterError, PhysicalParams, validate

SCHEMA_VERSION = 1


def _load_config(path: str | None):
    if path is None:
        return CANON, None
    kv = load_kv(path)
    p = params_from_kv(kv)
    data = data_from_kv(kv)
    if all(spec is None for spec in data.specs()):
        data = None
    return p, data


def _format_cell(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_series_csv(out_dir: Path, name: str, columns: dict) -> Path:
    """RFC-4180-style CSV with \\n line endings and stable column order."""
    path = out_dir / f"{name}.csv"
    keys = list(columns.keys())
    length = max((len(v) for v in columns.values()), default=0)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(keys)
        for i in range(length):
            writer.writerow(
                [_format_cell(columns[k][i]) if i < len(columns[k]) else "" for k in keys]
            )
    return path


def write_summary(out_dir: Path, reports: list[ExperimentReport], series_files: list[str]) -> Path:
    summary = {
        "schema": SCHEMA_VERSION,
        "experiments": [
            {
                "experiment": rep.experiment,
                "params": rep.params_echo,
                "passed": rep.passed,
                "checks": [
                    {
                        "name": c.name,
                        "measured": c.measured,
                        "expected": c.expected,
                        "tolerance": c.tolerance,
                        "pass": c.passed,
                    }
                    for c in rep.checks
                ],
            }
            for rep in reports
        ],
        "series_files": sorted(series_files),
        "all_passed": all(rep.passed for rep in reports),
    }
    path = out_dir / "summary.json"
    path.write_text(json.dumps(summary, indent=2, sort_keys=True, allow_nan=True) + "\n")
    return path


def run(subcommand: str, config_path: str | None, out_dir: str | Path, *, n=None, allow_n1=False, panels_scale=1) -> int:
    """Execute one subcommand (or 'all'); returns the process exit code."""
    try:
        p, _data = _load_config(config_path)
        validate(p)
        if subcommand != "all" and subcommand not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {subcommand!r}")
    except (ConfigError, ParameterError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if subcommand == "all":
        reports = run_all(p, n=n, panels_scale=panels_scale, allow_n1=allow_n1)
    else:
        reports = [EXPERIMENTS[subcommand](p, n=n, panels_scale=panels_scale, allow_n1=allow_n1)]

    series_files = []
    for rep in reports:
        for name, columns in rep.series.items():
            path = write_series_csv(out, name, columns)
            series_files.append(path.name)
        print(f"{rep.experiment}: {'pass' if rep.passed else 'FAIL'} ({rep.wall_time_s:.1f}s)", file=sys.stderr)
    write_summary(out, reports, series_files)

    failed = [c.name for rep in reports for c in rep.checks if not c.passed]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="tvacoustics",
        description="Semi-analytic thermoviscous acoustic experiments",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in list(EXPERIMENTS) + ["all"]:
        cmd = sub.add_parser(name, help=f"run the {name} experiment suite")
        cmd.add_argument("--config", default=None, help="flat key-value parameter file")
        cmd.add_argument("--out", default="out", help="output directory for CSV and summary.json")
        cmd.add_argument("--n", type=int, default=None, help="restrict to one spatial dimension")
        cmd.add_argument(
            "--allow-n1",
            action="store_true",
            help="run the n = 1 variants the analysis only sketches",
        )
        cmd.add_argument(
            "--panels-scale",
            type=int,
            default=1,
            help="quadrature panel refinement multiplier (convergence studies)",
        )
    args = parser.parse_args(argv)
    return run(
        args.subcommand,
        args.config,
        args.out,
        n=args.n,
        allow_n1=args.allow_n1,
        panels_scale=args.panels_scale,
    )


if __name__ == "__main__":
    sys.exit(main())
