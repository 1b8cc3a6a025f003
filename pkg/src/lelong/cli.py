"""Command line: ``lelong run <config|dir>`` and ``lelong list-catalog``."""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import config
from .currents import list_catalog
from .errors import ConfigError
from .runner import COLUMNS, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_BUDGET = 0, 1, 2, 3


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if hasattr(x, "item"):
        return _jsonable(x.item())
    return x


def write_reports(results, out: Path, stem: str, timings: bool = False) -> tuple:
    out.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    with open(csv_path, "w", newline="") as fh:
        fh.write(f"# generated {stamp}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for res in results:
            for row in res.rows:
                w.writerow(row.cells(timings))
    summary = {
        "scenarios": {res.name: {"passed": res.passed, "budget_exhausted": res.budget_exhausted,
                                 "checks": res.summary} for res in results},
        "passed": all(r.passed for r in results),
    }
    with open(json_path, "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return csv_path, json_path


def exit_code(results) -> int:
    if any(r.budget_exhausted for r in results):
        return EXIT_BUDGET
    return EXIT_PASS if all(r.passed for r in results) else EXIT_FAIL


def cmd_run(args) -> int:
    try:
        scenarios = config.override(config.load(args.config), seed=args.seed, tol=args.tol)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.jobs > 1 and len(scenarios) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_scenario, scenarios))
    else:
        results = [run_scenario(s) for s in scenarios]
    stem = Path(args.config).stem or "report"
    csv_path, json_path = write_reports(results, Path(args.out), stem, args.timings)
    for res in results:
        bad = [r for r in res.rows if not r.passed]
        status = "pass" if not bad else "FAIL"
        print(f"{status:4}  {res.name}")
        for r in bad:
            print(f"      {r.check}{'' if r.r is None else f' r={r.r:g}'}: {r.verdict}")
    print(f"wrote {csv_path} and {json_path}")
    return exit_code(results)


def cmd_list(args) -> int:
    print(list_catalog())
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lelong", description="Directional Lelong number scenario runner")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the scenarios of a config file or directory")
    run.add_argument("config", help="INI config file or directory of *.ini files")
    run.add_argument("--jobs", type=int, default=1, help="scenarios run in parallel (default 1)")
    run.add_argument("--seed", type=int, default=None, help="override every scenario seed")
    run.add_argument("--tol", type=float, default=None, help="override every scenario tolerance")
    run.add_argument("--out", default="reports", help="output directory (default ./reports)")
    run.add_argument("--timings", action="store_true", help="fill the ms column (breaks byte-identical output)")
    run.set_defaults(func=cmd_run)
    lst = sub.add_parser("list-catalog", help="list catalog currents and weights")
    lst.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
