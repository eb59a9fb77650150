"""Command-line front end: ``infogeom verify <suite>`` and ``infogeom plot-data``.

Exit codes: 0 all asserted invariants held, 1 at least one violation,
2 configuration or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema

from .suites import SUITES, SuiteConfig, emit_plot_data, run_suite


def _load_schema() -> dict:
    with resources.files("infogeom.schemas").joinpath("suite_config.schema.json").open() as fh:
        return json.load(fh)


def _build_config(args: argparse.Namespace) -> SuiteConfig:
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise SystemExit(f"error: cannot read config {args.config}: {exc}")
        try:
            jsonschema.validate(data, _load_schema())
        except jsonschema.ValidationError as exc:
            path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            print(f"error: config does not match the schema at {path}: {exc.message}", file=sys.stderr)
            raise SystemExit(2)
        if "suite" in data and data["suite"] != args.suite:
            print(
                f"error: config names suite {data['suite']!r} but {args.suite!r} was requested",
                file=sys.stderr,
            )
            raise SystemExit(2)
    cfg = SuiteConfig(
        suite=args.suite,
        trials=args.trials if args.trials is not None else int(data.get("trials", 0)),
        seed=args.seed if args.seed is not None else int(data.get("seed", 42)),
        jobs=args.jobs if args.jobs is not None else int(data.get("jobs", 1)),
        out_dir=Path(args.out) if args.out else Path(data.get("out_dir", "reports")),
        tolerances=dict(data.get("tolerances", {})),
        params=dict(data.get("params", {})),
        models=list(data.get("models", [])),
        tensors=list(data.get("tensors", [])),
    )
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="infogeom",
        description="Run verification suites over measures, statistics, and Fisher-metric machinery.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=SUITES)
    p_verify.add_argument("--config", help="JSON config file (validated against the shipped schema)")
    p_verify.add_argument("--seed", type=int, default=None, help="override the random seed")
    p_verify.add_argument("--trials", type=int, default=None, help="override the trial count")
    p_verify.add_argument("--out", default=None, help="output directory for reports")
    p_verify.add_argument("--jobs", type=int, default=None, help="concurrent trial workers")

    p_plot = sub.add_parser("plot-data", help="extract a plottable (index, value) CSV from a report")
    p_plot.add_argument("report", help="path to a suite JSON report")
    p_plot.add_argument("quantity", help="name of the quantity to extract")
    p_plot.add_argument("--out", default=None, help="output CSV path")

    args = parser.parse_args(argv)

    if args.command == "verify":
        try:
            cfg = _build_config(args)
        except SystemExit as exc:
            if isinstance(exc.code, str):
                print(exc.code, file=sys.stderr)
                return 2
            return exc.code if isinstance(exc.code, int) else 2
        if cfg.trials < 0:
            print("error: trials must be at least 1", file=sys.stderr)
            return 2
        try:
            status, json_path, csv_path = run_suite(cfg)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        report = json.loads(json_path.read_text())
        print(
            f"suite={cfg.suite} seed={cfg.seed} trials={report['trials']} "
            f"violations={report['violations']} -> {'PASS' if status == 0 else 'FAIL'}"
        )
        if status != 0:
            for rec in report["records"]:
                if rec["verdict"] == "fail":
                    print(f"  failing trial {rec['trial']} ({rec['check']}): digest {rec['digest']}")
        print(f"report: {json_path}")
        print(f"summary: {csv_path}")
        return status

    try:
        out = emit_plot_data(Path(args.report), args.quantity,
                             Path(args.out) if args.out else None)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"plot data: {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
