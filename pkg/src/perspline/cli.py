"""Command-line interface.

Exit codes: 0 success (verification passed), 1 verification failed,
2 solver or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import PersplineError
from .pipeline import RunConfig, run_plot, run_solve, verify_spline
from .spline import PerfectSpline


def _add_config_arg(parser):
    parser.add_argument("--config", required=True, help="problem config JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="perspline",
        description="Construct periodic perfect splines interpolating a "
                    "function in the mean.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem config")
    _add_config_arg(p_solve)
    p_solve.add_argument("--out-spline", default="spline.json")
    p_solve.add_argument("--out-report", default="report.json")

    p_verify = sub.add_parser("verify", help="re-verify a spline file")
    p_verify.add_argument("--spline", required=True)
    _add_config_arg(p_verify)

    p_plot = sub.add_parser("plot", help="emit CSV (and optional SVG) curves")
    p_plot.add_argument("--spline", required=True)
    _add_config_arg(p_plot)
    p_plot.add_argument("--out", required=True, help="output CSV path")
    p_plot.add_argument("--svg", default=None, help="optional SVG path")

    p_batch = sub.add_parser("batch", help="solve every *.json config in a dir")
    p_batch.add_argument("--dir", required=True)
    return parser


def _load_spline(path: str) -> PerfectSpline:
    try:
        return PerfectSpline.load(path)
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        raise PersplineError(f"cannot read spline {path}: {exc}") from exc


def _cmd_solve(args) -> int:
    config = RunConfig.load(args.config)
    _, report = run_solve(config, spline_path=args.out_spline,
                          report_path=args.out_report)
    print(json.dumps(report, indent=2))
    return 0 if report["passed"] else 1


def _cmd_verify(args) -> int:
    config = RunConfig.load(args.config)
    spline = _load_spline(args.spline)
    report = verify_spline(spline, config)
    print(json.dumps(report, indent=2))
    return 0 if report["passed"] else 1


def _cmd_plot(args) -> int:
    config = RunConfig.load(args.config)
    spline = _load_spline(args.spline)
    run_plot(spline, config, args.out, svg_path=args.svg)
    return 0


def _cmd_batch(args) -> int:
    directory = Path(args.dir)
    configs = sorted(directory.glob("*.json"))
    if not configs:
        print(f"no configs found in {directory}", file=sys.stderr)
        return 2
    worst = 0
    for path in configs:
        if path.name.endswith(".spline.json") or path.name.endswith(".report.json"):
            continue
        stem = path.with_suffix("")
        try:
            config = RunConfig.load(path)
            _, report = run_solve(
                config,
                spline_path=f"{stem}.spline.json",
                report_path=f"{stem}.report.json",
            )
            status = "pass" if report["passed"] else "FAIL"
            print(f"{path.name}: {status}")
            if not report["passed"]:
                worst = max(worst, 1)
        except PersplineError as exc:
            print(f"{path.name}: error [{exc.code}] {exc}")
            worst = 2
    return worst


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "solve": _cmd_solve,
        "verify": _cmd_verify,
        "plot": _cmd_plot,
        "batch": _cmd_batch,
    }[args.command]
    try:
        return handler(args)
    except PersplineError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
