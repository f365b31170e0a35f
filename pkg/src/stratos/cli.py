"""Batch command-line interface.

Subcommands: classify, stratify, hhi, simulate, solve-ta, serve. Data errors
exit with 1 and a diagnostic on stderr; usage errors exit with 2. Outputs are
byte-identical across repeated runs on the same inputs.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import IO, Sequence

from . import __version__
from .classifier import classify_snapshot, cumulative_shares
from .concentration import hhi, hhi_report, simulate_threshold_impact
from .errors import PortfolioError
from .io import (
    RESULT_COLUMNS,
    config_from_dict,
    format_share,
    load_config,
    load_portfolio,
    summary_dict,
    write_hhi_report_csv,
    write_impact_csv,
    write_result_csv,
    write_summary_json,
)
from .model import DEFAULT_THRESHOLDS, Thresholds
from .productivity import BlendSpec, blend_curve, optimal_blend_point, productivity_curve
from .segmentation import default_config, stratify

CONFIG_ENV_VAR = "STRATOS_CONFIG"


def _add_input(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="portfolio CSV file")


def _add_thresholds(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--t-a", type=float, default=DEFAULT_THRESHOLDS.t_a)
    parser.add_argument("--t-b", type=float, default=DEFAULT_THRESHOLDS.t_b)
    parser.add_argument("--t-c", type=float, default=DEFAULT_THRESHOLDS.t_c)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stratos", description="ABCD product-portfolio stratification engine"
    )
    parser.add_argument("--version", action="version", version=f"stratos {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="single-slice ABCD classification of a whole file")
    _add_input(p)
    _add_thresholds(p)
    p.add_argument("--output", required=True, help="result CSV path")
    p.add_argument("--summary", help="also write a JSON summary here")

    p = sub.add_parser("stratify", help="multi-pass stage-1/stage-2 stratification")
    _add_input(p)
    p.add_argument(
        "--config",
        help=f"config JSON path (falls back to ${CONFIG_ENV_VAR}, then built-in defaults)",
    )
    p.add_argument("--output", required=True, help="result CSV path")
    p.add_argument("--summary", help="JSON summary path (default: <output>.summary.json)")
    p.add_argument("--workers", type=int, default=1, help="threads for per-group classification")

    p = sub.add_parser("hhi", help="concentration report per hierarchy slice")
    _add_input(p)
    p.add_argument("--dims", default="", help="comma-separated dimensions to group by")
    p.add_argument("--output", help="report CSV path (default: stdout)")

    p = sub.add_parser("simulate", help="impact of candidate t_a values on the A class")
    _add_input(p)
    p.add_argument("--candidates", required=True, help="comma-separated t_a candidates")
    p.add_argument("--baseline", type=float, default=DEFAULT_THRESHOLDS.t_a)
    p.add_argument("--t-b", type=float, default=DEFAULT_THRESHOLDS.t_b)
    p.add_argument("--t-c", type=float, default=DEFAULT_THRESHOLDS.t_c)
    p.add_argument("--output", help="impact CSV path (default: stdout)")

    p = sub.add_parser("solve-ta", help="blend-optimal item count and derived t_a")
    _add_input(p)
    p.add_argument("--later-count", type=int, required=True, help="item count of the fixed later-pass portfolio (j)")
    p.add_argument("--later-revenue", type=float, required=True, help="total revenue of that portfolio (J)")

    p = sub.add_parser("serve", help="run the HTTP calibration service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--cors-origin", action="append", default=None, help="allowed UI origin (repeatable)")
    p.add_argument("--max-upload-bytes", type=int, default=100 * 1024 * 1024)
    p.add_argument("--spill-dir", help="spill uploaded portfolios here and bound memory use")

    return parser


def _open_out(path: str | None) -> IO[str]:
    if path is None:
        return sys.stdout
    return open(path, "w", encoding="utf-8", newline="")


def _close_out(fh: IO[str]) -> None:
    if fh is not sys.stdout:
        fh.close()


def _cmd_classify(args: argparse.Namespace) -> int:
    snapshot = load_portfolio(args.input)
    thresholds = Thresholds(args.t_a, args.t_b, args.t_c)
    assignment = classify_snapshot(snapshot, thresholds)
    if snapshot.total_units > 0:
        shares = cumulative_shares(snapshot).shares
    else:
        shares = [0.0] * snapshot.n
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        import csv as _csv

        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        ids = snapshot.item_ids()
        for i, label in enumerate(assignment.labels):
            writer.writerow([ids[i], label.name, "classify", format_share(float(shares[i]))])
    if args.summary:
        import json

        counts: dict[str, int] = {}
        for label in assignment.labels:
            counts[label.name] = counts.get(label.name, 0) + 1
        doc = {
            "portfolio": {"n": snapshot.n, "total_value": str(snapshot.total_value)},
            "thresholds": {"t_a": args.t_a, "t_b": args.t_b, "t_c": args.t_c},
            "classes": {name: counts.get(name, 0) for name in ("A", "B", "C", "D")},
            "run": {"tool": f"stratos {__version__}"},
        }
        with open(args.summary, "w", encoding="utf-8", newline="") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def _cmd_stratify(args: argparse.Namespace) -> int:
    snapshot = load_portfolio(args.input)
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    config = load_config(config_path) if config_path else default_config()
    result = stratify(snapshot, config, workers=args.workers)
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        write_result_csv(result, fh)
    summary_path = args.summary or f"{args.output}.summary.json"
    doc = summary_dict(result, snapshot, config, run_meta={"input": str(args.input)})
    with open(summary_path, "w", encoding="utf-8", newline="") as fh:
        write_summary_json(doc, fh)
    return 0


def _cmd_hhi(args: argparse.Namespace) -> int:
    snapshot = load_portfolio(args.input)
    dims = [d for d in args.dims.split(",") if d] if args.dims else []
    if dims:
        rows = hhi_report(snapshot, dims)
    else:
        index = hhi(snapshot)
        from .model import SliceKey

        rows = [(SliceKey(), index)]
    fh = _open_out(args.output)
    try:
        write_hhi_report_csv(rows, dims, fh)
        sizes = {index.n for _, index in rows}
        if len(sizes) > 1:
            print(
                "note: slices differ in item count; their concentration values "
                "are not directly comparable",
                file=sys.stderr,
            )
    finally:
        _close_out(fh)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    snapshot = load_portfolio(args.input)
    try:
        candidates = [float(x) for x in args.candidates.split(",") if x.strip()]
    except ValueError:
        raise PortfolioError(f"bad candidate list {args.candidates!r}") from None
    try:
        rows = simulate_threshold_impact(
            snapshot, candidates, args.t_b, args.t_c, baseline_t_a=args.baseline
        )
    except ValueError as exc:
        raise PortfolioError(str(exc)) from None
    fh = _open_out(args.output)
    try:
        write_impact_csv(rows, fh)
    finally:
        _close_out(fh)
    return 0


def _cmd_solve_ta(args: argparse.Namespace) -> int:
    snapshot = load_portfolio(args.input)
    blend = BlendSpec(j=args.later_count, J=args.later_revenue)
    curve = productivity_curve(snapshot)
    p_star, residual = optimal_blend_point(curve, blend)
    t_a_star = blend_curve(curve, blend).t_a_star
    print(f"p_star={p_star}")
    print(f"t_a_star={format_share(t_a_star)}")
    print(f"residual={residual:.6f}")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(
        max_upload_bytes=args.max_upload_bytes,
        cors_origins=tuple(args.cors_origin) if args.cors_origin else ("*",),
        spill_dir=args.spill_dir,
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


_COMMANDS = {
    "classify": _cmd_classify,
    "stratify": _cmd_stratify,
    "hhi": _cmd_hhi,
    "simulate": _cmd_simulate,
    "solve-ta": _cmd_solve_ta,
    "serve": _cmd_serve,
}


def run_cli(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except PortfolioError as exc:
        print(f"stratos: error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"stratos: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"stratos: error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
