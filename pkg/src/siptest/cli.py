"""Command-line front end: test / acf / simulate / serve.

The CLI is a thin client over the library; all numbers it prints come
from the same code paths the service exposes.  Exit codes are stable:

    0  success
    2  unreadable input, malformed config, or bad usage
    3  infeasible lag order for the series length
    4  degenerate variance (e.g. constant input)
    5  infeasible simulation design

Nothing is written to standard error on success paths.
"""

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from .acf import classical_acf, emit_acf, shift_immune_acf
from .errors import DegenerateVarianceError, InfeasibleDesignError
from .portmanteau import box_pierce, sip_test
from .seriesio import (
    SeriesParseError,
    envelope_json,
    load_series,
    make_envelope,
    make_error_envelope,
)
from .simulate import (
    config_from_dict,
    report_csv_bytes,
    report_json_bytes,
    run_rejection_study,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE_LAG = 3
EXIT_DEGENERATE = 4
EXIT_INFEASIBLE_DESIGN = 5


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sip",
        description="Shift-immune autocorrelation testing for series with frequent mean shifts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run a white-noise test on a series file")
    p_test.add_argument("file")
    p_test.add_argument("--lag", type=int, default=4, metavar="M", help="lag order (default 4)")
    p_test.add_argument(
        "--method", choices=["sip1", "sip2", "box"], default="sip2",
        help="test variant (default sip2)",
    )
    p_test.add_argument(
        "--conservative", action="store_true",
        help="double the clamped jump-energy estimate (stricter validity, less power)",
    )
    p_test.add_argument("--format", choices=["json", "text"], default="text")
    p_test.add_argument("--column", default=None, help="CSV column to read")

    p_acf = sub.add_parser("acf", help="emit ACF values and significance bands")
    p_acf.add_argument("file")
    p_acf.add_argument("--max-lag", type=int, default=20, metavar="S")
    p_acf.add_argument("--kind", choices=["sip", "classical", "both"], default="both")
    p_acf.add_argument("--out", choices=["csv", "json", "svg"], default="csv")
    p_acf.add_argument(
        "--output", default="acf",
        help="output prefix, or '-' for stdout (single kind only)",
    )
    p_acf.add_argument("--column", default=None, help="CSV column to read")

    p_sim = sub.add_parser("simulate", help="run a rejection-rate study")
    p_sim.add_argument("config", help="config file path or bundled config name")
    p_sim.add_argument("--threads", type=int, default=1)
    p_sim.add_argument("--out", default=".", metavar="DIR")
    p_sim.add_argument("--reps", type=int, default=None, help="override config reps")
    p_sim.add_argument("--seed", type=int, default=None, help="override config seed")

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def _fail(args, command: str, code: int, error_code: str, message: str) -> int:
    if getattr(args, "format", None) == "json":
        sys.stdout.write(envelope_json(make_error_envelope(command, error_code, message)))
    else:
        sys.stderr.write(f"sip: error: {message}\n")
    return code


def _cmd_test(args) -> int:
    command = f"test {args.file} --lag {args.lag} --method {args.method}"
    try:
        x = load_series(args.file, column=args.column)
    except SeriesParseError as exc:
        return _fail(args, command, EXIT_USAGE, "parse-error", str(exc))
    n = x.size
    if args.method == "box":
        feasible = 1 <= args.lag < n
    else:
        feasible = args.lag >= 1 and args.lag + 2 < n / 2
    if not feasible:
        return _fail(
            args, command, EXIT_INFEASIBLE_LAG, "infeasible-lag",
            f"lag order {args.lag} is infeasible for a series of length {n}",
        )
    try:
        if args.method == "box":
            res = box_pierce(x, args.lag)
            payload = {
                "method": "box", "m": res.m, "df": res.m, "n": res.n,
                "statistic": res.statistic, "p_value": res.p_value,
            }
            text = [
                "method: box", f"m: {res.m}", f"n: {res.n}",
                f"statistic: {res.statistic!r}", f"df: {res.m}",
                f"p_value: {res.p_value!r}",
            ]
        else:
            res = sip_test(x, args.lag, variant=args.method, conservative=args.conservative)
            payload = {
                "method": res.variant, "conservative": res.conservative,
                "m": res.m, "df": res.df, "n": res.n,
                "statistic": res.statistic, "p_value": res.p_value,
                "gamma0": res.gamma0_used, "w_raw": res.w_raw, "w_used": res.w_used,
                "rho_hat": [float(r) for r in res.rho_hat],
            }
            text = [
                f"method: {res.variant}",
                f"conservative: {str(res.conservative).lower()}",
                f"m: {res.m}", f"n: {res.n}",
                f"statistic: {res.statistic!r}", f"df: {res.df}",
                f"p_value: {res.p_value!r}",
                f"gamma0: {res.gamma0_used!r}",
                f"w_raw: {res.w_raw!r}", f"w_used: {res.w_used!r}",
            ]
    except DegenerateVarianceError as exc:
        return _fail(args, command, EXIT_DEGENERATE, "degenerate-variance", str(exc))
    if args.format == "json":
        sys.stdout.write(envelope_json(make_envelope(command, payload)))
    else:
        sys.stdout.write("\n".join(text) + "\n")
    return EXIT_OK


def _cmd_acf(args) -> int:
    command = f"acf {args.file} --max-lag {args.max_lag} --kind {args.kind}"
    if args.max_lag < 1:
        return _fail(args, command, EXIT_USAGE, "usage", "--max-lag must be >= 1")
    kinds = ["sip", "classical"] if args.kind == "both" else [args.kind]
    if args.output == "-" and len(kinds) > 1:
        return _fail(args, command, EXIT_USAGE, "usage", "stdout output needs a single kind")
    try:
        x = load_series(args.file, column=args.column)
    except SeriesParseError as exc:
        return _fail(args, command, EXIT_USAGE, "parse-error", str(exc))
    n = x.size
    if "sip" in kinds and not args.max_lag + 2 < n / 2:
        return _fail(
            args, command, EXIT_INFEASIBLE_LAG, "infeasible-lag",
            f"max lag {args.max_lag} is infeasible for a series of length {n}",
        )
    if "classical" in kinds and not args.max_lag < n:
        return _fail(
            args, command, EXIT_INFEASIBLE_LAG, "infeasible-lag",
            f"max lag {args.max_lag} is infeasible for a series of length {n}",
        )
    try:
        for kind in kinds:
            data = (
                shift_immune_acf(x, args.max_lag)
                if kind == "sip"
                else classical_acf(x, args.max_lag)
            )
            blob = emit_acf(data, args.out)
            if args.output == "-":
                sys.stdout.buffer.write(blob)
            else:
                path = Path(f"{args.output}_{kind}.{args.out}")
                path.write_bytes(blob)
                sys.stdout.write(f"wrote {path}\n")
    except DegenerateVarianceError as exc:
        return _fail(args, command, EXIT_DEGENERATE, "degenerate-variance", str(exc))
    return EXIT_OK


def bundled_config_names() -> list[str]:
    base = resources.files("siptest").joinpath("configs")
    return sorted(p.name[: -len(".json")] for p in base.iterdir() if p.name.endswith(".json"))


def _load_config_text(spec: str) -> str:
    path = Path(spec)
    if path.exists():
        return path.read_text(encoding="utf-8")
    bundled = resources.files("siptest").joinpath("configs", f"{spec}.json")
    if bundled.is_file():
        return bundled.read_text(encoding="utf-8")
    raise SeriesParseError(
        f"no config file {spec!r}; bundled configs: {', '.join(bundled_config_names())}"
    )


def _cmd_simulate(args) -> int:
    command = f"simulate {args.config}"
    try:
        text = _load_config_text(args.config)
        payload = json.loads(text)
        if args.reps is not None:
            payload["reps"] = args.reps
        if args.seed is not None:
            payload["seed"] = args.seed
        config = config_from_dict(payload)
    except (SeriesParseError, ValueError, TypeError) as exc:
        return _fail(args, command, EXIT_USAGE, "bad-config", str(exc))
    try:
        report = run_rejection_study(config, threads=max(1, args.threads))
    except InfeasibleDesignError as exc:
        return _fail(args, command, EXIT_INFEASIBLE_DESIGN, "infeasible-design", str(exc))
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "report.csv"
    json_path = out_dir / "report.json"
    csv_path.write_bytes(report_csv_bytes(report))
    json_path.write_bytes(report_json_bytes(report))
    sys.stdout.write(f"wrote {csv_path}\nwrote {json_path}\n")
    for cell in report.cells:
        sys.stdout.write(
            f"{cell.method:>8}  m={cell.m:<3d} rate={cell.rejection_rate:.4f} "
            f"(se={cell.mc_standard_error:.4f}, degenerate={cell.degenerate})\n"
        )
    sys.stdout.write(f"true_w={report.true_w!r}\n")
    sys.stdout.write(f"wall_time_s={report.wall_time_s:.3f}\n")
    return EXIT_OK


def _cmd_serve(args) -> int:
    try:
        import uvicorn
    except ImportError:
        sys.stderr.write("sip: error: the serve command needs the 'uvicorn' package\n")
        return EXIT_USAGE
    from .service import app

    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "test":
        return _cmd_test(args)
    if args.command == "acf":
        return _cmd_acf(args)
    if args.command == "simulate":
        return _cmd_simulate(args)
    return _cmd_serve(args)


if __name__ == "__main__":
    raise SystemExit(main())
