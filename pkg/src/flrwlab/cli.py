"""Command-line interface.

Subcommands: exponents, linear-decay, semilinear, sweep, verify-multipliers.
Exit codes: 0 all checks passed, 1 error, 2 completed with failed checks.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import FlrwLabError
from .harness import (
    Report,
    dichotomy_sweep,
    exponents_table,
    export_csv,
    export_report_json,
    parse_config,
    run_linear_decay,
    run_semilinear_decay,
    verify_multipliers,
)


def _common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="path to the JSON configuration")
    sub.add_argument("--out", help="output path (CSV for series, JSON report "
                                   "with --json-out)")
    sub.add_argument("--json-out", help="write the full report as JSON here")
    sub.add_argument("--threads", type=int, default=1,
                     help="parallel workers for sweeps")
    sub.add_argument("--seed", type=int, default=0, help="sampling seed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flrwlab",
                                 description="damped-wave decay laboratory")
    sp = ap.add_subparsers(dest="command", required=True)

    p = sp.add_parser("exponents", help="print the exponent table for (n, ell, beta)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ell", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--q", type=float, action="append", default=None,
                   help="L^q indices for rate rows (repeatable)")
    _common(p)

    for name, help_text in (("linear-decay", "linear decay-rate experiment"),
                            ("semilinear", "semilinear decay experiment")):
        p = sp.add_parser(name, help=help_text)
        _common(p)

    p = sp.add_parser("sweep", help="dichotomy sweep over nonlinearity powers")
    p.add_argument("--p-list", required=True,
                   help="comma-separated powers, e.g. 3,4,5,6,7")
    _common(p)

    p = sp.add_parser("verify-multipliers", help="multiplier vs ODE audit CSV")
    _common(p)
    return ap


def _load_config(path: str | None) -> dict:
    if not path:
        raise FlrwLabError("this subcommand needs --config <path>")
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _finish(report: Report, args) -> int:
    for note in report.notes:
        print(f"note: {note}")
    for cmp_row in report.comparisons:
        status = "PASS" if cmp_row["passed"] else "FAIL"
        variant = f" [{cmp_row['variant']}]" if cmp_row.get("variant") else ""
        print(f"{status} {cmp_row['column']}{variant}: measured "
              f"{cmp_row['measured']:+.4f} vs {cmp_row['case_tag']} "
              f"{cmp_row['predicted']:+.4f} (tol {cmp_row['tolerance']})")
    if args.out:
        export_csv(report, args.out)
        print(f"wrote {args.out}")
    if args.json_out:
        export_report_json(report, args.json_out)
        print(f"wrote {args.json_out}")
    print("result:", "PASS" if report.passed else "COMPLETED-WITH-FAILURES")
    return 0 if report.passed else 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "exponents":
            table = exponents_table(args.n, args.ell, args.beta,
                                    q_list=tuple(args.q) if args.q else (2.0,))
            for key, val in table.items():
                if key == "linear_rates":
                    for q, row in val.items():
                        print(f"  L^{q} rate: {row}")
                else:
                    print(f"{key} = {val}")
            if args.json_out or args.out:
                path = args.json_out or args.out
                with open(path, "w", encoding="utf-8", newline="\n") as fh:
                    json.dump(table, fh, indent=2, sort_keys=True)
                    fh.write("\n")
                print(f"wrote {path}")
            return 0
        if args.command == "linear-decay":
            parsed = parse_config(_load_config(args.config))
            return _finish(run_linear_decay(parsed, seed=args.seed), args)
        if args.command == "semilinear":
            parsed = parse_config(_load_config(args.config))
            return _finish(run_semilinear_decay(parsed, seed=args.seed), args)
        if args.command == "sweep":
            parsed = parse_config(_load_config(args.config))
            p_list = [float(x) for x in args.p_list.split(",") if x]
            report = dichotomy_sweep(parsed, p_list, threads=args.threads,
                                     seed=args.seed)
            for row in report.rows:
                print(f"p = {row['p']}: {row['classification']} "
                      f"(status {row['status']}, exponent {row['exponent']})")
            return _finish(report, args)
        if args.command == "verify-multipliers":
            doc = _load_config(args.config) if args.config else {}
            spec = doc.get("samples", doc)
            report = verify_multipliers(spec, seed=args.seed)
            return _finish(report, args)
        raise FlrwLabError(f"unknown command {args.command!r}")
    except FlrwLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
