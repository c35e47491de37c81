"""Run a configured verification and write the report files"""
import dataclasses

import pandas as pd

from cli_harness import EXIT_PASS, EXIT_VIOLATION, emit, load_config, run_report


def add_arguments(parser):
    parser.add_argument("--config", required=True, help="run configuration (.json or .toml)")
    parser.add_argument("--out", help="output directory, overrides the config")
    parser.add_argument("--format", help="comma-separated formats: csv,json,gnuplot,html,db")


def format_checks(checks):
    """Check reports as a display table"""
    if not checks:
        return "no checks requested"
    df = pd.DataFrame([c.to_dict() for c in checks])
    columns = [c for c in ["name", "kind", "lhs", "rhs", "tolerance", "passed", "truncation"] if c in df.columns]
    return df[columns].to_string(index=False)


def run(args):
    config = load_config(args.config)
    if args.out:
        config = dataclasses.replace(config, out=args.out)
    if args.format:
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        config = dataclasses.replace(config, formats=formats)

    result = run_report(config)
    emit(result)

    print(result.report.rows.drop(columns=["violation"]).to_string(index=False, float_format=lambda x: f"{x:.6g}"))
    print()
    print(format_checks(result.checks))
    print()
    print("PASS" if result.passed else "FAIL: bound violation, refine the grid levels")
    return EXIT_PASS if result.passed else EXIT_VIOLATION
