"""Fourier-side checks for the eigenfunctions of a configured domain"""
import dataclasses

from cli_harness import EXIT_PASS, EXIT_VIOLATION, load_config, run_report
from commands.run import format_checks


def add_arguments(parser):
    parser.add_argument("--config", required=True, help="run configuration (.json or .toml)")
    parser.add_argument("--Z", type=float, help="truncation radius of the z quadrature")
    parser.add_argument("--dz", type=float, help="z quadrature step")
    parser.add_argument("--k", type=int, help="number of eigenfunctions in f")
    parser.add_argument("--samples", type=int, help="random z for the pointwise bounds")


def run(args):
    config = load_config(args.config)
    overrides = {key: getattr(args, key) for key in ("Z", "dz", "k", "samples") if getattr(args, key) is not None}
    config = dataclasses.replace(config, checks=("fourier",), fourier={**config.fourier, **overrides})

    result = run_report(config)
    print(format_checks(result.checks))
    passed = all(c.passed for c in result.checks)
    print("\nPASS" if passed else "\nFAIL")
    return EXIT_PASS if passed else EXIT_VIOLATION
